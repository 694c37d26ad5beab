//! Function input: `(pi, phi)` or a hex truth table.

use anyhow::{anyhow, bail, Result};
use mfnear::boolfun::{split_blocks, TruthTable};
use mfnear::mmf::{MMFunction, Permutation};

pub struct FunctionInput {
    pub table: TruthTable,
    /// The `(pi, phi)` naming the function, when it lies in MF.
    pub mm: Option<MMFunction>,
}

/// `phi` as a bit string, character `y` holding `phi(y)`.
fn parse_phi(bits: &str, n: usize) -> Result<TruthTable> {
    let bits = bits.trim();
    if bits.len() != 1 << n {
        bail!("phi needs {} bits for n = {n}, got {}", 1 << n, bits.len());
    }
    let values: Vec<bool> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(anyhow!("phi may only contain 0 and 1, found {c:?}")),
        })
        .collect::<Result<_>>()?;
    Ok(TruthTable::from_fn(n, |y| values[y as usize])?)
}

pub fn phi_bits(phi: &TruthTable) -> String {
    (0..phi.len() as u32).map(|y| if phi.get(y) { '1' } else { '0' }).collect()
}

pub fn parse(pi: Option<&str>, phi: Option<&str>, hex: Option<&str>) -> Result<FunctionInput> {
    match (pi, phi, hex) {
        (Some(pi), phi, None) => {
            let table: Vec<u32> =
                serde_json::from_str(pi).map_err(|e| anyhow!("pi must be a JSON array of integers: {e}"))?;
            let pi = Permutation::new(table)?;
            let phi = match phi {
                Some(bits) => parse_phi(bits, pi.n())?,
                None => TruthTable::zero(pi.n())?,
            };
            let mm = MMFunction::new(pi, phi)?;
            Ok(FunctionInput {
                table: mm.table(),
                mm: Some(mm),
            })
        }
        (None, None, Some(hex)) => {
            let hex = hex.trim().trim_start_matches("0x");
            let vars = TruthTable::vars_for_hex_len(hex.len())
                .filter(|v| v % 2 == 0)
                .ok_or_else(|| anyhow!("hex length {} does not match an even number of variables", hex.len()))?;
            let table = TruthTable::from_hex(vars, hex)?;
            let mm = split_blocks(&table).and_then(|(sigma, psi)| {
                let pi = Permutation::new(sigma).ok()?;
                let phi = TruthTable::from_fn(vars / 2, |y| psi[y as usize]).ok()?;
                MMFunction::new(pi, phi).ok()
            });
            Ok(FunctionInput { table, mm })
        }
        (None, Some(_), _) => bail!("--phi needs --pi"),
        _ => bail!("give either --pi [--phi] or --hex"),
    }
}
