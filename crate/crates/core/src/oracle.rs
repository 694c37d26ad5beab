//! Brute-force and Monte Carlo verifiers.
//!
//! The checks here are rebuilt from the definitions with GF(2) and truth-table
//! primitives only. The witness criterion and the closed formulas enter solely
//! as the values being compared against.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::time::Instant;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::boolfun::{
    affine_coefficients, affine_on_all_cosets, ea_transform, is_bent, is_maiorana_mcfarland, walsh_transform,
    AffineFunction, BoolFunError, TruthTable,
};
use crate::counting::{self, CountError, ExactRational};
use crate::gf2::{
    affine_hull_bits, affine_subspaces, linear_subspaces, low_mask, parity, AffineSubspace, Gf2Error, Gf2Matrix,
    LinearSubspace,
};
use crate::mmf::{
    coincidence_parents, decompose_subspace, near_count, near_enumerate, realize_all, MMFunction, MmfError,
    NearBentWitness, Permutation,
};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{0}")]
    Range(String),
    #[error("input function is not bent")]
    NotBent,
    #[error("brute scan produced a non-bent function {0}")]
    NonBentMember(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error(transparent)]
    Mmf(#[from] MmfError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    BoolFun(#[from] BoolFunError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Largest number of variables for a full subspace scan.
pub const MAX_BRUTE_VARS: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WorkCounters {
    pub subspaces_scanned: u64,
    pub functions_tested: u64,
}

impl std::ops::AddAssign for WorkCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.subspaces_scanned += rhs.subspaces_scanned;
        self.functions_tested += rhs.functions_tested;
    }
}

/// Result of one verifier. A failing outcome always carries a witness.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationOutcome {
    pub label: String,
    pub pass: bool,
    pub expected: String,
    pub observed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub counters: WorkCounters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl VerificationOutcome {
    #[allow(clippy::too_many_arguments)]
    fn finish(
        label: impl Into<String>,
        expected: impl Display,
        observed: impl Display,
        pass: bool,
        witness: Option<String>,
        counters: WorkCounters,
        seed: Option<u64>,
        start: Instant,
    ) -> Self {
        let expected = expected.to_string();
        let observed = observed.to_string();
        let witness = match (pass, witness) {
            (false, None) => Some(format!("expected {expected}, observed {observed}")),
            (_, w) => w,
        };
        Self {
            label: label.into(),
            pass,
            expected,
            observed,
            witness,
            counters,
            seed,
            wall_ms: Some(start.elapsed().as_secs_f64() * 1e3),
        }
    }

    /// Drops the wall time so the outcome depends only on its inputs.
    pub fn without_timing(mut self) -> Self {
        self.wall_ms = None;
        self
    }
}

/// Mean and standard error of a seeded sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub count: u64,
    pub seed: u64,
    pub min: f64,
    pub max: f64,
}

impl SampleEstimate {
    pub fn from_values(values: &[f64], seed: u64) -> Self {
        let count = values.len() as f64;
        let mean = values.iter().sum::<f64>() / count;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / count).sqrt(),
            count: values.len() as u64,
            seed,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// `(mean - target) / SE`; zero when both the SE and the gap vanish.
    pub fn z_score(&self, target: f64) -> f64 {
        let gap = self.mean - target;
        if self.std_error == 0.0 {
            if gap == 0.0 {
                0.0
            } else {
                gap.signum() * f64::INFINITY
            }
        } else {
            gap / self.std_error
        }
    }
}

/// Independent stream `i` of the generator seeded with `seed`, so results do
/// not depend on scheduling.
pub fn trial_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// All submasks of `mask` in increasing order.
fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = (cur != mask).then(|| cur.wrapping_sub(mask) & mask);
        Some(cur)
    })
}

fn all_permutations(n: usize) -> Vec<Vec<u32>> {
    (0..1u32 << n).permutations(1 << n).collect()
}

/// Every `(pi, phi)` on `n` variables, `pi` in lexicographic order.
fn all_mf(n: usize) -> Result<Vec<MMFunction>> {
    let mut out = Vec::new();
    for table in all_permutations(n) {
        let pi = Permutation::new(table)?;
        for bits in 0u32..1 << (1 << n) {
            let phi = TruthTable::from_fn(n, |y| bits >> y & 1 == 1)?;
            out.push(MMFunction::new(pi.clone(), phi)?);
        }
    }
    Ok(out)
}

fn random_invertible(n: usize, rng: &mut impl Rng) -> Result<Gf2Matrix> {
    loop {
        let rows = (0..n).map(|_| rng.random::<u32>() & low_mask(n)).collect();
        let m = Gf2Matrix::from_rows(rows, n)?;
        if m.is_invertible() {
            return Ok(m);
        }
    }
}

/// The `n`-dimensional affine subspaces on which `f` is affine, sorted.
/// Returns the flats and the number of subspaces scanned.
pub fn near_flats(f: &TruthTable) -> Result<(Vec<AffineSubspace>, u64)> {
    let m = f.vars();
    if m % 2 == 1 {
        return Err(BoolFunError::OddVariables(m).into());
    }
    if m > MAX_BRUTE_VARS {
        return Err(OracleError::Range(format!("brute scan needs 2n <= {MAX_BRUTE_VARS}, got {m}")));
    }
    let n = m / 2;
    let all = linear_subspaces(m, n)?;
    let full = low_mask(m);
    let mut flats: Vec<AffineSubspace> = all
        .par_iter()
        .flat_map_iter(|v| {
            let free = !v.pivot_mask() & full;
            submasks(free)
                .filter(|&a| affine_coefficients(f, a, v.basis()).is_some())
                .map(|a| AffineSubspace::new(a, v.clone()).expect("canonical base"))
                .collect::<Vec<_>>()
        })
        .collect();
    flats.sort();
    Ok((flats, (all.len() as u64) << n))
}

fn flip_flat(f: &TruthTable, u: &AffineSubspace) -> TruthTable {
    let mut t = f.clone();
    for p in u.points() {
        t.flip(p);
    }
    t
}

/// `{f + 1_U : f affine on U}` over all `n`-dimensional affine `U`, every
/// member re-checked bent through its Walsh spectrum. Sorted.
pub fn near_brute(f: &TruthTable) -> Result<Vec<TruthTable>> {
    if !is_bent(f)? {
        return Err(OracleError::NotBent);
    }
    let (flats, _) = near_flats(f)?;
    let mut out: Vec<TruthTable> = flats.par_iter().map(|u| flip_flat(f, u)).collect();
    if let Some(bad) = out.iter().find(|t| !is_bent(t).unwrap_or(false)) {
        return Err(OracleError::NonBentMember(bad.to_hex()));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Brute set versus the realized criterion set for one function.
fn near_discrepancy(g: &MMFunction) -> Result<Option<String>> {
    let f = g.table();
    let brute = near_brute(&f)?;
    let witnesses = near_enumerate(g)?;
    let mut realized = realize_all(g, &witnesses);
    realized.sort();
    let distinct = {
        let mut d = realized.clone();
        d.dedup();
        d.len()
    };
    let count = near_count(g)?;
    if brute == realized && distinct == realized.len() && count as usize == brute.len() {
        return Ok(None);
    }
    let b: BTreeSet<_> = brute.iter().collect();
    let r: BTreeSet<_> = realized.iter().collect();
    Ok(Some(format!(
        "f = {}: brute {}, criterion {} ({} distinct, count {}), only brute {}, only criterion {}",
        f.to_hex(),
        brute.len(),
        realized.len(),
        distinct,
        count,
        b.difference(&r).count(),
        r.difference(&b).count()
    )))
}

/// Set equality of `near(f)` between the criterion and the brute scan: every
/// function at `2n = 4`, otherwise `trials` random ones.
pub fn verify_near(two_n: usize, trials: u64, seed: u64) -> Result<VerificationOutcome> {
    let start = Instant::now();
    if !(4..=MAX_BRUTE_VARS).contains(&two_n) || two_n % 2 == 1 {
        return Err(OracleError::Range(format!("2n must be 4, 6 or 8, got {two_n}")));
    }
    let n = two_n / 2;
    let functions = if two_n == 4 {
        all_mf(n)?
    } else {
        (0..trials)
            .map(|i| MMFunction::random(n, &mut trial_rng(seed, i)))
            .collect::<std::result::Result<_, _>>()?
    };
    let per_scan = linear_subspaces(two_n, n)?.len() as u64 * (1u64 << n);
    let results: Vec<Option<String>> = if two_n == 8 {
        // the scan itself is parallel
        functions.iter().map(near_discrepancy).collect::<Result<_>>()?
    } else {
        functions.par_iter().map(near_discrepancy).collect::<Result<_>>()?
    };
    let bad: Vec<&String> = results.iter().flatten().collect();
    let counters = WorkCounters {
        subspaces_scanned: per_scan * functions.len() as u64,
        functions_tested: functions.len() as u64,
    };
    Ok(VerificationOutcome::finish(
        format!("near(f) criterion = brute scan, 2n={two_n}"),
        "0 discrepancies",
        format!("{} discrepancies over {} functions", bad.len(), functions.len()),
        bad.is_empty(),
        bad.first().map(|s| s.to_string()),
        counters,
        (two_n != 4).then_some(seed),
        start,
    ))
}

/// `sum_pi |A_k(pi)| = (2^n)! sigma(n, k)` by looping over every permutation.
pub fn verify_sum_pi(n: usize, k: usize) -> Result<VerificationOutcome> {
    let start = Instant::now();
    if !(1..=3).contains(&n) || k > n {
        return Err(OracleError::Range(format!("need 1 <= n <= 3 and k <= n, got n={n}, k={k}")));
    }
    let flats = affine_subspaces(n, k)?;
    let perms = all_permutations(n);
    let total: u64 = perms
        .par_iter()
        .map(|p| {
            flats
                .iter()
                .filter(|l| {
                    let images: Vec<u32> = l.points().map(|y| p[y as usize]).collect();
                    affine_hull_bits(&images, n).is_some()
                })
                .count() as u64
        })
        .sum();
    let expected = (counting::sigma(n, k)?
        * ExactRational::from_int(num_bigint::BigInt::from(counting::factorial(1 << n))))
    .to_integer()
    .ok_or_else(|| OracleError::Construction("(2^n)! sigma(n, k) is not an integer".into()))?;
    let counters = WorkCounters {
        subspaces_scanned: flats.len() as u64 * perms.len() as u64,
        functions_tested: perms.len() as u64,
    };
    Ok(VerificationOutcome::finish(
        format!("sum over pi of |A_{k}(pi)|, n={n}"),
        &expected,
        total,
        expected == total.into(),
        None,
        counters,
        None,
        start,
    ))
}

/// `sum_{phi|_L} |{H}| = 2^((k+1)^2)` for a bijection `pi_l` of `Z_2^k`.
///
/// Taken with `L` the whole space (so `n = k`): for every `phi` and every
/// affine `H : Z_2^k -> Z_2^k`, tests whether `f_{pi_l, phi}` is affine on the
/// graph `{(H(y), y)}`. Further coordinates only contribute the free factor
/// `2^(2^n - 2^k)` for `phi` off `L`.
pub fn verify_sum_phi_h(k: usize, pi_l: &[u32]) -> Result<VerificationOutcome> {
    let start = Instant::now();
    if !(1..=3).contains(&k) {
        return Err(OracleError::Range(format!("need 1 <= k <= 3, got {k}")));
    }
    let pi = Permutation::new(pi_l.to_vec())?;
    if pi.n() != k {
        return Err(OracleError::Range(format!("pi_L must act on Z_2^{k}")));
    }
    let mask = low_mask(k);
    let h_count = 1u64 << (k * (k + 1));
    let phi_count = 1u32 << (1 << k);
    let total: u64 = (0..phi_count)
        .into_par_iter()
        .map(|phi| {
            let f = TruthTable::from_fn(2 * k, |v| {
                let y = v >> k;
                parity(v & mask & pi.apply(y)) ^ (phi >> y & 1 == 1)
            })
            .expect("2k <= 6");
            (0..h_count)
                .filter(|&w| {
                    let c = (w as u32) & mask;
                    let basis: Vec<u32> =
                        (0..k).map(|i| ((w >> (k * (i + 1))) as u32 & mask) | 1 << (k + i)).collect();
                    affine_coefficients(&f, c, &basis).is_some()
                })
                .count() as u64
        })
        .sum();
    let expected = 1u64 << ((k + 1) * (k + 1));
    let counters = WorkCounters {
        subspaces_scanned: h_count * phi_count as u64,
        functions_tested: phi_count as u64,
    };
    Ok(VerificationOutcome::finish(
        format!("sum over phi|_L of |H|, k={k}, pi_L={pi_l:?}"),
        expected,
        total,
        expected == total,
        None,
        counters,
        None,
        start,
    ))
}

fn y_dim(u: &AffineSubspace, n: usize) -> usize {
    let proj: Vec<u32> = u.direction().basis().iter().map(|b| b >> n).collect();
    LinearSubspace::span(&proj, n).map(|s| s.dim()).unwrap_or(0)
}

/// Whether `h` is a closest bent function of `f`: `f + h` is the indicator of
/// an `n`-flat on which `f` is affine. Returns the flat.
fn closest_flat(f: &TruthTable, h: &TruthTable) -> Option<AffineSubspace> {
    let m = f.vars();
    let d = f.xor(h).ok()?;
    if d.weight() != 1 << (m / 2) {
        return None;
    }
    let support: Vec<u32> = (0..1u32 << m).filter(|&v| d.get(v)).collect();
    let flat = affine_hull_bits(&support, m)?;
    affine_coefficients(f, flat.base(), flat.direction().basis())?;
    Some(flat)
}

fn mm_table(pi: &[u32], phi: &TruthTable, n: usize) -> TruthTable {
    let mask = low_mask(n);
    TruthTable::from_fn(2 * n, |v| {
        let y = v >> n;
        parity(v & mask & pi[y as usize]) ^ phi.get(y)
    })
    .expect("2n <= 16")
}

type ParentKey = (Vec<u32>, TruthTable, AffineSubspace);

/// Samples `(g, U)` with `f_g` affine on `U` and `dim pi_y(U) = want`.
fn sample_witness(n: usize, want: usize, rng: &mut ChaCha8Rng, counters: &mut WorkCounters) -> Result<(MMFunction, AffineSubspace)> {
    loop {
        let g = MMFunction::random(n, rng)?;
        let (flats, scanned) = near_flats(&g.table())?;
        counters.subspaces_scanned += scanned;
        counters.functions_tested += 1;
        let pool: Vec<&AffineSubspace> = flats.iter().filter(|u| y_dim(u, n) == want).collect();
        if let Some(u) = pool.choose(rng) {
            return Ok((g, (*u).clone()));
        }
    }
}

/// One dimension-2 trial: the parents found by scanning every `(pi', phi')`
/// that agrees with `(pi, phi)` off `L`, against [`coincidence_parents`].
fn coincidence_trial(seed: u64, i: u64) -> Result<(Option<String>, WorkCounters)> {
    let n = 3;
    let mut counters = WorkCounters::default();
    let mut rng = trial_rng(seed, i);
    let (g, u) = sample_witness(n, 2, &mut rng, &mut counters)?;
    let f = g.table();
    let h = flip_flat(&f, &u);

    let ys: Vec<u32> = {
        let mut v: Vec<u32> = u.points().map(|p| p >> n).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let images: Vec<u32> = ys.iter().map(|&y| g.pi().apply(y)).collect();
    let mut scanned: BTreeSet<ParentKey> = BTreeSet::new();
    for order in (0..4).permutations(4) {
        let mut table = g.pi().table().to_vec();
        for (j, &y) in ys.iter().enumerate() {
            table[y as usize] = images[order[j]];
        }
        for bits in 0u32..16 {
            let mut phi = g.phi().clone();
            for (j, &y) in ys.iter().enumerate() {
                phi.set(y, bits >> j & 1 == 1);
            }
            counters.functions_tested += 1;
            if let Some(flat) = closest_flat(&mm_table(&table, &phi, n), &h) {
                scanned.insert((table.clone(), phi, flat));
            }
        }
    }

    let t = decompose_subspace(&u)?;
    let w = NearBentWitness::new(&g, t.l, t.h)?;
    let mut formula: BTreeSet<ParentKey> = BTreeSet::new();
    let parents = coincidence_parents(&g, &w)?;
    for p in &parents {
        let pw = p.witness()?;
        formula.insert((p.function.pi().table().to_vec(), p.function.phi().clone(), pw.subspace()));
    }
    let original = (g.pi().table().to_vec(), g.phi().clone(), u.clone());
    let ok = scanned.len() == 24 && scanned == formula && scanned.contains(&original) && parents[0].function == g;
    let msg = (!ok).then(|| {
        format!(
            "pi={:?} phi={} U={:?}: scan found {}, formulas give {}, agree on {}",
            g.pi().table(),
            g.phi().to_hex(),
            u,
            scanned.len(),
            formula.len(),
            scanned.intersection(&formula).count()
        )
    });
    Ok((msg, counters))
}

fn mf6_words(pi: &[u32]) -> u64 {
    let mut w = 0u64;
    for v in 0..64u32 {
        let y = v >> 3;
        if parity(v & 7 & pi[y as usize]) {
            w |= 1 << v;
        }
    }
    w
}

/// Every `f in MF_6` having `h` as a closest bent function.
fn mf6_parents(h: &TruthTable) -> Vec<(Vec<u32>, u32)> {
    let hw = h.words()[0];
    let phi_words: Vec<u64> = (0u32..256)
        .map(|phi| (0..8).filter(|y| phi >> y & 1 == 1).fold(0u64, |acc, y| acc | 0xFF << (8 * y)))
        .collect();
    all_permutations(3)
        .into_par_iter()
        .flat_map_iter(|p| {
            let d = mf6_words(&p) ^ hw;
            let mut found = Vec::new();
            for (phi, &pw) in phi_words.iter().enumerate() {
                if (d ^ pw).count_ones() == 8 {
                    let f = TruthTable::from_words(6, vec![d ^ pw ^ hw]).expect("64 bits");
                    if closest_flat(&f, h).is_some() {
                        found.push((p.clone(), phi as u32));
                    }
                }
            }
            found
        })
        .collect()
}

/// A dimension-3 witness at `2n = 6`: scanning all of `MF_6` must return
/// the original function alone.
fn coincidence_control(seed: u64, i: u64) -> Result<(Option<String>, WorkCounters)> {
    let n = 3;
    let mut counters = WorkCounters::default();
    let mut rng = trial_rng(seed, i);
    let (g, u) = sample_witness(n, 3, &mut rng, &mut counters)?;
    let h = flip_flat(&g.table(), &u);
    let found = mf6_parents(&h);
    counters.functions_tested += 40320 * 256;
    let phi_bits = (0..8u32).filter(|&y| g.phi().get(y)).fold(0u32, |acc, y| acc | 1 << y);
    let ok = found.len() == 1 && found[0] == (g.pi().table().to_vec(), phi_bits);
    let msg = (!ok).then(|| format!("pi={:?} phi={} U={:?}: {} parents", g.pi().table(), g.phi().to_hex(), u, found.len()));
    Ok((msg, counters))
}

/// The 24-fold coincidence at `2n = 6` for `trials` sampled dimension-2
/// witnesses, plus `controls` dimension-3 witnesses that must have one parent.
pub fn verify_coincidence(trials: u64, controls: u64, seed: u64) -> Result<Vec<VerificationOutcome>> {
    let start = Instant::now();
    let results: Vec<(Option<String>, WorkCounters)> =
        (0..trials).into_par_iter().map(|i| coincidence_trial(seed, i)).collect::<Result<_>>()?;
    let mut counters = WorkCounters::default();
    results.iter().for_each(|(_, c)| counters += *c);
    let bad: Vec<&String> = results.iter().filter_map(|(m, _)| m.as_ref()).collect();
    let main = VerificationOutcome::finish(
        "dim-2 witnesses have exactly 24 parents, matching the formulas",
        format!("24 parents in {trials} trials"),
        format!("{} trials deviate", bad.len()),
        bad.is_empty() && trials > 0,
        bad.first().map(|s| s.to_string()),
        counters,
        Some(seed),
        start,
    );

    let start = Instant::now();
    let mut counters = WorkCounters::default();
    let mut bad = Vec::new();
    for i in 0..controls {
        let (msg, c) = coincidence_control(seed, trials + i)?;
        counters += c;
        bad.extend(msg);
    }
    let control = VerificationOutcome::finish(
        "dim-3 witnesses have exactly 1 parent",
        format!("1 parent in {controls} controls"),
        format!("{} controls deviate", bad.len()),
        bad.is_empty(),
        bad.first().cloned(),
        counters,
        Some(seed),
        start,
    );
    Ok(vec![main, control])
}

/// Sizes found by materializing `near(f)` for every `f in MF_4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NearCensus {
    pub mf: u64,
    pub near_outside_mf: u64,
    pub mf_sp: u64,
    pub per_function_min: u64,
    pub per_function_max: u64,
}

/// Full census at `2n = 4`: brute `near(f)` for all 384 functions, deduped.
pub fn near_mf_census() -> Result<(NearCensus, Vec<VerificationOutcome>)> {
    let start = Instant::now();
    let mf = all_mf(2)?;
    let tables: Vec<TruthTable> = mf.iter().map(|g| g.table()).collect();
    let sets: Vec<Vec<TruthTable>> = tables.par_iter().map(near_brute).collect::<Result<_>>()?;
    let sizes: Vec<u64> = sets.iter().map(|s| s.len() as u64).collect();
    let mf_set: BTreeSet<&TruthTable> = tables.iter().collect();
    let near_all: BTreeSet<&TruthTable> = sets.iter().flatten().collect();
    let outside: BTreeSet<&TruthTable> = near_all.iter().copied().filter(|t| !is_maiorana_mcfarland(t)).collect();
    let union: BTreeSet<&TruthTable> = mf_set.union(&near_all).copied().collect();
    let census = NearCensus {
        mf: mf_set.len() as u64,
        near_outside_mf: outside.len() as u64,
        mf_sp: union.len() as u64,
        per_function_min: sizes.iter().copied().min().unwrap_or(0),
        per_function_max: sizes.iter().copied().max().unwrap_or(0),
    };
    let counters = WorkCounters {
        subspaces_scanned: 140 * tables.len() as u64,
        functions_tested: tables.len() as u64,
    };
    let expect = (
        counting::mf_size(2)?,
        counting::near_mf_size(2)?,
        counting::mfsp_size(2)?,
    );
    let observed = (
        BigUint::from(census.mf),
        BigUint::from(census.near_outside_mf),
        BigUint::from(census.mf_sp),
    );
    let sizes_outcome = VerificationOutcome::finish(
        "|MF_4|, |near(MF_4)|, |MF_4^#SP| by dedup census",
        format!("{} / {} / {}", expect.0, expect.1, expect.2),
        format!("{} / {} / {}", observed.0, observed.1, observed.2),
        expect == observed,
        None,
        counters,
        None,
        start,
    );
    let uniform = census.per_function_min == 60 && census.per_function_max == 60;
    let uniform_outcome = VerificationOutcome::finish(
        "|near(f)| = 60 for every f in MF_4",
        "60",
        format!("min {} max {}", census.per_function_min, census.per_function_max),
        uniform,
        None,
        counters,
        None,
        start,
    );
    Ok((census, vec![sizes_outcome, uniform_outcome]))
}

/// `|M(f)|` from the definition: linear `n`-subspaces with `f` affine on all
/// cosets.
pub fn m_count(f: &TruthTable) -> Result<u64> {
    let m = f.vars();
    if m % 2 == 1 || m > MAX_BRUTE_VARS {
        return Err(OracleError::Range(format!("need even 2n <= {MAX_BRUTE_VARS}, got {m}")));
    }
    let all = linear_subspaces(m, m / 2)?;
    Ok(all.par_iter().filter(|u| affine_on_all_cosets(f, u)).count() as u64)
}

/// Exact mean of `|M(f)|` over all of `MF_4`.
pub fn m_census_full() -> Result<(ExactRational, VerificationOutcome)> {
    let start = Instant::now();
    let mf = all_mf(2)?;
    let total: u64 = mf.iter().map(|g| m_count(&g.table())).sum::<Result<u64>>()?;
    let mean = ExactRational::new(total, mf.len() as u64);
    let expected = counting::expected_m(4)?;
    let counters = WorkCounters {
        subspaces_scanned: 35 * mf.len() as u64,
        functions_tested: mf.len() as u64,
    };
    let outcome = VerificationOutcome::finish(
        "mean |M(f)| over MF_4",
        &expected,
        &mean,
        mean == expected,
        None,
        counters,
        None,
        start,
    );
    Ok((mean, outcome))
}

/// Sample of `|M(f)|` over uniform `f in MF_2n`.
pub fn m_sample(two_n: usize, trials: u64, seed: u64) -> Result<SampleEstimate> {
    if trials == 0 {
        return Err(OracleError::Range("trials must be positive".into()));
    }
    if !(2..=MAX_BRUTE_VARS).contains(&two_n) || two_n % 2 == 1 {
        return Err(OracleError::Range(format!("need even 2n <= {MAX_BRUTE_VARS}, got {two_n}")));
    }
    let n = two_n / 2;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = MMFunction::random(n, &mut trial_rng(seed, i))?;
            Ok(m_count(&g.table())? as f64)
        })
        .collect::<Result<_>>()?;
    Ok(SampleEstimate::from_values(&values, seed))
}

/// Sampled `|M(f)|` against `1 + beta/|MF|` within `3` standard errors.
pub fn verify_m_sample(two_n: usize, trials: u64, seed: u64) -> Result<VerificationOutcome> {
    let start = Instant::now();
    let est = m_sample(two_n, trials, seed)?;
    let target = counting::expected_m(two_n)?.to_f64();
    let z = est.z_score(target);
    let counters = WorkCounters {
        subspaces_scanned: trials * linear_subspaces(two_n, two_n / 2)?.len() as u64,
        functions_tested: trials,
    };
    Ok(VerificationOutcome::finish(
        format!("sampled mean |M(f)|, 2n={two_n}"),
        format!("{target:.6} within 3 SE"),
        format!("{:.6} +- {:.6} (z = {z:.3})", est.mean, est.std_error),
        z.abs() <= 3.0,
        None,
        counters,
        Some(seed),
        start,
    ))
}

/// Sample of `|near(f)|` over uniform `f in MF_2n`, counted by the criterion.
pub fn sample_near_average(two_n: usize, trials: u64, seed: u64) -> Result<SampleEstimate> {
    if trials == 0 {
        return Err(OracleError::Range("trials must be positive".into()));
    }
    if !(2..=12).contains(&two_n) || two_n % 2 == 1 {
        return Err(OracleError::Range(format!("need even 2n <= 12, got {two_n}")));
    }
    let n = two_n / 2;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let g = MMFunction::random(n, &mut trial_rng(seed, i))?;
            Ok(near_count(&g)? as f64)
        })
        .collect::<Result<_>>()?;
    Ok(SampleEstimate::from_values(&values, seed))
}

/// Sampled mean of `|near(f)|` against the exact average, and the `lambda`
/// floor on every sample.
pub fn verify_near_average(two_n: usize, trials: u64, seed: u64) -> Result<VerificationOutcome> {
    let start = Instant::now();
    let est = sample_near_average(two_n, trials, seed)?;
    let target = counting::near_average(two_n / 2)?.to_f64();
    let floor = counting::lambda(two_n)?.to_f64().unwrap_or(f64::INFINITY);
    let z = est.z_score(target);
    Ok(VerificationOutcome::finish(
        format!("sampled mean |near(f)|, 2n={two_n}"),
        format!("{target:.4} within 3 SE, every sample >= {floor}"),
        format!("{:.4} +- {:.4} (z = {z:.3}), min {}", est.mean, est.std_error, est.min),
        z.abs() <= 3.0 && est.min >= floor,
        None,
        WorkCounters {
            subspaces_scanned: 0,
            functions_tested: trials,
        },
        Some(seed),
        start,
    ))
}

/// A function in `MF_2n` that is also affine on every coset of `U`, with
/// `U != X_n`, built from a random `(L, R, H)` with linear `H`.
#[derive(Clone, Debug)]
pub struct TwoCosetFunction {
    pub function: MMFunction,
    pub u: LinearSubspace,
    pub l_dim: usize,
}

pub fn construct_mf_u_member(n: usize, rng: &mut impl Rng) -> Result<TwoCosetFunction> {
    let k = rng.random_range(1..=n);
    let l = linear_subspaces(n, k)?.choose(rng).cloned().expect("nonempty");
    let r = linear_subspaces(n, n - k)?.choose(rng).cloned().expect("nonempty");
    let v = r.orthogonal();
    let info = v.information_set();
    let kmask = low_mask(k);
    let h_rows: Vec<u32> = (0..k).map(|_| rng.random::<u32>() & kmask).collect();
    let h_lin = |y: u32| {
        let c = l.coordinates(y);
        (0..k).filter(|i| c >> i & 1 == 1).fold(0u32, |acc, i| acc ^ h_rows[i])
    };

    let l_cosets: Vec<u32> = AffineSubspace::cosets(&l).map(|c| c.base()).collect();
    let mut v_cosets: Vec<u32> = AffineSubspace::cosets(&v).map(|c| c.base()).collect();
    v_cosets.shuffle(rng);
    let mut table = vec![0u32; 1 << n];
    let mut phi = TruthTable::zero(n)?;
    for (&a, &b) in l_cosets.iter().zip(&v_cosets) {
        let m = random_invertible(k, rng)?;
        let shift = rng.random::<u32>() & kmask;
        let slope = rng.random::<u32>() & kmask;
        let constant: bool = rng.random();
        for u in 0..1u32 << k {
            let y = a ^ l.element(u);
            let image = b ^ v.element(m.apply(u) ^ shift);
            table[y as usize] = image;
        }
        for u in 0..1u32 << k {
            let y = a ^ l.element(u);
            let pi_i = info.project_bits(table[y as usize]);
            phi.set(y, parity(h_lin(y ^ a) & pi_i) ^ parity(u & slope) ^ constant);
        }
    }
    let function = MMFunction::new(Permutation::new(table)?, phi)?;
    let mut gens: Vec<u32> = l.basis().iter().map(|&y| info.embed_bits(h_lin(y)) | y << n).collect();
    gens.extend(r.basis().iter().copied());
    let u = LinearSubspace::span(&gens, 2 * n)?;
    if u.dim() != n {
        return Err(OracleError::Construction(format!("U has dimension {}", u.dim())));
    }
    Ok(TwoCosetFunction { function, u, l_dim: k })
}

/// For `trials` constructed `f in MF_8` with `|M(f)| >= 2`, the brute count of
/// `near(f)` is at least `2^(2n+2) - 2^(n+3) = 896`.
pub fn verify_two_coset_lower(trials: u64, seed: u64) -> Result<VerificationOutcome> {
    let start = Instant::now();
    let n = 4;
    let bound = (1u64 << (2 * n + 2)) - (1u64 << (n + 3));
    let x_n = LinearSubspace::span(&(0..n).map(|i| 1u32 << i).collect::<Vec<_>>(), 2 * n)?;
    let mut counters = WorkCounters::default();
    let mut failures = Vec::new();
    let mut least = u64::MAX;
    for i in 0..trials {
        let mut rng = trial_rng(seed, i);
        let c = construct_mf_u_member(n, &mut rng)?;
        let f = c.function.table();
        let members = is_maiorana_mcfarland(&f) && affine_on_all_cosets(&f, &c.u) && affine_on_all_cosets(&f, &x_n);
        if !members || c.u == x_n {
            return Err(OracleError::Construction(format!(
                "pi={:?} phi={} U={:?} is not in MF and MF_U",
                c.function.pi().table(),
                c.function.phi().to_hex(),
                c.u
            )));
        }
        let (flats, scanned) = near_flats(&f)?;
        counters.subspaces_scanned += scanned;
        counters.functions_tested += 1;
        let count = flats.len() as u64;
        least = least.min(count);
        if count < bound {
            failures.push(format!("f = {}: |near(f)| = {count}", f.to_hex()));
        }
    }
    Ok(VerificationOutcome::finish(
        "|near(f)| >= 2^(2n+2) - 2^(n+3) for f in MF_8 with |M(f)| >= 2",
        format!(">= {bound} in {trials} constructions"),
        format!("minimum {least}"),
        failures.is_empty() && trials > 0,
        failures.first().cloned(),
        counters,
        Some(seed),
        start,
    ))
}

fn meet_x_dim(u: &LinearSubspace, n: usize) -> usize {
    let x = LinearSubspace::span(&(0..n).map(|i| 1u32 << i).collect::<Vec<_>>(), 2 * n).expect("n <= 8");
    u.intersection(&x).dim()
}

/// `|MF_6 n MF_U|` by scanning all `40320 * 256` functions as 64-bit words.
fn mf6_mfu_count(u: &LinearSubspace) -> u64 {
    let cosets: Vec<[u8; 8]> = AffineSubspace::cosets(u)
        .map(|c| {
            let mut pos = [0u8; 8];
            for (j, p) in pos.iter_mut().enumerate() {
                *p = c.point_at(j as u32) as u8;
            }
            pos
        })
        .collect();
    let mut affine = [false; 256];
    for slope in 0u32..8 {
        for constant in [false, true] {
            let pattern = (0..8u32).filter(|&j| parity(j & slope) ^ constant).fold(0usize, |acc, j| acc | 1 << j);
            affine[pattern] = true;
        }
    }
    let phi_words: Vec<u64> = (0u32..256)
        .map(|phi| (0..8).filter(|y| phi >> y & 1 == 1).fold(0u64, |acc, y| acc | 0xFF << (8 * y)))
        .collect();
    all_permutations(3)
        .into_par_iter()
        .map(|p| {
            let a = mf6_words(&p);
            phi_words
                .iter()
                .filter(|&&pw| {
                    let f = a ^ pw;
                    cosets.iter().all(|pos| {
                        let pattern = pos.iter().enumerate().fold(0usize, |acc, (j, &q)| acc | ((f >> q & 1) as usize) << j);
                        affine[pattern]
                    })
                })
                .count() as u64
        })
        .sum()
}

/// `beta(2n)` from intersection counts. At `2n = 4` every `U != X_2` is
/// scanned; at `2n = 6`, `per_stratum` random `U` from each stratum.
pub fn verify_beta(two_n: usize, per_stratum: usize, seed: u64) -> Result<Vec<VerificationOutcome>> {
    let start = Instant::now();
    match two_n {
        4 => {
            let n = 2;
            let mf: Vec<TruthTable> = all_mf(n)?.iter().map(|g| g.table()).collect();
            let subspaces = linear_subspaces(4, 2)?;
            let mut total = BigUint::zero();
            let mut strata = [0u64; 2];
            let mut mismatch = None;
            for u in subspaces.iter() {
                let k = meet_x_dim(u, n);
                if k == n {
                    continue;
                }
                strata[k] += 1;
                let count = mf.iter().filter(|f| affine_on_all_cosets(f, u)).count() as u64;
                let formula = counting::mf_mfu_intersection(n, k)?;
                if formula != count.into() && mismatch.is_none() {
                    mismatch = Some(format!("U={u:?} (k={k}): brute {count}, formula {formula}"));
                }
                total += count;
            }
            let counters = WorkCounters {
                subspaces_scanned: 34 * 4 * mf.len() as u64,
                functions_tested: mf.len() as u64,
            };
            let beta = counting::beta(4)?;
            let expected_strata = [counting::stratum_size(n, 0), counting::stratum_size(n, 1)];
            Ok(vec![
                VerificationOutcome::finish(
                    "beta(4) by brute intersection census",
                    &beta,
                    &total,
                    total == beta && mismatch.is_none(),
                    mismatch,
                    counters,
                    None,
                    start,
                ),
                VerificationOutcome::finish(
                    "strata sizes by dim(U n X_2)",
                    format!("{} / {}", expected_strata[0], expected_strata[1]),
                    format!("{} / {}", strata[0], strata[1]),
                    expected_strata[0] == strata[0].into() && expected_strata[1] == strata[1].into(),
                    None,
                    WorkCounters {
                        subspaces_scanned: 35,
                        functions_tested: 0,
                    },
                    None,
                    start,
                ),
            ])
        }
        6 => {
            let n = 3;
            let subspaces = linear_subspaces(6, 3)?;
            let mut rng = trial_rng(seed, 0);
            let mut chosen = Vec::new();
            for k in 0..n {
                let stratum: Vec<&LinearSubspace> = subspaces.iter().filter(|u| meet_x_dim(u, n) == k).collect();
                chosen.extend(stratum.choose_multiple(&mut rng, per_stratum).map(|u| ((*u).clone(), k)));
            }
            let counts: Vec<u64> = chosen.iter().map(|(u, _)| mf6_mfu_count(u)).collect();
            let mut mismatch = None;
            for ((u, k), &count) in chosen.iter().zip(&counts) {
                let formula = counting::mf_mfu_intersection(n, *k)?;
                if formula != count.into() && mismatch.is_none() {
                    mismatch = Some(format!("U={u:?} (k={k}): brute {count}, formula {formula}"));
                }
            }
            let counters = WorkCounters {
                subspaces_scanned: chosen.len() as u64 * 8,
                functions_tested: chosen.len() as u64 * 40320 * 256,
            };
            let ok = mismatch.is_none() && !chosen.is_empty();
            Ok(vec![VerificationOutcome::finish(
                "|MF_6 n MF_U| matches the stratum formula",
                format!("{} subspaces agree", chosen.len()),
                format!(
                    "{} agree",
                    chosen
                        .iter()
                        .zip(&counts)
                        .filter(|((_, k), &c)| counting::mf_mfu_intersection(n, *k).map(|v| v == c.into()).unwrap_or(false))
                        .count()
                ),
                ok,
                mismatch,
                counters,
                Some(seed),
                start,
            )])
        }
        _ => Err(OracleError::Range(format!("2n must be 4 or 6, got {two_n}"))),
    }
}

/// `|near(f)|` is unchanged by random extended-affine transformations.
pub fn verify_ea_invariance(two_n: usize, trials: u64, seed: u64) -> Result<VerificationOutcome> {
    let start = Instant::now();
    let n = two_n / 2;
    let results: Vec<(Option<String>, u64)> = (0..trials)
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let g = MMFunction::random(n, &mut rng)?;
            let f = g.table();
            let a = random_invertible(two_n, &mut rng)?;
            let shift = rng.random::<u32>() & low_mask(two_n);
            let h = AffineFunction {
                linear: rng.random::<u32>() & low_mask(two_n),
                constant: rng.random(),
            };
            let t = ea_transform(&f, &a, shift, h)?;
            let (before, s1) = near_flats(&f)?;
            let (after, s2) = near_flats(&t)?;
            let msg = (before.len() != after.len())
                .then(|| format!("f = {}: {} vs {} after transform", f.to_hex(), before.len(), after.len()));
            Ok((msg, s1 + s2))
        })
        .collect::<Result<_>>()?;
    let bad: Vec<&String> = results.iter().filter_map(|(m, _)| m.as_ref()).collect();
    Ok(VerificationOutcome::finish(
        format!("|near(f)| invariant under EA transforms, 2n={two_n}"),
        "0 changes",
        format!("{} changes in {trials} transforms", bad.len()),
        bad.is_empty(),
        bad.first().map(|s| s.to_string()),
        WorkCounters {
            subspaces_scanned: results.iter().map(|(_, s)| s).sum(),
            functions_tested: 2 * trials,
        },
        Some(seed),
        start,
    ))
}

/// Parseval's identity on the Walsh spectrum of `f`.
pub fn parseval_holds(f: &TruthTable) -> bool {
    walsh_transform(f).parseval_sum() == 1i64 << (2 * f.vars())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Sums,
    Coincidence,
    Census,
    Beta,
    Near,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "all" => Self::All,
            "sums" => Self::Sums,
            "coincidence" => Self::Coincidence,
            "census" => Self::Census,
            "beta" => Self::Beta,
            "near" => Self::Near,
            _ => return None,
        })
    }
}

/// Runs a named group of verifiers. `trials` scales the sampled checks.
pub fn run_suite(suite: Suite, trials: u64, seed: u64) -> Result<Vec<VerificationOutcome>> {
    let want = |s: Suite| suite == Suite::All || suite == s;
    let mut out = Vec::new();
    if want(Suite::Sums) {
        for n in 2..=3 {
            for k in 0..=n {
                out.push(verify_sum_pi(n, k)?);
            }
        }
        for k in 1..=3 {
            out.push(verify_sum_phi_h(k, &(0..1u32 << k).collect::<Vec<_>>())?);
            let mut p: Vec<u32> = (0..1u32 << k).collect();
            p.shuffle(&mut trial_rng(seed, k as u64));
            out.push(verify_sum_phi_h(k, &p)?);
        }
    }
    if want(Suite::Census) {
        out.extend(near_mf_census()?.1);
        out.push(m_census_full()?.1);
    }
    if want(Suite::Coincidence) {
        out.extend(verify_coincidence(trials, 2, seed)?);
    }
    if want(Suite::Beta) {
        out.extend(verify_beta(4, 0, seed)?);
        out.extend(verify_beta(6, 7, seed)?);
    }
    if want(Suite::Near) {
        out.push(verify_near(4, 0, seed)?);
        out.push(verify_near(6, trials, seed)?);
        out.push(verify_near(8, trials.min(10), seed)?);
        out.push(verify_two_coset_lower(trials.min(10), seed)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submask_walk() {
        assert_eq!(submasks(0b101).collect::<Vec<_>>(), vec![0, 1, 4, 5]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn streams_are_independent_of_order() {
        let a: u64 = trial_rng(7, 3).random();
        let _ = trial_rng(7, 2).random::<u64>();
        assert_eq!(a, trial_rng(7, 3).random::<u64>());
        assert_ne!(a, trial_rng(7, 4).random::<u64>());
    }

    #[test]
    fn sums_small() {
        let o = verify_sum_pi(2, 1).unwrap();
        assert!(o.pass, "{o:?}");
        assert_eq!(o.observed, "144");
        assert_eq!(verify_sum_pi(2, 0).unwrap().observed, "96");
        let o = verify_sum_phi_h(2, &[0, 1, 3, 2]).unwrap();
        assert!(o.pass && o.observed == "512", "{o:?}");
    }

    #[test]
    fn brute_near_at_four() {
        let g = MMFunction::new(Permutation::identity(2).unwrap(), TruthTable::zero(2).unwrap()).unwrap();
        assert_eq!(near_brute(&g.table()).unwrap().len(), 60);
        assert!(near_discrepancy(&g).unwrap().is_none());
    }

    #[test]
    fn failing_outcome_has_witness() {
        let o = VerificationOutcome::finish("x", 1, 2, false, None, WorkCounters::default(), None, Instant::now());
        assert!(o.witness.is_some());
    }

    #[test]
    fn constructed_members() {
        let mut rng = trial_rng(11, 0);
        for _ in 0..20 {
            let c = construct_mf_u_member(3, &mut rng).unwrap();
            let f = c.function.table();
            assert!(affine_on_all_cosets(&f, &c.u));
            assert!(crate::mmf::member_of_mf_u(&c.function, &AffineSubspace::linear(c.u.clone())).unwrap());
        }
    }
}
