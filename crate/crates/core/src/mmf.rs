//! Maiorana-McFarland functions `f(x, y) = <x, pi(y)> + phi(y)` and the bent
//! functions at minimum distance from them.
//!
//! A closest bent function is `f + 1_U` for an `n`-dimensional affine `U` on
//! which `f` is affine. Such a `U` is written as
//! `{([H(y)]_I + z, y) : y in L, z in R}` with `L` on the `y` side, `R` on the
//! `x` side and `I` an information set of `R^perp`. For a witness of `f`,
//! `pi(L)` is affine and `R^perp` is its direction, so the choice reduces to
//! the pair `(L, H)`.

use std::collections::HashSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolfun::{affine_coefficients, affine_on_all_cosets, BoolFunError, TruthTable};
use crate::gf2::{
    affine_hull_bits, affine_subspaces, linear_subspaces, low_mask, parity, rref_in_place, AffineMap, AffineSubspace, Gf2Error, Gf2Matrix,
    IndexSet, LinearSubspace,
};

/// Largest `n` for which `f_{pi, phi}` fits a [`TruthTable`].
pub const MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MmfError {
    #[error("permutation table has length {0}, which is not a power of two")]
    BadLength(usize),
    #[error("table is not a bijection: value {0} is repeated or out of range")]
    NotBijective(u32),
    #[error("n = {0} exceeds the supported maximum of {MAX_N}")]
    TooLarge(usize),
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("expected a subspace of dimension {expected}, got {actual}")]
    WrongDimension { expected: usize, actual: usize },
    #[error("the image of L under pi is not an affine subspace")]
    NotInImageSubspaces,
    #[error("subspace must be linear")]
    NotLinear,
    #[error("witness does not satisfy the criterion: {0}")]
    InvalidWitness(&'static str),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    BoolFun(#[from] BoolFunError),
}

pub type Result<T> = std::result::Result<T, MmfError>;

/// A permutation of `Z_2^n` stored as its value table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    table: Vec<u32>,
}

impl Permutation {
    pub fn new(table: Vec<u32>) -> Result<Self> {
        let len = table.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(MmfError::BadLength(len));
        }
        if len.trailing_zeros() as usize > MAX_N {
            return Err(MmfError::TooLarge(len.trailing_zeros() as usize));
        }
        let mut seen = vec![false; len];
        for &v in &table {
            let slot = seen.get_mut(v as usize).ok_or(MmfError::NotBijective(v))?;
            if std::mem::replace(slot, true) {
                return Err(MmfError::NotBijective(v));
            }
        }
        Ok(Self { table })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n > MAX_N {
            return Err(MmfError::TooLarge(n));
        }
        Ok(Self {
            table: (0..1u32 << n).collect(),
        })
    }

    /// `y -> yA + b` for invertible `A`.
    pub fn affine(a: &Gf2Matrix, b: u32) -> Result<Self> {
        if !a.is_invertible() {
            return Err(Gf2Error::Singular.into());
        }
        let n = a.width();
        Self::new((0..1u32 << n).map(|y| a.apply(y) ^ (b & low_mask(n))).collect())
    }

    /// Uniform random permutation (Fisher-Yates).
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut p = Self::identity(n)?;
        p.table.shuffle(rng);
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.table.len().trailing_zeros() as usize
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, y: u32) -> u32 {
        self.table[y as usize]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.table.len()];
        for (y, &v) in self.table.iter().enumerate() {
            inv[v as usize] = y as u32;
        }
        Permutation { table: inv }
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = MmfError;

    fn try_from(table: Vec<u32>) -> Result<Self> {
        Self::new(table)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.table
    }
}

/// The pair `(pi, phi)` naming `f_{pi, phi}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct MMFunction {
    pi: Permutation,
    phi: TruthTable,
}

impl MMFunction {
    pub fn new(pi: Permutation, phi: TruthTable) -> Result<Self> {
        if phi.vars() != pi.n() {
            return Err(MmfError::SizeMismatch {
                expected: pi.n(),
                actual: phi.vars(),
            });
        }
        Ok(Self { pi, phi })
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self> {
        let pi = Permutation::random(n, rng)?;
        let phi = TruthTable::from_fn(n, |_| rng.random())?;
        Self::new(pi, phi)
    }

    pub fn n(&self) -> usize {
        self.pi.n()
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn phi(&self) -> &TruthTable {
        &self.phi
    }

    pub fn table(&self) -> TruthTable {
        build_mmf(self)
    }
}

/// Truth table of `f_{pi, phi}` on `2n` variables, input `(x, y)` at index
/// `int(x) + 2^n int(y)`.
pub fn build_mmf(g: &MMFunction) -> TruthTable {
    let n = g.n();
    let mask = low_mask(n);
    let pi = g.pi.table();
    TruthTable::from_fn(2 * n, |v| {
        let y = v >> n;
        parity(v & mask & pi[y as usize]) ^ g.phi.get(y)
    })
    .expect("2n <= 16 is checked by Permutation")
}

/// Direction of `pi(L)` if `pi(L)` is an affine subspace.
pub fn image_direction(pi: &Permutation, l: &AffineSubspace) -> Option<LinearSubspace> {
    let k = l.dim();
    let base = l.base();
    let p0 = pi.apply(base);
    let basis = l.direction().basis();
    match k {
        0 => LinearSubspace::zero(pi.n()).ok(),
        1 => LinearSubspace::span(&[pi.apply(base ^ basis[0]) ^ p0], pi.n()).ok(),
        2 => {
            // Four distinct points form a 2-flat iff they sum to zero.
            let (s, t) = (basis[0], basis[1]);
            let (ps, pt) = (pi.apply(base ^ s), pi.apply(base ^ t));
            if p0 ^ ps ^ pt ^ pi.apply(base ^ s ^ t) != 0 {
                return None;
            }
            LinearSubspace::span(&[ps ^ p0, pt ^ p0], pi.n()).ok()
        }
        _ => {
            // The images of the basis steps need not span the image direction,
            // so take the hull of the whole image.
            let images: Vec<u32> = l.points().map(|y| pi.apply(y)).collect();
            affine_hull_bits(&images, pi.n()).map(|h| h.direction().clone())
        }
    }
}

/// `A_k(pi)`: the affine `k`-dimensional `L` with `pi(L)` affine, in canonical order.
pub fn image_subspaces(pi: &Permutation, k: usize) -> Result<Vec<AffineSubspace>> {
    let all = affine_subspaces(pi.n(), k)?;
    if k <= 1 {
        return Ok(all.to_vec());
    }
    Ok(all.iter().filter(|l| image_direction(pi, l).is_some()).cloned().collect())
}

/// Number of elements of `A_k(pi)`.
pub fn image_subspace_count(pi: &Permutation, k: usize) -> Result<usize> {
    let all = affine_subspaces(pi.n(), k)?;
    if k <= 1 {
        return Ok(all.len());
    }
    Ok(all.iter().filter(|l| image_direction(pi, l).is_some()).count())
}

/// The representation `(L, R, H)` of an `n`-dimensional subspace of `Z_2^2n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SubspaceTriple {
    pub l: AffineSubspace,
    pub r: LinearSubspace,
    pub h: AffineMap,
}

impl SubspaceTriple {
    /// `I = iota(R^perp)`.
    pub fn info_set(&self) -> IndexSet {
        self.r.orthogonal().information_set()
    }
}

/// `{([H(y)]_I + z, y) : y in L, z in R}` with `I = iota(R^perp)`.
pub fn compose_subspace(t: &SubspaceTriple) -> Result<AffineSubspace> {
    let n = t.l.ambient();
    if t.r.ambient() != n {
        return Err(MmfError::SizeMismatch {
            expected: n,
            actual: t.r.ambient(),
        });
    }
    if t.l.dim() + t.r.dim() != n {
        return Err(MmfError::WrongDimension {
            expected: n - t.r.dim(),
            actual: t.l.dim(),
        });
    }
    if t.h.input_width() != n || t.h.output_width() != t.l.dim() {
        return Err(MmfError::SizeMismatch {
            expected: t.l.dim(),
            actual: t.h.output_width(),
        });
    }
    Ok(compose_with(&t.l, &t.r, &t.h, &t.info_set()))
}

fn compose_with(l: &AffineSubspace, r: &LinearSubspace, h: &AffineMap, info: &IndexSet) -> AffineSubspace {
    let n = l.ambient();
    let b = l.base();
    let hb = h.apply(b);
    let mut gens: Vec<u32> = l
        .direction()
        .basis()
        .iter()
        .map(|&s| info.embed_bits(h.apply(b ^ s) ^ hb) | s << n)
        .collect();
    gens.extend_from_slice(r.basis());
    let dir = LinearSubspace::span(&gens, 2 * n).expect("widths checked");
    AffineSubspace::new(info.embed_bits(hb) | b << n, dir).expect("widths checked")
}

/// Inverse of [`compose_subspace`].
pub fn decompose_subspace(u: &AffineSubspace) -> Result<SubspaceTriple> {
    let m = u.ambient();
    if m % 2 == 1 {
        return Err(MmfError::SizeMismatch {
            expected: m + 1,
            actual: m,
        });
    }
    let n = m / 2;
    if u.dim() != n {
        return Err(MmfError::WrongDimension {
            expected: n,
            actual: u.dim(),
        });
    }
    let xmask = low_mask(n);
    // Swap halves so elimination pivots on y first; the rows with a y-pivot
    // then carry the reduced basis of L, the rest span R.
    let swap = |v: u32| (v >> n) | (v & xmask) << n;
    let mut rows: Vec<u32> = u.direction().basis().iter().map(|&v| swap(v)).collect();
    let pivots = rref_in_place(&mut rows, m);
    let k = (pivots & xmask).count_ones() as usize;
    let (lrows, rrows) = rows.split_at(k);
    let l_dir = LinearSubspace::span(&lrows.iter().map(|&r| r & xmask).collect::<Vec<_>>(), n)?;
    let r = LinearSubspace::span(&rrows.iter().map(|&r| r >> n).collect::<Vec<_>>(), n)?;

    // A point of U over the reduced base of L.
    let mut y = u.base() >> n;
    let mut x = u.base() & xmask;
    for &row in lrows {
        let p = row & row.wrapping_neg();
        if y & p != 0 {
            y ^= row & xmask;
            x ^= row >> n;
        }
    }
    let l = AffineSubspace::new(y, l_dir)?;
    debug_assert_eq!(l.base(), y);

    let info = r.orthogonal().information_set();
    let extract = Extractor::new(&r, &info);
    let at_base = extract.apply(x);
    let steps: Vec<u32> = lrows.iter().map(|&row| extract.apply(row >> n)).collect();
    let h = AffineMap::on_subspace(&l, at_base, &steps, k)?;
    Ok(SubspaceTriple { l, r, h })
}

/// `x -> [x + z]_I` where `z in R` clears the coordinates outside `I`.
struct Extractor {
    rows: Vec<(u32, u32)>,
    info: IndexSet,
}

impl Extractor {
    fn new(r: &LinearSubspace, info: &IndexSet) -> Self {
        let outside = !info.mask() & low_mask(info.width());
        let mut rows: Vec<u32> = r.basis().to_vec();
        let mut out = Vec::with_capacity(rows.len());
        while let Some(row) = rows.pop() {
            let mut row = row;
            for &(p, q) in &out {
                if row & p != 0 {
                    row ^= q;
                }
            }
            let masked = row & outside;
            if masked == 0 {
                continue;
            }
            let p = masked & masked.wrapping_neg();
            for (_, q) in out.iter_mut() {
                if *q & p != 0 {
                    *q ^= row;
                }
            }
            out.push((p, row));
        }
        Self {
            rows: out,
            info: info.clone(),
        }
    }

    fn apply(&self, mut x: u32) -> u32 {
        for &(p, row) in &self.rows {
            if x & p != 0 {
                x ^= row;
            }
        }
        self.info.project_bits(x)
    }
}

/// Coefficient word of an affine `H: L -> Z_2^k`: bits `0..k` hold `c = H(b)`,
/// bits `k(i+1)..k(i+2)` hold `h_i = H(b + s_i) + c` for the reduced basis `s_i`.
pub type HCoefficients = u128;

fn coefficients_to_map(l: &AffineSubspace, word: HCoefficients) -> AffineMap {
    let k = l.dim();
    let mask = (1u128 << k) - 1;
    let c = (word & mask) as u32;
    let steps: Vec<u32> = (0..k).map(|i| ((word >> (k * (i + 1))) & mask) as u32).collect();
    AffineMap::on_subspace(l, c, &steps, k).expect("dimensions agree")
}

/// Coefficient word of `h` on `l`.
pub fn map_to_coefficients(l: &AffineSubspace, h: &AffineMap) -> HCoefficients {
    let k = l.dim();
    let b = l.base();
    let c = h.apply(b);
    l.direction()
        .basis()
        .iter()
        .enumerate()
        .fold(c as u128, |acc, (i, &s)| acc | ((h.apply(b ^ s) ^ c) as u128) << (k * (i + 1)))
}

/// All affine `H: L -> Z_2^k` with `y -> <H(y), pi_I(y)> + phi(y)` affine on `L`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HSolutionSpace {
    domain: AffineSubspace,
    particular: Option<HCoefficients>,
    kernel: Vec<HCoefficients>,
}

impl HSolutionSpace {
    pub fn domain(&self) -> &AffineSubspace {
        &self.domain
    }

    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    /// Number of solutions, `0` or a power of two.
    pub fn count(&self) -> u64 {
        if self.particular.is_some() {
            1u64 << self.kernel.len()
        } else {
            0
        }
    }

    pub fn particular(&self) -> Option<AffineMap> {
        self.particular.map(|w| coefficients_to_map(&self.domain, w))
    }

    pub fn kernel_basis(&self) -> Vec<AffineMap> {
        self.kernel.iter().map(|&w| coefficients_to_map(&self.domain, w)).collect()
    }

    /// Every solution's coefficient word, ascending.
    pub fn coefficients(&self) -> Vec<HCoefficients> {
        let Some(p) = self.particular else {
            return Vec::new();
        };
        let mut out: Vec<HCoefficients> = (0u64..1 << self.kernel.len())
            .map(|mask| {
                self.kernel
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(p, |acc, (_, &v)| acc ^ v)
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn maps(&self) -> Vec<AffineMap> {
        self.coefficients()
            .into_iter()
            .map(|w| coefficients_to_map(&self.domain, w))
            .collect()
    }
}

/// Values of `pi_I` and `phi` along the parametrization `u -> b + sum u_i s_i` of `L`.
fn restricted_values(g: &MMFunction, l: &AffineSubspace, info: &IndexSet) -> (Vec<u32>, Vec<bool>) {
    (0..1u32 << l.dim())
        .map(|u| {
            let y = l.point_at(u);
            (info.project_bits(g.pi.apply(y)), g.phi.get(y))
        })
        .unzip()
}

/// Solves the affinity constraints as a linear system over the `k(k+1)` coefficients.
fn solve_h_system(k: usize, p: &[u32], ph: &[bool]) -> (Option<HCoefficients>, Vec<HCoefficients>) {
    let unknowns = k * (k + 1);
    let w = |u: u32| -> u128 {
        let pu = p[u as usize] as u128;
        (0..k).filter(|i| u >> i & 1 == 1).fold(pu, |acc, i| acc | pu << (k * (i + 1)))
    };
    let w0 = w(0);
    let mut rows: Vec<(u128, bool)> = Vec::new();
    for u in 1u32..(1 << k) {
        if u.count_ones() < 2 {
            continue;
        }
        let mut coeff = w(u) ^ w0;
        let mut rhs = ph[u as usize] ^ ph[0];
        for i in 0..k {
            if u >> i & 1 == 1 {
                coeff ^= w(1 << i) ^ w0;
                rhs ^= ph[1 << i] ^ ph[0];
            }
        }
        rows.push((coeff, rhs));
    }
    // Gauss-Jordan elimination, pivots taken from the low bit up.
    let mut rank = 0;
    let mut pivot_of_row: Vec<u128> = Vec::new();
    for col in 0..unknowns {
        let bit = 1u128 << col;
        let Some(pos) = (rank..rows.len()).find(|&i| rows[i].0 & bit != 0) else {
            continue;
        };
        rows.swap(rank, pos);
        let prow = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row.0 & bit != 0 {
                row.0 ^= prow.0;
                row.1 ^= prow.1;
            }
        }
        pivot_of_row.push(bit);
        rank += 1;
    }
    if rows[rank..].iter().any(|&(_, rhs)| rhs) {
        return (None, Vec::new());
    }
    let pivots = pivot_of_row.iter().fold(0u128, |a, &b| a | b);
    let particular = rows[..rank]
        .iter()
        .zip(&pivot_of_row)
        .filter(|((_, rhs), _)| *rhs)
        .fold(0u128, |acc, (_, &p)| acc | p);
    let kernel = (0..unknowns)
        .map(|col| 1u128 << col)
        .filter(|&bit| pivots & bit == 0)
        .map(|bit| {
            rows[..rank]
                .iter()
                .zip(&pivot_of_row)
                .filter(|((c, _), _)| c & bit != 0)
                .fold(bit, |acc, (_, &p)| acc | p)
        })
        .collect();
    (Some(particular), kernel)
}

/// The 32 solutions for `dim L = 2`, read off the five free bits
/// `H(a), H(b), H_1(c)` where `pi_I` takes the values `(0,1), (1,0), (1,1)`
/// on `a, b, c`. The remaining bit is `H_2(c) = H_2(a) + H_1(b) + H_1(c) + sum phi`
/// and `H(d) = H(a) + H(b) + H(c)` on the fourth point `d`.
fn dim2_solutions(p: &[u32], ph: &[bool]) -> Vec<HCoefficients> {
    // u-parameter of the point with pi_I value v
    let mut at = [0usize; 4];
    for (u, &v) in p.iter().enumerate() {
        at[v as usize] = u;
    }
    let (a, b, c, d) = (at[2], at[1], at[3], at[0]);
    let phi_sum = ph.iter().fold(false, |acc, &v| acc ^ v) as u32;
    let mut out: Vec<HCoefficients> = (0u32..32)
        .map(|free| {
            let ha = free & 3;
            let hb = free >> 2 & 3;
            let hc1 = free >> 4 & 1;
            let hc2 = (ha >> 1) ^ (hb & 1) ^ hc1 ^ phi_sum;
            let hc = hc1 | hc2 << 1;
            let mut h = [0u32; 4];
            h[a] = ha;
            h[b] = hb;
            h[c] = hc;
            h[d] = ha ^ hb ^ hc;
            let c0 = h[0];
            (c0 | (h[1] ^ c0) << 2 | (h[2] ^ c0) << 4) as u128
        })
        .collect();
    out.sort_unstable();
    out
}

/// Valid `H` for the pair `(g, L)`.
pub fn h_solution_space(g: &MMFunction, l: &AffineSubspace) -> Result<HSolutionSpace> {
    check_domain(g, l)?;
    let v = image_direction(&g.pi, l).ok_or(MmfError::NotInImageSubspaces)?;
    Ok(solution_space_with(g, l, &v.information_set()))
}

fn solution_space_with(g: &MMFunction, l: &AffineSubspace, info: &IndexSet) -> HSolutionSpace {
    let (p, ph) = restricted_values(g, l, info);
    let (particular, kernel) = solve_h_system(l.dim(), &p, &ph);
    HSolutionSpace {
        domain: l.clone(),
        particular,
        kernel,
    }
}

fn check_domain(g: &MMFunction, l: &AffineSubspace) -> Result<()> {
    if l.ambient() != g.n() {
        return Err(MmfError::SizeMismatch {
            expected: g.n(),
            actual: l.ambient(),
        });
    }
    Ok(())
}

/// A closest bent function of `f_{pi, phi}`, named by `(L, H)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct NearBentWitness {
    l: AffineSubspace,
    h: AffineMap,
    coefficients: HCoefficients,
    info_set: IndexSet,
    image_direction: LinearSubspace,
}

impl NearBentWitness {
    /// Builds a witness after checking both conditions of the criterion.
    pub fn new(g: &MMFunction, l: AffineSubspace, h: AffineMap) -> Result<Self> {
        check_domain(g, &l)?;
        let v = image_direction(&g.pi, &l).ok_or(MmfError::NotInImageSubspaces)?;
        let k = l.dim();
        if h.input_width() != g.n() || h.output_width() != k {
            return Err(MmfError::SizeMismatch {
                expected: k,
                actual: h.output_width(),
            });
        }
        let info = v.information_set();
        let coefficients = map_to_coefficients(&l, &h);
        let w = Self::from_parts(l, coefficients, info, v);
        w.check(g)?;
        Ok(w)
    }

    fn from_parts(l: AffineSubspace, coefficients: HCoefficients, info_set: IndexSet, v: LinearSubspace) -> Self {
        Self {
            h: coefficients_to_map(&l, coefficients),
            l,
            coefficients,
            info_set,
            image_direction: v,
        }
    }

    fn check(&self, g: &MMFunction) -> Result<()> {
        let v = image_direction(&g.pi, &self.l).ok_or(MmfError::NotInImageSubspaces)?;
        if v != self.image_direction {
            return Err(MmfError::InvalidWitness("image direction differs from pi(L)"));
        }
        if self.info_set.len() != self.l.dim() || self.info_set.width() != g.n() {
            return Err(MmfError::InvalidWitness("information set has the wrong size"));
        }
        let (p, ph) = restricted_values(g, &self.l, &self.info_set);
        let k = self.l.dim();
        let mask = low_mask(k) as u128;
        let c = (self.coefficients & mask) as u32;
        let table = TruthTable::from_fn(k, |u| {
            let hu = (0..k)
                .filter(|i| u >> i & 1 == 1)
                .fold(c, |acc, i| acc ^ ((self.coefficients >> (k * (i + 1))) & mask) as u32);
            parity(hu & p[u as usize]) ^ ph[u as usize]
        })?;
        let basis: Vec<u32> = (0..k).map(|i| 1 << i).collect();
        if affine_coefficients(&table, 0, &basis).is_none() {
            return Err(MmfError::InvalidWitness("<H(y), pi_I(y)> + phi(y) is not affine on L"));
        }
        Ok(())
    }

    pub fn l(&self) -> &AffineSubspace {
        &self.l
    }

    pub fn h(&self) -> &AffineMap {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn coefficients(&self) -> HCoefficients {
        self.coefficients
    }

    /// `I = iota(<pi(L)>)`, fixed when the witness was created.
    pub fn info_set(&self) -> &IndexSet {
        &self.info_set
    }

    pub fn image_direction(&self) -> &LinearSubspace {
        &self.image_direction
    }

    pub fn r(&self) -> LinearSubspace {
        self.image_direction.orthogonal()
    }

    /// The subspace `U` with realized function `f + 1_U`.
    pub fn subspace(&self) -> AffineSubspace {
        compose_with(&self.l, &self.r(), &self.h, &self.info_set)
    }

    pub fn triple(&self) -> SubspaceTriple {
        SubspaceTriple {
            l: self.l.clone(),
            r: self.r(),
            h: self.h.clone(),
        }
    }
}

fn witnesses_for(g: &MMFunction, l: &AffineSubspace, v: LinearSubspace) -> Vec<NearBentWitness> {
    let info = v.information_set();
    let words = if l.dim() == 2 {
        let (p, ph) = restricted_values(g, l, &info);
        let fast = dim2_solutions(&p, &ph);
        debug_assert_eq!(fast, solution_space_with(g, l, &info).coefficients());
        fast
    } else {
        solution_space_with(g, l, &info).coefficients()
    };
    words
        .into_iter()
        .map(|w| NearBentWitness::from_parts(l.clone(), w, info.clone(), v.clone()))
        .collect()
}

/// Every closest bent function of `g`, ordered by `dim L`, then `L`, then the
/// coefficient word of `H`.
pub fn near_enumerate(g: &MMFunction) -> Result<Vec<NearBentWitness>> {
    let n = g.n();
    let mut out = Vec::new();
    for k in 0..=n {
        for l in affine_subspaces(n, k)?.iter() {
            if let Some(v) = image_direction(&g.pi, l) {
                out.extend(witnesses_for(g, l, v));
            }
        }
    }
    Ok(out)
}

/// `2^(2n+1) - 2^n`.
pub fn lambda_count(n: usize) -> u64 {
    (1u64 << (2 * n + 1)) - (1u64 << n)
}

/// `|near(f_{pi, phi})|` from the criterion without materializing witnesses.
pub fn near_count(g: &MMFunction) -> Result<u64> {
    let n = g.n();
    let mut total = lambda_count(n);
    for k in 2..=n {
        for l in affine_subspaces(n, k)?.iter() {
            let Some(v) = image_direction(&g.pi, l) else {
                continue;
            };
            if k == 2 {
                debug_assert_eq!(solution_space_with(g, l, &v.information_set()).count(), 32);
                total += 32;
            } else {
                total += solution_space_with(g, l, &v.information_set()).count();
            }
        }
    }
    Ok(total)
}

/// `f_{pi, phi} + 1_U` for the witness's `U`.
pub fn realize_near(g: &MMFunction, w: &NearBentWitness) -> Result<TruthTable> {
    check_domain(g, &w.l)?;
    w.check(g)?;
    Ok(realize_unchecked(&g.table(), w))
}

fn realize_unchecked(f: &TruthTable, w: &NearBentWitness) -> TruthTable {
    let mut t = f.clone();
    for p in w.subspace().points() {
        t.flip(p);
    }
    t
}

/// Realizes every witness against one precomputed table.
pub fn realize_all(g: &MMFunction, witnesses: &[NearBentWitness]) -> Vec<TruthTable> {
    let f = g.table();
    witnesses.iter().map(|w| realize_unchecked(&f, w)).collect()
}

/// One `(pi', phi', H')` with `f_{pi', phi'} + 1_{U'} = f_{pi, phi} + 1_U`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Parent {
    pub function: MMFunction,
    pub h: AffineMap,
}

impl Parent {
    pub fn witness(&self) -> Result<NearBentWitness> {
        NearBentWitness::new(&self.function, self.h.domain().cloned().ok_or(MmfError::NotLinear)?, self.h.clone())
    }
}

/// The 24 parents of a witness with `dim L = 2`: `pi'` permutes the values of
/// `pi` on `L` and agrees with `pi` elsewhere. For `y in L`, with
/// `d = pi_I(y) + pi'_I(y)`:
///
/// * `phi'(y) = phi(y) + <H(y), d> + [pi(y) = pi'(y)] + 1`
/// * `H'(y) = H(y)` if `d = 0`, else `H(y) + T` with `T` the nonzero vector orthogonal to `d`.
///
/// The first parent is `(pi, phi, H)` itself.
pub fn coincidence_parents(g: &MMFunction, w: &NearBentWitness) -> Result<Vec<Parent>> {
    if w.dim() != 2 {
        return Err(MmfError::WrongDimension {
            expected: 2,
            actual: w.dim(),
        });
    }
    w.check(g)?;
    let l = &w.l;
    let info = &w.info_set;
    let points: Vec<u32> = (0..4).map(|u| l.point_at(u)).collect();
    let images: Vec<u32> = points.iter().map(|&y| g.pi.apply(y)).collect();
    let mut out = Vec::with_capacity(24);
    for order in (0..4).permutations(4) {
        let mut table = g.pi.table().to_vec();
        let mut phi = g.phi.clone();
        let mut hv = [0u32; 4];
        for (u, &y) in points.iter().enumerate() {
            let new_image = images[order[u]];
            table[y as usize] = new_image;
            let d = info.project_bits(images[u] ^ new_image);
            let h = w.h.apply(y);
            let same = images[u] == new_image;
            phi.set(y, g.phi.get(y) ^ parity(h & d) ^ same ^ true);
            let t = ((d & 1) << 1) | (d >> 1);
            hv[u] = h ^ t;
        }
        let c = hv[0];
        let h = AffineMap::on_subspace(l, c, &[hv[1] ^ c, hv[2] ^ c], 2)?;
        if hv[3] != hv[0] ^ hv[1] ^ hv[2] {
            return Err(MmfError::InvalidWitness("parent map is not affine"));
        }
        out.push(Parent {
            function: MMFunction::new(Permutation::new(table)?, phi)?,
            h,
        });
    }
    Ok(out)
}

/// Whether `f_{pi, phi}` is affine on every coset of the linear `U`, decided
/// through `U = (L, R, H)`: on every coset `a + L`, `pi` must be affine with
/// image direction `R^perp` and `y -> <H(y + a), pi_I(y)> + phi(y)` affine.
pub fn member_of_mf_u(g: &MMFunction, u: &AffineSubspace) -> Result<bool> {
    let n = g.n();
    if u.ambient() != 2 * n {
        return Err(MmfError::SizeMismatch {
            expected: 2 * n,
            actual: u.ambient(),
        });
    }
    if !u.is_linear() {
        return Err(MmfError::NotLinear);
    }
    let t = decompose_subspace(u)?;
    let r_perp = t.r.orthogonal();
    let info = r_perp.information_set();
    let k = t.l.dim();
    let basis = t.l.direction().basis();
    let unit: Vec<u32> = (0..k).map(|i| 1 << i).collect();
    for coset in AffineSubspace::cosets(t.l.direction()) {
        let a = coset.base();
        let p0 = g.pi.apply(a);
        // pi affine on a + L with image direction R^perp
        let steps: Vec<u32> = basis.iter().map(|&s| g.pi.apply(a ^ s) ^ p0).collect();
        let mut y = a;
        let mut predicted = p0;
        for step in 1u32..(1 << k) {
            let i = step.trailing_zeros() as usize;
            y ^= basis[i];
            predicted ^= steps[i];
            if g.pi.apply(y) != predicted {
                return Ok(false);
            }
        }
        if steps.iter().any(|&s| !r_perp.contains(s)) {
            return Ok(false);
        }
        let cond = TruthTable::from_fn(k, |v| {
            let y = coset.point_at(v);
            parity(t.h.apply(y ^ a) & info.project_bits(g.pi.apply(y))) ^ g.phi.get(y)
        })?;
        if affine_coefficients(&cond, 0, &unit).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `M(f)`: the `n`-dimensional linear `U` with `f` affine on every coset of `U`.
pub fn m_subspaces(f: &TruthTable) -> Result<Vec<LinearSubspace>> {
    use rayon::prelude::*;
    let m = f.vars();
    if m % 2 == 1 {
        return Err(BoolFunError::OddVariables(m).into());
    }
    let all = linear_subspaces(m, m / 2)?;
    Ok(all.par_iter().filter(|u| affine_on_all_cosets(f, u)).cloned().collect())
}

/// Distinct truth tables, sorted.
pub fn dedup_tables(tables: impl IntoIterator<Item = TruthTable>) -> Vec<TruthTable> {
    let set: HashSet<TruthTable> = tables.into_iter().collect();
    let mut v: Vec<TruthTable> = set.into_iter().collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{hamming_distance, is_affine_on, is_bent, is_maiorana_mcfarland, split_blocks};
    use crate::gf2::enumerate_subspaces;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_mf(n: usize) -> Vec<MMFunction> {
        let mut out = Vec::new();
        for perm in (0..1u32 << n).permutations(1 << n) {
            let pi = Permutation::new(perm).unwrap();
            for bits in 0u32..1 << (1 << n) {
                let phi = TruthTable::from_fn(n, |y| bits >> y & 1 == 1).unwrap();
                out.push(MMFunction::new(pi.clone(), phi).unwrap());
            }
        }
        out
    }

    /// Brute `near(f)` by scanning all affine `n`-dimensional subspaces.
    fn brute_near(f: &TruthTable) -> Vec<TruthTable> {
        let n = f.vars() / 2;
        let mut out = Vec::new();
        for u in enumerate_subspaces(2 * n, n, true).unwrap() {
            if is_affine_on(f, &u).is_some() {
                let mut g = f.clone();
                for p in u.points() {
                    g.flip(p);
                }
                out.push(g);
            }
        }
        dedup_tables(out)
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 1, 2]).is_err());
        assert_eq!(Permutation::new(vec![0, 1, 1, 2]), Err(MmfError::NotBijective(1)));
        assert_eq!(Permutation::new(vec![0, 1, 2, 7]), Err(MmfError::NotBijective(7)));
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        assert_eq!(p.inverse().table(), &[1, 3, 0, 2]);
        assert!(MMFunction::new(p, TruthTable::zero(3).unwrap()).is_err());
    }

    #[test]
    fn build_examples() {
        let g = MMFunction::new(Permutation::identity(1).unwrap(), TruthTable::zero(1).unwrap()).unwrap();
        let f = build_mmf(&g);
        assert_eq!(f, TruthTable::from_fn(2, |v| v == 3).unwrap());
        assert!(is_bent(&f).unwrap());

        let tables = dedup_tables(all_mf(2).iter().map(build_mmf));
        assert_eq!(tables.len(), 384);
        assert!(tables.iter().all(|t| is_bent(t).unwrap() && is_maiorana_mcfarland(t)));
    }

    #[test]
    fn image_subspaces_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let pi = Permutation::random(n, &mut rng).unwrap();
            assert_eq!(image_subspaces(&pi, 0).unwrap().len(), 1 << n);
            let id = Permutation::identity(n).unwrap();
            for k in 0..=n {
                assert_eq!(image_subspaces(&id, k).unwrap().len(), affine_subspaces(n, k).unwrap().len());
            }
        }
        // general hull test against the 4-point shortcut
        let pi = Permutation::random(4, &mut rng).unwrap();
        for l in affine_subspaces(4, 2).unwrap().iter() {
            let pts: Vec<u32> = l.points().map(|y| pi.apply(y)).collect();
            let hull = crate::gf2::affine_hull_bits(&pts, 4);
            assert_eq!(hull.is_some(), image_direction(&pi, l).is_some());
        }
    }

    #[test]
    fn compose_decompose_round_trip() {
        let x = AffineSubspace::linear(LinearSubspace::span(&[1, 2], 4).unwrap());
        let t = decompose_subspace(&x).unwrap();
        assert_eq!(t.l.dim(), 0);
        assert_eq!(t.r, LinearSubspace::whole(2).unwrap());
        assert_eq!(t.h.output_width(), 0);
        assert_eq!(compose_subspace(&t).unwrap(), x);

        for n in 2..=3 {
            for u in enumerate_subspaces(2 * n, n, true).unwrap() {
                let t = decompose_subspace(&u).unwrap();
                assert_eq!(compose_subspace(&t).unwrap(), u);
                let xn = LinearSubspace::span(&(0..n).map(|i| 1u32 << i).collect::<Vec<_>>(), 2 * n).unwrap();
                let inter = u.direction().intersection(&xn);
                assert_eq!(
                    inter.basis().to_vec(),
                    LinearSubspace::span(t.r.basis(), 2 * n).unwrap().basis().to_vec()
                );
                assert_eq!(decompose_subspace(&compose_subspace(&t).unwrap()).unwrap(), t);
            }
        }
        assert!(decompose_subspace(&AffineSubspace::whole(4).unwrap()).is_err());
    }

    #[test]
    fn decomposition_census() {
        // #{U in S(2n, n) : dim(U n X_n) = k} = 2^((n-k)^2) GB(n,k) GB(n,n-k)
        for n in 2..=3 {
            let mut by_k = vec![0u64; n + 1];
            for u in enumerate_subspaces(2 * n, n, false).unwrap() {
                by_k[decompose_subspace(&u).unwrap().r.dim()] += 1;
            }
            for (k, &count) in by_k.iter().enumerate() {
                let gb = crate::gf2::gaussian_binomial(n, k);
                let expected = (gb.clone() * gb) << ((n - k) * (n - k));
                assert_eq!(num_bigint::BigUint::from(count), expected, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn h_counts_small_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let g = MMFunction::random(4, &mut rng).unwrap();
            for l in image_subspaces(g.pi(), 1).unwrap() {
                assert_eq!(h_solution_space(&g, &l).unwrap().count(), 4);
            }
            for l in image_subspaces(g.pi(), 2).unwrap() {
                assert_eq!(h_solution_space(&g, &l).unwrap().count(), 32);
            }
        }
    }

    /// All affine `H` on `L`, checked one by one.
    fn brute_h_count(g: &MMFunction, l: &AffineSubspace) -> u64 {
        let v = image_direction(g.pi(), l).unwrap();
        let info = v.information_set();
        let k = l.dim();
        let (p, ph) = restricted_values(g, l, &info);
        let unit: Vec<u32> = (0..k).map(|i| 1 << i).collect();
        (0u64..1 << (k * (k + 1)))
            .filter(|&word| {
                let mask = low_mask(k) as u64;
                let c = (word & mask) as u32;
                let t = TruthTable::from_fn(k, |u| {
                    let h = (0..k)
                        .filter(|i| u >> i & 1 == 1)
                        .fold(c, |acc, i| acc ^ ((word >> (k * (i + 1))) & mask) as u32);
                    parity(h & p[u as usize]) ^ ph[u as usize]
                })
                .unwrap();
                affine_coefficients(&t, 0, &unit).is_some()
            })
            .count() as u64
    }

    #[test]
    fn h_count_matches_enumeration_for_full_cube() {
        let pi = Permutation::identity(3).unwrap();
        let l = AffineSubspace::whole(3).unwrap();
        let mut total = 0;
        for bits in 0u32..256 {
            let g = MMFunction::new(pi.clone(), TruthTable::from_fn(3, |y| bits >> y & 1 == 1).unwrap()).unwrap();
            let space = h_solution_space(&g, &l).unwrap();
            assert_eq!(space.count(), brute_h_count(&g, &l));
            assert_eq!(space.maps().len() as u64, space.count());
            total += space.count();
        }
        assert_eq!(total, 1 << 16);
    }

    #[test]
    fn h_count_matches_enumeration_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let g = MMFunction::random(3, &mut rng).unwrap();
            for k in 1..=3 {
                for l in image_subspaces(g.pi(), k).unwrap() {
                    assert_eq!(h_solution_space(&g, &l).unwrap().count(), brute_h_count(&g, &l));
                }
            }
        }
    }

    #[test]
    fn near_enumeration_n2_matches_brute() {
        for g in all_mf(2) {
            let ws = near_enumerate(&g).unwrap();
            assert_eq!(ws.len(), 60);
            assert_eq!(ws.iter().filter(|w| w.dim() <= 1).count() as u64, lambda_count(2));
            assert_eq!(near_count(&g).unwrap(), 60);
            let realized = realize_all(&g, &ws);
            let distinct = dedup_tables(realized.clone());
            assert_eq!(distinct.len(), 60);
            assert_eq!(distinct, brute_near(&g.table()));
        }
    }

    #[test]
    fn near_enumeration_n3_matches_brute() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut gs = vec![MMFunction::new(Permutation::identity(3).unwrap(), TruthTable::zero(3).unwrap()).unwrap()];
        for _ in 0..10 {
            gs.push(MMFunction::random(3, &mut rng).unwrap());
        }
        for g in gs {
            let f = g.table();
            let ws = near_enumerate(&g).unwrap();
            assert_eq!(near_count(&g).unwrap(), ws.len() as u64);
            let realized = dedup_tables(realize_all(&g, &ws));
            assert_eq!(realized.len(), ws.len());
            assert_eq!(realized, brute_near(&f));
            for t in &realized {
                assert!(is_bent(t).unwrap());
                assert_eq!(hamming_distance(t, &f).unwrap(), 8);
            }
        }
    }

    #[test]
    fn low_dimensional_witnesses_stay_in_mf() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = MMFunction::random(3, &mut rng).unwrap();
        let ws = near_enumerate(&g).unwrap();
        for w in &ws {
            let t = realize_near(&g, w).unwrap();
            assert_eq!(is_maiorana_mcfarland(&t), w.dim() <= 1, "dim {}", w.dim());
            if w.dim() <= 1 {
                let (sigma, psi) = split_blocks(&t).unwrap();
                let rebuilt = MMFunction::new(
                    Permutation::new(sigma).unwrap(),
                    TruthTable::from_fn(3, |y| psi[y as usize]).unwrap(),
                )
                .unwrap();
                assert_eq!(rebuilt.table(), t);
            }
        }
    }

    #[test]
    fn lower_bound_for_linear_permutation() {
        let a = Gf2Matrix::from_rows(vec![0b0011, 0b0110, 0b1100, 0b1001 ^ 0b0001], 4).unwrap();
        assert!(a.is_invertible());
        let pi = Permutation::affine(&a, 5).unwrap();
        let g = MMFunction::new(pi.clone(), TruthTable::from_fn(4, |y| y % 3 == 0).unwrap()).unwrap();
        let a2 = image_subspace_count(&pi, 2).unwrap() as u64;
        assert_eq!(a2, 140);
        assert!(near_count(&g).unwrap() >= lambda_count(4) + 32 * a2);
    }

    #[test]
    fn witness_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = MMFunction::random(3, &mut rng).unwrap();
        let w = near_enumerate(&g).unwrap().into_iter().find(|w| w.dim() == 2).unwrap();
        let again = NearBentWitness::new(&g, w.l().clone(), w.h().clone()).unwrap();
        assert_eq!(again, w);
        let l3 = AffineSubspace::whole(3).unwrap();
        if image_direction(g.pi(), &l3).is_none() {
            let h = AffineMap::on_subspace(&l3, 0, &[0, 0, 0], 3).unwrap();
            assert_eq!(NearBentWitness::new(&g, l3, h), Err(MmfError::NotInImageSubspaces));
        }
    }

    #[test]
    fn coincidence_parents_realize_the_same_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 10 {
            let g = MMFunction::random(3, &mut rng).unwrap();
            let ws: Vec<_> = near_enumerate(&g).unwrap().into_iter().filter(|w| w.dim() == 2).collect();
            if ws.is_empty() {
                continue;
            }
            checked += 1;
            let w = &ws[rng.random_range(0..ws.len())];
            let target = realize_near(&g, w).unwrap();
            let parents = coincidence_parents(&g, w).unwrap();
            assert_eq!(parents.len(), 24);
            assert_eq!(parents[0].function, g);
            assert_eq!(&parents[0].h, w.h());
            let distinct: HashSet<_> = parents.iter().map(|p| p.function.pi().clone()).collect();
            assert_eq!(distinct.len(), 24);
            for p in &parents {
                let pw = p.witness().unwrap();
                assert_eq!(realize_near(&p.function, &pw).unwrap(), target);
            }
        }
    }

    #[test]
    fn membership_matches_definition_n2() {
        let us: Vec<AffineSubspace> = enumerate_subspaces(4, 2, false).unwrap().collect();
        assert_eq!(us.len(), 35);
        let xn = AffineSubspace::linear(LinearSubspace::span(&[1, 2], 4).unwrap());
        for g in all_mf(2) {
            let f = g.table();
            assert!(member_of_mf_u(&g, &xn).unwrap());
            for u in &us {
                assert_eq!(member_of_mf_u(&g, u).unwrap(), affine_on_all_cosets(&f, u.direction()));
            }
        }
        let u = us.iter().find(|u| decompose_subspace(u).unwrap().r.dim() == 1).unwrap();
        let members = all_mf(2).iter().filter(|g| member_of_mf_u(g, u).unwrap()).count();
        assert_eq!(members, 128);
    }

    #[test]
    fn membership_matches_definition_n3_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let us: Vec<AffineSubspace> = enumerate_subspaces(6, 3, false).unwrap().collect();
        for _ in 0..200 {
            let g = MMFunction::random(3, &mut rng).unwrap();
            let f = g.table();
            for _ in 0..20 {
                let u = &us[rng.random_range(0..us.len())];
                assert_eq!(member_of_mf_u(&g, u).unwrap(), affine_on_all_cosets(&f, u.direction()));
            }
        }
    }

    #[test]
    fn m_subspaces_examples() {
        let ip = MMFunction::new(Permutation::identity(2).unwrap(), TruthTable::zero(2).unwrap()).unwrap();
        let m = m_subspaces(&ip.table()).unwrap();
        assert!(m.contains(&LinearSubspace::span(&[1, 2], 4).unwrap()));
        assert!(m.contains(&LinearSubspace::span(&[4, 8], 4).unwrap()));
        assert!(m_subspaces(&TruthTable::zero(3).unwrap()).is_err());
        let total: usize = all_mf(2).iter().map(|g| m_subspaces(&g.table()).unwrap().len()).sum();
        assert_eq!(total, 15 * 384);
    }
}
