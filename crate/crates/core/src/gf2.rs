//! Linear algebra over GF(2) on bit-packed vectors.
//!
//! A vector `x = (x_1, ..., x_n)` is stored as the integer `sum x_i 2^(i-1)`, so
//! coordinate `x_1` is the least-significant bit. Every subspace is kept in a
//! canonical form (reduced row echelon basis, reduced base point) so equal sets
//! compare and hash equal.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported ambient dimension.
pub const MAX_WIDTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("width {0} exceeds the supported maximum of {MAX_WIDTH}")]
    WidthTooLarge(usize),
    #[error("value {bits:#x} does not fit in {width} bits")]
    BitsOutOfRange { bits: u32, width: usize },
    #[error("width mismatch: expected {expected}, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },
    #[error("index {index} is outside 1..={width}")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("subspace parameters out of range: n = {n}, k = {k}")]
    BadParameters { n: usize, k: usize },
    #[error("matrix is singular")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Gf2Error>;

#[inline]
pub(crate) fn low_mask(width: usize) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

#[inline]
pub(crate) fn parity(x: u32) -> bool {
    x.count_ones() & 1 == 1
}

fn check_width(width: usize) -> Result<()> {
    if width > MAX_WIDTH {
        Err(Gf2Error::WidthTooLarge(width))
    } else {
        Ok(())
    }
}

/// An element of `Z_2^n`, `n <= 16`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVector {
    bits: u32,
    width: u8,
}

impl BitVector {
    pub fn new(bits: u32, width: usize) -> Result<Self> {
        check_width(width)?;
        if bits & !low_mask(width) != 0 {
            return Err(Gf2Error::BitsOutOfRange { bits, width });
        }
        Ok(Self {
            bits,
            width: width as u8,
        })
    }

    pub fn zero(width: usize) -> Result<Self> {
        Self::new(0, width)
    }

    /// Unit vector `e_i` with 1-based coordinate `i`.
    pub fn unit(i: usize, width: usize) -> Result<Self> {
        if i == 0 || i > width {
            return Err(Gf2Error::IndexOutOfRange { index: i, width });
        }
        Self::new(1 << (i - 1), width)
    }

    /// Builds a vector from coordinates `(x_1, ..., x_n)`.
    pub fn from_coords(coords: &[bool]) -> Result<Self> {
        let bits = coords
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << i));
        Self::new(bits, coords.len())
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn width(self) -> usize {
        self.width as usize
    }

    /// Coordinate `x_i`, 1-based.
    pub fn coord(self, i: usize) -> bool {
        i >= 1 && i <= self.width() && (self.bits >> (i - 1)) & 1 == 1
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn xor(self, other: Self) -> Result<Self> {
        self.same_width(other)?;
        Ok(Self {
            bits: self.bits ^ other.bits,
            width: self.width,
        })
    }

    /// Inner product `<x, y>`.
    pub fn dot(self, other: Self) -> Result<bool> {
        self.same_width(other)?;
        Ok(parity(self.bits & other.bits))
    }

    fn same_width(self, other: Self) -> Result<()> {
        if self.width != other.width {
            return Err(Gf2Error::WidthMismatch {
                expected: self.width(),
                actual: other.width(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Prints coordinates in order `x_1 x_2 ... x_n`.
impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            write!(f, "{}", (self.bits >> i) & 1)?;
        }
        Ok(())
    }
}

/// Dense matrix over GF(2); each row is a packed vector of `width` bits.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Gf2Matrix {
    rows: Vec<u32>,
    width: usize,
}

impl Gf2Matrix {
    pub fn from_rows(rows: Vec<u32>, width: usize) -> Result<Self> {
        check_width(width)?;
        if let Some(&bad) = rows.iter().find(|&&r| r & !low_mask(width) != 0) {
            return Err(Gf2Error::BitsOutOfRange { bits: bad, width });
        }
        Ok(Self { rows, width })
    }

    pub fn from_vectors(rows: &[BitVector]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.width());
        if let Some(bad) = rows.iter().find(|r| r.width() != width) {
            return Err(Gf2Error::WidthMismatch {
                expected: width,
                actual: bad.width(),
            });
        }
        Self::from_rows(rows.iter().map(|r| r.bits()).collect(), width)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_rows((0..n).map(|i| 1 << i).collect(), n)
    }

    pub fn zero(rows: usize, width: usize) -> Result<Self> {
        Self::from_rows(vec![0; rows], width)
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Row-vector product `xA`: XOR of the rows selected by the bits of `x`.
    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        let mut acc = 0;
        let mut bits = x;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            acc ^= self.rows[i];
            bits &= bits - 1;
        }
        acc
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        rref_in_place(&mut rows, self.width).count_ones() as usize
    }

    pub fn is_invertible(&self) -> bool {
        self.rows.len() == self.width && self.rank() == self.width
    }

    /// Product `self * other` (`self` is `r x m`, `other` is `m x c`).
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.width != other.row_count() {
            return Err(Gf2Error::WidthMismatch {
                expected: other.row_count(),
                actual: self.width,
            });
        }
        Gf2Matrix::from_rows(
            self.rows.iter().map(|&r| other.apply(r)).collect(),
            other.width,
        )
    }

    pub fn inverse(&self) -> Result<Gf2Matrix> {
        let n = self.width;
        if self.rows.len() != n {
            return Err(Gf2Error::Singular);
        }
        // Augmented [A | I] packed into one word per row; A occupies the low n bits.
        let mut aug: Vec<u32> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, &r)| r | (1 << (n + i)))
            .collect();
        for col in 0..n {
            let bit = 1 << col;
            let pivot = (col..n).find(|&i| aug[i] & bit != 0).ok_or(Gf2Error::Singular)?;
            aug.swap(col, pivot);
            let prow = aug[col];
            for (i, row) in aug.iter_mut().enumerate() {
                if i != col && *row & bit != 0 {
                    *row ^= prow;
                }
            }
        }
        Gf2Matrix::from_rows(aug.into_iter().map(|r| r >> n).collect(), n)
    }

    /// Reduced row echelon form with zero rows dropped, plus the pivot columns.
    pub fn rref(&self) -> (Gf2Matrix, IndexSet) {
        let mut rows = self.rows.clone();
        let pivots = rref_in_place(&mut rows, self.width);
        (
            Gf2Matrix {
                rows,
                width: self.width,
            },
            IndexSet::from_mask_unchecked(pivots, self.width),
        )
    }
}

/// In-place Gauss-Jordan elimination. Columns are processed from `x_1` upward,
/// so each surviving row's lowest set bit is its pivot and rows come out sorted
/// by pivot. Returns the pivot mask.
pub(crate) fn rref_in_place(rows: &mut Vec<u32>, width: usize) -> u32 {
    let mut rank = 0;
    let mut pivots = 0u32;
    for col in 0..width {
        let bit = 1u32 << col;
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let prow = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && *row & bit != 0 {
                *row ^= prow;
            }
        }
        pivots |= bit;
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

/// Strictly increasing set of coordinate positions.
///
/// Positions are stored 0-based (bit positions); [`IndexSet::one_based`] gives
/// the `{1, ..., n}` form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSet {
    mask: u32,
    width: u8,
}

impl IndexSet {
    pub fn from_one_based(indices: &[usize], width: usize) -> Result<Self> {
        check_width(width)?;
        let mut mask = 0;
        for &i in indices {
            if i == 0 || i > width {
                return Err(Gf2Error::IndexOutOfRange { index: i, width });
            }
            mask |= 1 << (i - 1);
        }
        Ok(Self {
            mask,
            width: width as u8,
        })
    }

    pub fn from_mask(mask: u32, width: usize) -> Result<Self> {
        check_width(width)?;
        if mask & !low_mask(width) != 0 {
            return Err(Gf2Error::BitsOutOfRange { bits: mask, width });
        }
        Ok(Self::from_mask_unchecked(mask, width))
    }

    pub(crate) fn from_mask_unchecked(mask: u32, width: usize) -> Self {
        Self {
            mask,
            width: width as u8,
        }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn one_based(&self) -> Vec<usize> {
        (0..self.width())
            .filter(|&i| self.mask >> i & 1 == 1)
            .map(|i| i + 1)
            .collect()
    }

    pub fn complement(&self) -> IndexSet {
        Self::from_mask_unchecked(!self.mask & low_mask(self.width()), self.width())
    }

    /// `x|_I`: the coordinates of `x` at `I`, packed in increasing order.
    #[inline]
    pub fn project_bits(&self, x: u32) -> u32 {
        let mut out = 0;
        let mut m = self.mask;
        let mut j = 0;
        while m != 0 {
            let i = m.trailing_zeros();
            out |= ((x >> i) & 1) << j;
            j += 1;
            m &= m - 1;
        }
        out
    }

    /// `[y]_I`: places the bits of `y` at positions `I`, zeros elsewhere.
    #[inline]
    pub fn embed_bits(&self, y: u32) -> u32 {
        let mut out = 0;
        let mut m = self.mask;
        let mut j = 0;
        while m != 0 {
            let i = m.trailing_zeros();
            out |= ((y >> j) & 1) << i;
            j += 1;
            m &= m - 1;
        }
        out
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.one_based().iter().join(","))
    }
}

pub fn project(x: BitVector, set: &IndexSet) -> Result<BitVector> {
    if x.width() != set.width() {
        return Err(Gf2Error::WidthMismatch {
            expected: set.width(),
            actual: x.width(),
        });
    }
    BitVector::new(set.project_bits(x.bits()), set.len())
}

pub fn embed(y: BitVector, set: &IndexSet) -> Result<BitVector> {
    if y.width() != set.len() {
        return Err(Gf2Error::WidthMismatch {
            expected: set.len(),
            actual: y.width(),
        });
    }
    BitVector::new(set.embed_bits(y.bits()), set.width())
}

/// Linear subspace of `Z_2^n` held by its reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearSubspace {
    basis: Vec<u32>,
    pivots: u32,
    ambient: u8,
}

impl LinearSubspace {
    pub fn span(generators: &[u32], ambient: usize) -> Result<Self> {
        check_width(ambient)?;
        if let Some(&bad) = generators.iter().find(|&&g| g & !low_mask(ambient) != 0) {
            return Err(Gf2Error::BitsOutOfRange {
                bits: bad,
                width: ambient,
            });
        }
        Ok(Self::span_unchecked(generators.to_vec(), ambient))
    }

    pub(crate) fn span_unchecked(mut rows: Vec<u32>, ambient: usize) -> Self {
        let pivots = rref_in_place(&mut rows, ambient);
        Self {
            basis: rows,
            pivots,
            ambient: ambient as u8,
        }
    }

    pub fn from_matrix(m: &Gf2Matrix) -> Self {
        Self::span_unchecked(m.rows().to_vec(), m.width())
    }

    pub fn zero(ambient: usize) -> Result<Self> {
        Self::span(&[], ambient)
    }

    pub fn whole(ambient: usize) -> Result<Self> {
        check_width(ambient)?;
        Ok(Self::span_unchecked(
            (0..ambient).map(|i| 1 << i).collect(),
            ambient,
        ))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient as usize
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> Gf2Matrix {
        Gf2Matrix {
            rows: self.basis.clone(),
            width: self.ambient(),
        }
    }

    pub fn pivot_mask(&self) -> u32 {
        self.pivots
    }

    /// The deterministic information set: pivot columns of the reduced basis.
    pub fn information_set(&self) -> IndexSet {
        IndexSet::from_mask_unchecked(self.pivots, self.ambient())
    }

    /// Clears the pivot coordinates of `v` by adding basis rows. The result is the
    /// smallest element of `v + L` in coordinate order.
    #[inline]
    pub fn reduce(&self, mut v: u32) -> u32 {
        for &row in &self.basis {
            let p = row & row.wrapping_neg();
            if v & p != 0 {
                v ^= row;
            }
        }
        v
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        self.reduce(v) == 0
    }

    /// Span element with coefficient vector `u` over the basis.
    #[inline]
    pub fn element(&self, u: u32) -> u32 {
        let mut acc = 0;
        let mut bits = u;
        while bits != 0 {
            acc ^= self.basis[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        acc
    }

    /// Coefficients of `v` over the basis. Only meaningful when `v` is in the span.
    #[inline]
    pub fn coordinates(&self, v: u32) -> u32 {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, row)| v & *row & row.wrapping_neg() != 0)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        (0..1u32 << self.dim()).map(move |u| self.element(u))
    }

    /// `L^perp = { y : <x, y> = 0 for all x in L }`.
    pub fn orthogonal(&self) -> LinearSubspace {
        let n = self.ambient();
        let free = !self.pivots & low_mask(n);
        let gens: Vec<u32> = (0..n)
            .filter(|&j| free >> j & 1 == 1)
            .map(|j| {
                let mut v = 1u32 << j;
                for &row in &self.basis {
                    if row >> j & 1 == 1 {
                        v |= row & row.wrapping_neg();
                    }
                }
                v
            })
            .collect();
        Self::span_unchecked(gens, n)
    }

    pub fn intersection(&self, other: &LinearSubspace) -> LinearSubspace {
        // (A ∩ B) = (A^perp + B^perp)^perp
        let mut gens = self.orthogonal().basis;
        gens.extend_from_slice(other.orthogonal().basis());
        Self::span_unchecked(gens, self.ambient()).orthogonal()
    }

    pub fn is_subspace_of(&self, other: &LinearSubspace) -> bool {
        self.basis.iter().all(|&v| other.contains(v))
    }

    fn order_key(&self) -> (u8, usize, &[u32]) {
        (self.ambient, self.basis.len(), &self.basis)
    }
}

impl PartialOrd for LinearSubspace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LinearSubspace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Debug for LinearSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = self
            .basis
            .iter()
            .map(|&r| BitVector::new(r, self.ambient()).map(|v| v.to_string()).unwrap_or_default())
            .join(", ");
        write!(f, "<{rows}>")
    }
}

/// Affine subspace `base + L`, with `base` reduced so its pivot coordinates are zero.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineSubspace {
    base: u32,
    direction: LinearSubspace,
}

impl AffineSubspace {
    pub fn new(base: u32, direction: LinearSubspace) -> Result<Self> {
        let n = direction.ambient();
        if base & !low_mask(n) != 0 {
            return Err(Gf2Error::BitsOutOfRange { bits: base, width: n });
        }
        Ok(Self::new_unchecked(base, direction))
    }

    pub(crate) fn new_unchecked(base: u32, direction: LinearSubspace) -> Self {
        Self {
            base: direction.reduce(base),
            direction,
        }
    }

    pub fn from_parts(base: BitVector, direction: LinearSubspace) -> Result<Self> {
        if base.width() != direction.ambient() {
            return Err(Gf2Error::WidthMismatch {
                expected: direction.ambient(),
                actual: base.width(),
            });
        }
        Self::new(base.bits(), direction)
    }

    pub fn linear(direction: LinearSubspace) -> Self {
        Self::new_unchecked(0, direction)
    }

    pub fn point(v: u32, ambient: usize) -> Result<Self> {
        Self::new(v, LinearSubspace::zero(ambient)?)
    }

    pub fn whole(ambient: usize) -> Result<Self> {
        Ok(Self::linear(LinearSubspace::whole(ambient)?))
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn direction(&self) -> &LinearSubspace {
        &self.direction
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn ambient(&self) -> usize {
        self.direction.ambient()
    }

    pub fn size(&self) -> usize {
        1 << self.dim()
    }

    pub fn is_linear(&self) -> bool {
        self.base == 0
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        self.direction.contains(v ^ self.base)
    }

    /// Point `base + sum u_i b_i`.
    #[inline]
    pub fn point_at(&self, u: u32) -> u32 {
        self.base ^ self.direction.element(u)
    }

    pub fn points(&self) -> impl Iterator<Item = u32> + '_ {
        self.direction.elements().map(move |d| d ^ self.base)
    }

    /// Parameter `u` of a point of the subspace.
    #[inline]
    pub fn parameter_of(&self, v: u32) -> u32 {
        self.direction.coordinates(v ^ self.base)
    }

    pub fn information_set(&self) -> IndexSet {
        self.direction.information_set()
    }

    /// All cosets of the direction space, by increasing reduced representative.
    pub fn cosets(direction: &LinearSubspace) -> impl Iterator<Item = AffineSubspace> + '_ {
        let n = direction.ambient();
        let free = !direction.pivot_mask() & low_mask(n);
        let free_idx = IndexSet::from_mask_unchecked(free, n);
        let count = 1u32 << free.count_ones();
        (0..count).map(move |c| Self {
            base: free_idx.embed_bits(c),
            direction: direction.clone(),
        })
    }

    fn order_key(&self) -> (&LinearSubspace, u32) {
        (&self.direction, self.base)
    }
}

impl PartialOrd for AffineSubspace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AffineSubspace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Debug for AffineSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = BitVector::new(self.base, self.ambient())
            .map(|v| v.to_string())
            .unwrap_or_default();
        write!(f, "{base} + {:?}", self.direction)
    }
}

/// `H(x) = xA + c`, optionally restricted to a domain subspace.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct AffineMap {
    matrix: Gf2Matrix,
    constant: u32,
    domain: Option<AffineSubspace>,
}

impl AffineMap {
    pub fn new(matrix: Gf2Matrix, constant: u32, domain: Option<AffineSubspace>) -> Result<Self> {
        if constant & !low_mask(matrix.width()) != 0 {
            return Err(Gf2Error::BitsOutOfRange {
                bits: constant,
                width: matrix.width(),
            });
        }
        if let Some(d) = &domain {
            if d.ambient() != matrix.row_count() {
                return Err(Gf2Error::WidthMismatch {
                    expected: matrix.row_count(),
                    actual: d.ambient(),
                });
            }
        }
        Ok(Self {
            matrix,
            constant,
            domain,
        })
    }

    /// The unique affine map on `domain` with `H(base) = at_base` and
    /// `H(base + b_i) = at_base + steps[i]` for the reduced basis `b_i`.
    /// The global matrix is supported on the pivot rows of the domain.
    pub fn on_subspace(domain: &AffineSubspace, at_base: u32, steps: &[u32], codomain: usize) -> Result<Self> {
        if steps.len() != domain.dim() {
            return Err(Gf2Error::WidthMismatch {
                expected: domain.dim(),
                actual: steps.len(),
            });
        }
        let mut rows = vec![0u32; domain.ambient()];
        for (&row, &step) in domain.direction().basis().iter().zip(steps) {
            rows[row.trailing_zeros() as usize] = step;
        }
        Self::new(Gf2Matrix::from_rows(rows, codomain)?, at_base, Some(domain.clone()))
    }

    pub fn matrix(&self) -> &Gf2Matrix {
        &self.matrix
    }

    pub fn constant(&self) -> u32 {
        self.constant
    }

    pub fn domain(&self) -> Option<&AffineSubspace> {
        self.domain.as_ref()
    }

    pub fn input_width(&self) -> usize {
        self.matrix.row_count()
    }

    pub fn output_width(&self) -> usize {
        self.matrix.width()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.matrix.apply(x) ^ self.constant
    }

    pub fn eval(&self, x: BitVector) -> Result<BitVector> {
        if x.width() != self.input_width() {
            return Err(Gf2Error::WidthMismatch {
                expected: self.input_width(),
                actual: x.width(),
            });
        }
        BitVector::new(self.apply(x.bits()), self.output_width())
    }
}

/// Number of `k`-dimensional linear subspaces of `Z_2^n`.
pub fn gaussian_binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let two = BigUint::from(2u32);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= two.pow(n as u32) - two.pow(i as u32);
        den *= two.pow(k as u32) - two.pow(i as u32);
    }
    num / den
}

/// Canonical affine subspace equal to the point set, if the set is one.
pub fn affine_hull_or_none(points: &[BitVector]) -> Option<AffineSubspace> {
    let first = *points.first()?;
    let width = first.width();
    if points.iter().any(|p| p.width() != width) {
        return None;
    }
    let raw: Vec<u32> = points.iter().map(|p| p.bits()).collect();
    affine_hull_bits(&raw, width)
}

pub(crate) fn affine_hull_bits(points: &[u32], width: usize) -> Option<AffineSubspace> {
    let mut distinct = points.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.is_empty() || !distinct.len().is_power_of_two() {
        return None;
    }
    let target = distinct.len().trailing_zeros() as usize;
    let base = points[0];
    let mut rows = Vec::with_capacity(target + 1);
    for &p in &distinct {
        let mut d = p ^ base;
        for &r in &rows {
            let r: u32 = r;
            let top = 31 - r.leading_zeros();
            if d >> top & 1 == 1 {
                d ^= r;
            }
        }
        if d != 0 {
            if rows.len() == target {
                return None;
            }
            rows.push(d);
            rows.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let direction = LinearSubspace::span_unchecked(rows, width);
    Some(AffineSubspace::new_unchecked(base, direction))
}

/// Lazily enumerates every `k`-dimensional linear (or affine) subspace of
/// `Z_2^n` exactly once, in canonical form.
pub fn enumerate_subspaces(
    n: usize,
    k: usize,
    affine: bool,
) -> Result<Box<dyn Iterator<Item = AffineSubspace> + Send>> {
    check_width(n)?;
    if k > n {
        return Err(Gf2Error::BadParameters { n, k });
    }
    let linear = enumerate_linear(n, k);
    if !affine {
        return Ok(Box::new(linear.map(AffineSubspace::linear)));
    }
    Ok(Box::new(linear.flat_map(move |dir| {
        let free = IndexSet::from_mask_unchecked(!dir.pivot_mask() & low_mask(n), n);
        (0..1u32 << (n - k)).map(move |c| AffineSubspace {
            base: free.embed_bits(c),
            direction: dir.clone(),
        })
    })))
}

/// All `k`-dimensional linear subspaces, grouped by pivot set in
/// lexicographic order.
pub fn enumerate_linear(n: usize, k: usize) -> impl Iterator<Item = LinearSubspace> + Send {
    (0..n).combinations(k).flat_map(move |pivots| {
        let pivot_mask = pivots.iter().fold(0u32, |m, &p| m | 1 << p);
        // Free entries of row i: non-pivot columns right of its pivot.
        let free: Vec<u32> = pivots
            .iter()
            .map(|&p| !pivot_mask & low_mask(n) & !low_mask(p + 1))
            .collect();
        let total: u32 = free.iter().map(|f| f.count_ones()).sum();
        (0..1u64 << total).map(move |counter| {
            let mut c = counter;
            let rows: Vec<u32> = pivots
                .iter()
                .zip(&free)
                .map(|(&p, &f)| {
                    let idx = IndexSet::from_mask_unchecked(f, n);
                    let w = f.count_ones();
                    let part = (c & ((1u64 << w) - 1)) as u32;
                    c >>= w;
                    (1u32 << p) | idx.embed_bits(part)
                })
                .collect();
            LinearSubspace {
                basis: rows,
                pivots: pivot_mask,
                ambient: n as u8,
            }
        })
    })
}

type LinearCache = Mutex<HashMap<(usize, usize), Arc<Vec<LinearSubspace>>>>;
type AffineCache = Mutex<HashMap<(usize, usize), Arc<Vec<AffineSubspace>>>>;

/// Memoized [`enumerate_linear`] in enumeration order.
pub fn linear_subspaces(n: usize, k: usize) -> Result<Arc<Vec<LinearSubspace>>> {
    static CACHE: OnceLock<LinearCache> = OnceLock::new();
    check_width(n)?;
    if k > n {
        return Err(Gf2Error::BadParameters { n, k });
    }
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(n, k)) {
        return Ok(Arc::clone(hit));
    }
    let list = Arc::new(enumerate_linear(n, k).collect::<Vec<_>>());
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert((n, k), Arc::clone(&list));
    Ok(list)
}

/// Memoized affine subspaces, sorted in canonical order. Intended for small
/// ambient spaces; `n = 8, k = 4` alone holds 3.2 million entries.
pub fn affine_subspaces(n: usize, k: usize) -> Result<Arc<Vec<AffineSubspace>>> {
    static CACHE: OnceLock<AffineCache> = OnceLock::new();
    check_width(n)?;
    if k > n {
        return Err(Gf2Error::BadParameters { n, k });
    }
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(n, k)) {
        return Ok(Arc::clone(hit));
    }
    let mut list: Vec<AffineSubspace> = enumerate_subspaces(n, k, true)?.collect();
    list.sort();
    let list = Arc::new(list);
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert((n, k), Arc::clone(&list));
    Ok(list)
}
