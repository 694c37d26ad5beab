//! Boolean functions as packed truth tables, Walsh-Hadamard analysis and
//! restricted-affinity tests.
//!
//! Bit `x` of a truth table holds `f(x)` where `x` is the packed input vector.
//! For functions on `Z_2^n x Z_2^n` the input `(x, y)` has index
//! `int(x) + 2^n int(y)`, so each fixed `y` selects a contiguous `2^n`-bit block.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{low_mask, parity, AffineSubspace, Gf2Error, Gf2Matrix, LinearSubspace, MAX_WIDTH};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoolFunError {
    #[error("bentness needs an even number of variables, got {0}")]
    OddVariables(usize),
    #[error("variable count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("{0} variables exceeds the supported maximum of {MAX_WIDTH}")]
    TooManyVariables(usize),
    #[error("malformed hex truth table: {0}")]
    Hex(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

pub type Result<T> = std::result::Result<T, BoolFunError>;

/// Truth table of `f: Z_2^m -> Z_2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    vars: u8,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zero(vars: usize) -> Result<Self> {
        if vars > MAX_WIDTH {
            return Err(BoolFunError::TooManyVariables(vars));
        }
        let words = (1usize << vars).div_ceil(64);
        Ok(Self {
            vars: vars as u8,
            words: vec![0; words],
        })
    }

    pub fn from_fn(vars: usize, mut f: impl FnMut(u32) -> bool) -> Result<Self> {
        let mut t = Self::zero(vars)?;
        for x in 0..t.len() as u32 {
            if f(x) {
                t.set(x, true);
            }
        }
        Ok(t)
    }

    /// Builds a table from packed words (bit `i` of word `j` is `f(64j + i)`).
    pub fn from_words(vars: usize, words: Vec<u64>) -> Result<Self> {
        let mut t = Self::zero(vars)?;
        if words.len() != t.words.len() {
            return Err(BoolFunError::SizeMismatch(t.words.len(), words.len()));
        }
        if vars < 6 && words[0] >> (1u32 << vars) != 0 {
            return Err(BoolFunError::Hex("bits beyond the table length".into()));
        }
        t.words = words;
        Ok(t)
    }

    pub fn vars(&self) -> usize {
        self.vars as usize
    }

    pub fn len(&self) -> usize {
        1 << self.vars
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, x: u32) -> bool {
        self.words[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: u32, v: bool) {
        let w = &mut self.words[(x >> 6) as usize];
        let bit = 1u64 << (x & 63);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, x: u32) {
        self.words[(x >> 6) as usize] ^= 1u64 << (x & 63);
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn xor(&self, other: &TruthTable) -> Result<TruthTable> {
        if self.vars != other.vars {
            return Err(BoolFunError::SizeMismatch(self.vars(), other.vars()));
        }
        Ok(TruthTable {
            vars: self.vars,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn complement(&self) -> TruthTable {
        let mut t = self.clone();
        for w in &mut t.words {
            *w = !*w;
        }
        if self.vars < 6 {
            t.words[0] &= (1u64 << self.len()) - 1;
        }
        t
    }

    /// Lowercase hex, most significant digit first; the last digit holds
    /// `f(3) f(2) f(1) f(0)`. Tables with fewer than 4 entries use one digit.
    pub fn to_hex(&self) -> String {
        let digits = (self.len() / 4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (self.words[d / 16] >> ((d % 16) * 4)) & 0xf;
                char::from_digit(nibble as u32, 16).unwrap_or('0')
            })
            .collect()
    }

    pub fn from_hex(vars: usize, hex: &str) -> Result<Self> {
        let mut t = Self::zero(vars)?;
        let digits = (t.len() / 4).max(1);
        let hex = hex.trim();
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        if hex.len() != digits {
            return Err(BoolFunError::Hex(format!(
                "expected {digits} hex digits for {vars} variables, got {}",
                hex.len()
            )));
        }
        for (i, ch) in hex.chars().rev().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| BoolFunError::Hex(format!("invalid digit {ch:?}")))? as u64;
            t.words[i / 16] |= nibble << ((i % 16) * 4);
        }
        if vars < 2 && t.words[0] >> t.len() != 0 {
            return Err(BoolFunError::Hex("digit exceeds the table length".into()));
        }
        Ok(t)
    }

    /// Number of variables for a hex string of the given length.
    pub fn vars_for_hex_len(len: usize) -> Option<usize> {
        if len == 0 || !len.is_power_of_two() {
            return None;
        }
        let v = len.trailing_zeros() as usize + 2;
        (v <= MAX_WIDTH).then_some(v)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}; {})", self.vars, self.to_hex())
    }
}

impl Serialize for TruthTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_hex().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let vars = TruthTable::vars_for_hex_len(s.len())
            .ok_or_else(|| serde::de::Error::custom("hex length must be a power of two"))?;
        TruthTable::from_hex(vars, &s).map_err(serde::de::Error::custom)
    }
}

/// `W_f(u) = sum_x (-1)^(f(x) + <u, x>)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WalshSpectrum {
    values: Vec<i32>,
}

impl WalshSpectrum {
    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn at(&self, u: u32) -> i32 {
        self.values[u as usize]
    }

    pub fn parseval_sum(&self) -> i64 {
        self.values.iter().map(|&w| i64::from(w) * i64::from(w)).sum()
    }
}

pub fn walsh_transform(f: &TruthTable) -> WalshSpectrum {
    let n = f.len();
    let mut v: Vec<i32> = (0..n as u32).map(|x| if f.get(x) { -1 } else { 1 }).collect();
    let mut h = 1;
    while h < n {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    WalshSpectrum { values: v }
}

pub fn is_bent(f: &TruthTable) -> Result<bool> {
    let m = f.vars();
    if m % 2 == 1 {
        return Err(BoolFunError::OddVariables(m));
    }
    let target = 1i32 << (m / 2);
    Ok(walsh_transform(f).values.iter().all(|w| w.abs() == target))
}

pub fn hamming_distance(f: &TruthTable, g: &TruthTable) -> Result<u32> {
    Ok(f.xor(g)?.weight())
}

/// `x -> <linear, x> + constant` on the whole space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct AffineFunction {
    pub linear: u32,
    pub constant: bool,
}

impl AffineFunction {
    pub const ZERO: AffineFunction = AffineFunction {
        linear: 0,
        constant: false,
    };

    #[inline]
    pub fn eval(&self, x: u32) -> bool {
        parity(self.linear & x) ^ self.constant
    }
}

/// An affine function agreeing with `f` on `domain`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineFit {
    pub function: AffineFunction,
    pub domain: AffineSubspace,
}

impl AffineFit {
    pub fn linear_part(&self) -> u32 {
        self.function.linear
    }

    pub fn constant(&self) -> bool {
        self.function.constant
    }
}

/// Fit-then-verify affinity test of `f` restricted to `u`.
///
/// The candidate is read off the base point and the basis neighbours; all
/// `2^dim` points are then checked along a Gray-code walk.
pub fn is_affine_on(f: &TruthTable, u: &AffineSubspace) -> Option<AffineFit> {
    if u.ambient() != f.vars() {
        return None;
    }
    let coeffs = affine_coefficients(f, u.base(), u.direction().basis())?;
    let linear = u
        .direction()
        .basis()
        .iter()
        .enumerate()
        .filter(|(i, _)| coeffs >> i & 1 == 1)
        .fold(0u32, |acc, (_, row)| acc | (row & row.wrapping_neg()));
    Some(AffineFit {
        function: AffineFunction {
            linear,
            constant: f.get(u.base()),
        },
        domain: u.clone(),
    })
}

/// Allocation-free core of [`is_affine_on`]: checks affinity of `f` on
/// `base + span(basis)` and returns the slope of each basis direction.
#[inline]
pub fn affine_coefficients(f: &TruthTable, base: u32, basis: &[u32]) -> Option<u32> {
    let v0 = f.get(base);
    let mut coeffs = 0u32;
    for (i, &b) in basis.iter().enumerate() {
        if f.get(base ^ b) != v0 {
            coeffs |= 1 << i;
        }
    }
    let mut x = base;
    let mut predicted = v0;
    for step in 1u32..(1u32 << basis.len()) {
        let i = step.trailing_zeros() as usize;
        x ^= basis[i];
        predicted ^= coeffs >> i & 1 == 1;
        if f.get(x) != predicted {
            return None;
        }
    }
    Some(coeffs)
}

/// `f + 1_U`.
pub fn xor_indicator(f: &TruthTable, u: &AffineSubspace) -> Result<TruthTable> {
    if u.ambient() != f.vars() {
        return Err(BoolFunError::SizeMismatch(f.vars(), u.ambient()));
    }
    let mut g = f.clone();
    for p in u.points() {
        g.flip(p);
    }
    Ok(g)
}

/// `g(x) = f(xA + a) + h(x)` for invertible `A`.
pub fn ea_transform(f: &TruthTable, a: &Gf2Matrix, shift: u32, h: AffineFunction) -> Result<TruthTable> {
    let m = f.vars();
    if a.row_count() != m || a.width() != m {
        return Err(BoolFunError::SizeMismatch(m, a.width()));
    }
    if !a.is_invertible() {
        return Err(Gf2Error::Singular.into());
    }
    if shift & !low_mask(m) != 0 || h.linear & !low_mask(m) != 0 {
        return Err(Gf2Error::BitsOutOfRange {
            bits: shift | h.linear,
            width: m,
        }
        .into());
    }
    TruthTable::from_fn(m, |x| f.get(a.apply(x) ^ shift) ^ h.eval(x))
}

/// The `(A', a', h')` with `ea_transform(ea_transform(f, A, a, h), A', a', h') == f`.
pub fn ea_inverse(a: &Gf2Matrix, shift: u32, h: AffineFunction) -> Result<(Gf2Matrix, u32, AffineFunction)> {
    // g(x) = f(xA + a) + h(x)  =>  f(z) = g((z + a)A^-1) + h((z + a)A^-1)
    let inv = a.inverse()?;
    let shift_inv = inv.apply(shift);
    // h((z + a)A^-1) = <l, zA^-1> + <l, aA^-1> + c;  <l, zB> = <l B^T, z>
    let m = a.width();
    let linear = (0..m).fold(0u32, |acc, i| {
        if parity(inv.rows()[i] & h.linear) {
            acc | 1 << i
        } else {
            acc
        }
    });
    let constant = parity(h.linear & shift_inv) ^ h.constant;
    Ok((inv, shift_inv, AffineFunction { linear, constant }))
}

/// Splits `f(x, y)` on `Z_2^n x Z_2^n` as `<x, sigma(y)> + psi(y)` when every
/// block `x -> f(x, y)` is affine. Returns `(sigma, psi)` tables indexed by `y`.
pub fn split_blocks(f: &TruthTable) -> Option<(Vec<u32>, Vec<bool>)> {
    let m = f.vars();
    if m % 2 == 1 {
        return None;
    }
    let n = m / 2;
    let size = 1u32 << n;
    let basis: Vec<u32> = (0..n).map(|i| 1u32 << i).collect();
    let mut sigma = Vec::with_capacity(size as usize);
    let mut psi = Vec::with_capacity(size as usize);
    for y in 0..size {
        let base = y << n;
        let slope = affine_coefficients(f, base, &basis)?;
        sigma.push(slope);
        psi.push(f.get(base));
    }
    Some((sigma, psi))
}

/// Membership in the Maiorana-McFarland class, read off the definition.
pub fn is_maiorana_mcfarland(f: &TruthTable) -> bool {
    match split_blocks(f) {
        Some((sigma, _)) => {
            let mut seen = vec![false; sigma.len()];
            sigma.iter().all(|&s| !std::mem::replace(&mut seen[s as usize], true))
        }
        None => false,
    }
}

/// `f` is affine on every coset of `u`.
pub fn affine_on_all_cosets(f: &TruthTable, u: &LinearSubspace) -> bool {
    AffineSubspace::cosets(u).all(|c| affine_coefficients(f, c.base(), u.basis()).is_some())
}
