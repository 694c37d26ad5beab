//! Exact closed-form counts for the Maiorana-McFarland class and its
//! neighbourhood, plus rendering of the published tables.
//!
//! Everything is evaluated with big integers and rationals. Floating point only
//! appears when a value is presented as `log2` or as a binary64 decimal.

use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gf2::gaussian_binomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("parameters out of range: {0}")]
    Range(String),
    #[error("2n must be a positive even number, got {0}")]
    Parity(usize),
    #[error("the bound is stated for 2n >= 10, got {0}")]
    Hypothesis(usize),
    #[error("no table {0}; tables are numbered 1 to 5")]
    NoTable(u8),
}

pub type Result<T> = std::result::Result<T, CountError>;

/// Largest `n` accepted by the formulas (factorials of `2^n` stay manageable).
pub const MAX_FORMULA_N: usize = 12;

/// A reduced rational with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ExactRational(pub BigRational);

impl ExactRational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self(BigRational::new(num.into(), den.into()))
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integer value, if the denominator is 1.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn log2(&self) -> f64 {
        log2_rational(&self.0)
    }

    /// Decimal expansion with round-half-even at `places` digits.
    pub fn to_decimal(&self, places: usize) -> String {
        decimal_half_even(&self.0, places)
    }

    /// The binary64 value nearest to the rational.
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::ops::Add for ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl std::ops::Sub for ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl std::ops::Mul for ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

fn q(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

fn pow2_rat(e: i64) -> BigRational {
    if e >= 0 {
        q(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// `m!`, memoized.
pub fn factorial(m: usize) -> BigUint {
    static MEMO: OnceLock<Mutex<Vec<BigUint>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(vec![BigUint::one()]));
    let mut table = memo.lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= m {
        let next = table.last().cloned().unwrap_or_else(BigUint::one) * BigUint::from(table.len());
        table.push(next);
    }
    table[m].clone()
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_FORMULA_N {
        return Err(CountError::Range(format!("n = {n} must lie in 1..={MAX_FORMULA_N}")));
    }
    Ok(())
}

fn half(two_n: usize) -> Result<usize> {
    if two_n == 0 || two_n % 2 == 1 {
        return Err(CountError::Parity(two_n));
    }
    check_n(two_n / 2)?;
    Ok(two_n / 2)
}

/// `sigma(n, k) = 2^(2(n-k)) GB(n,k)^2 (2^k)! (2^n - 2^k)! / (2^n)!`, the mean of
/// `|A_k(pi)|` over all permutations.
pub fn sigma(n: usize, k: usize) -> Result<ExactRational> {
    check_n(n)?;
    if k > n {
        return Err(CountError::Range(format!("k = {k} exceeds n = {n}")));
    }
    let gb = gaussian_binomial(n, k);
    let num = pow2(2 * (n - k)) * &gb * &gb * factorial(1 << k) * factorial((1 << n) - (1 << k));
    Ok(ExactRational::new(BigInt::from(num), BigInt::from(factorial(1 << n))))
}

/// `2^(2n-3)/3 + 1/12 + 1/(2^(n+2) - 12)`, equal to `sigma(n, 2)` for `n >= 2`.
pub fn sigma2_closed(n: usize) -> Result<ExactRational> {
    if !(2..=MAX_FORMULA_N).contains(&n) {
        return Err(CountError::Range(format!("n = {n} must lie in 2..={MAX_FORMULA_N}")));
    }
    let n = n as i64;
    let v = pow2_rat(2 * n - 3) / q(3)
        + BigRational::new(1.into(), 12.into())
        + BigRational::new(1.into(), (BigInt::one() << (n + 2) as usize) - 12);
    Ok(ExactRational(v))
}

/// `5/224 * 2^n (2^n-1)(2^n-2)(2^n-4) / ((2^n-3)(2^n-5)(2^n-6)(2^n-7))`, equal to
/// `sigma(n, 3)` for `n >= 3`.
pub fn sigma3_closed(n: usize) -> Result<ExactRational> {
    if !(3..=MAX_FORMULA_N).contains(&n) {
        return Err(CountError::Range(format!("n = {n} must lie in 3..={MAX_FORMULA_N}")));
    }
    let t = BigInt::one() << n;
    let num: BigInt = BigInt::from(5) * &t * (&t - 1) * (&t - 2) * (&t - 4);
    let den: BigInt = BigInt::from(224) * (&t - 3) * (&t - 5) * (&t - 6) * (&t - 7);
    Ok(ExactRational::new(num, den))
}

/// `lambda(2n) = 2^(2n+1) - 2^n`.
pub fn lambda(two_n: usize) -> Result<BigUint> {
    let n = half(two_n)?;
    Ok(pow2(2 * n + 1) - pow2(n))
}

/// `2^((k+1)^2 - 2^k)` as a rational (negative exponents from `k = 6` on).
fn weight(k: usize) -> BigRational {
    pow2_rat(((k + 1) * (k + 1)) as i64 - (1i64 << k))
}

fn weighted_sigma(n: usize, k: usize) -> Result<BigRational> {
    Ok(sigma(n, k)?.0 * weight(k))
}

/// Mean of `|near(f)|` over `f in MF_2n`:
/// `lambda(2n) + sum_{k=2}^{n} sigma(n,k) 2^((k+1)^2 - 2^k)`.
pub fn near_average(n: usize) -> Result<ExactRational> {
    check_n(n)?;
    let mut total = q(BigInt::from(lambda(2 * n)?));
    for k in 2..=n {
        total += weighted_sigma(n, k)?;
    }
    Ok(ExactRational(total))
}

/// The simplified form of the mean: `main + top + tail` with
/// `main = 10/3 4^n - 2^n + 8/3 + 8/(2^n - 3)` (the `k <= 2` part),
/// `top = 2^((n+1)^2 - 2^n)` (the `k = n` part) and
/// `tail = sum_{k=3}^{n-1} sigma(n,k) 2^((k+1)^2 - 2^k)`.
///
/// At `n = 2` the `k = 2` and `k = n` terms coincide, so `top` is zero there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AverageParts {
    pub main: ExactRational,
    pub top: ExactRational,
    pub tail: ExactRational,
}

impl AverageParts {
    pub fn total(&self) -> ExactRational {
        self.main.clone() + self.top.clone() + self.tail.clone()
    }
}

pub fn near_average_parts(n: usize) -> Result<AverageParts> {
    if !(2..=MAX_FORMULA_N).contains(&n) {
        return Err(CountError::Range(format!("n = {n} must lie in 2..={MAX_FORMULA_N}")));
    }
    let t = BigInt::one() << n;
    let main = BigRational::new(10.into(), 3.into()) * q(&t * &t) - q(t.clone())
        + BigRational::new(8.into(), 3.into())
        + BigRational::new(8.into(), &t - 3);
    Ok(AverageParts {
        main: ExactRational(main),
        top: ExactRational(if n >= 3 { weight(n) } else { BigRational::zero() }),
        tail: table1_tail(n)?,
    })
}

/// `sum_{k=3}^{n-1} sigma(n,k) 2^((k+1)^2 - 2^k)`.
pub fn table1_tail(n: usize) -> Result<ExactRational> {
    check_n(n)?;
    let mut total = BigRational::zero();
    for k in 3..n {
        total += weighted_sigma(n, k)?;
    }
    Ok(ExactRational(total))
}

/// The tail as a binary64 sum: each term rounded to nearest, added in increasing `k`.
pub fn table1_tail_f64(n: usize) -> Result<f64> {
    check_n(n)?;
    let mut acc = 0.0f64;
    for k in 3..n {
        acc += rational_to_f64(&weighted_sigma(n, k)?);
    }
    Ok(acc)
}

/// `|MF_2n| = 2^(2^n) (2^n)!`.
pub fn mf_size(n: usize) -> Result<BigUint> {
    check_n(n)?;
    Ok(pow2(1 << n) * factorial(1 << n))
}

/// The coefficient `c` with `|near(MF_2n)| = c |MF_2n|`:
/// `4/3 sigma(n,2) + sum_{k=3}^{n} sigma(n,k) 2^((k+1)^2 - 2^k)`, zero for `n = 1`.
pub fn near_mf_coefficient(n: usize) -> Result<ExactRational> {
    check_n(n)?;
    if n == 1 {
        return Ok(ExactRational::from_int(0));
    }
    let mut c = BigRational::new(4.into(), 3.into()) * sigma(n, 2)?.0;
    for k in 3..=n {
        c += weighted_sigma(n, k)?;
    }
    Ok(ExactRational(c))
}

/// The simplified coefficient: `main = 4^n/18 + 1/9 + 1/(3 2^n - 9)`, with
/// `top` and `tail` as in [`AverageParts`].
pub fn near_mf_coefficient_parts(n: usize) -> Result<AverageParts> {
    let avg = near_average_parts(n)?;
    let t = BigInt::one() << n;
    let main = BigRational::new(&t * &t, 18.into())
        + BigRational::new(1.into(), 9.into())
        + BigRational::new(1.into(), BigInt::from(3) * &t - 9);
    Ok(AverageParts {
        main: ExactRational(main),
        top: avg.top,
        tail: avg.tail,
    })
}

fn times_mf(c: &ExactRational, n: usize) -> Result<BigUint> {
    let v = c.0.clone() * q(BigInt::from(mf_size(n)?));
    assert!(v.is_integer(), "coefficient times |MF| must be an integer");
    Ok(v.to_integer().to_biguint().expect("non-negative"))
}

/// `|near(MF_2n)|`: bent functions outside `MF_2n` at distance `2^n` from it.
pub fn near_mf_size(n: usize) -> Result<BigUint> {
    times_mf(&near_mf_coefficient(n)?, n)
}

/// `|MF^#SP_2n| = |near(MF_2n)| + |MF_2n|`.
pub fn mfsp_size(n: usize) -> Result<BigUint> {
    Ok(near_mf_size(n)? + mf_size(n)?)
}

/// `|GL_m(F_2)| = prod_{i<m} (2^m - 2^i)`.
fn gl_order(m: usize) -> BigUint {
    (0..m).fold(BigUint::one(), |acc, i| acc * (pow2(m) - pow2(i)))
}

/// `|MF_2n n MF_U|` for `U` with `dim(U n X_n) = k < n`:
/// `(2^k)! 2^((2n-2k+1) 2^k) prod_{i=0}^{n-k-1} (2^(n-k) - 2^i)^(2^k)`.
pub fn mf_mfu_intersection(n: usize, k: usize) -> Result<BigUint> {
    check_n(n)?;
    if k >= n {
        return Err(CountError::Range(format!("k = {k} must be below n = {n}")));
    }
    let reps = 1usize << k;
    Ok(factorial(reps) * pow2((2 * n - 2 * k + 1) * reps) * gl_order(n - k).pow(reps as u32))
}

/// Number of `U in S(2n, n)` with `dim(U n X_n) = k`: `2^((n-k)^2) GB(n,k)^2`.
pub fn stratum_size(n: usize, k: usize) -> BigUint {
    let gb = gaussian_binomial(n, k);
    pow2((n - k) * (n - k)) * &gb * &gb
}

/// `beta(2n) = sum_{U != X_n} |MF_2n n MF_U|`.
pub fn beta(two_n: usize) -> Result<BigUint> {
    let n = half(two_n)?;
    let mut total = BigUint::zero();
    for k in 0..n {
        total += stratum_size(n, k) * mf_mfu_intersection(n, k)?;
    }
    Ok(total)
}

/// `(2^n - 1)^2 2^(3 2^(n-1) + 1) (2^(n-1))!`, the `k = n - 1` term of `beta`.
pub fn beta_lower(two_n: usize) -> Result<BigUint> {
    let n = half(two_n)?;
    let t = pow2(n) - 1u32;
    Ok(&t * &t * pow2(3 * (1 << (n - 1)) + 1) * factorial(1 << (n - 1)))
}

/// `2^(3 2^(n-1) + 2n + 1) (2^(n-1))!`, an upper bound for `beta` once `n >= 5`.
pub fn beta_upper(two_n: usize) -> Result<BigUint> {
    let n = half(two_n)?;
    Ok(pow2(3 * (1 << (n - 1)) + 2 * n + 1) * factorial(1 << (n - 1)))
}

/// Mean of `|M(f)|` over `f in MF_2n`: `1 + beta(2n)/|MF_2n|`.
pub fn expected_m(two_n: usize) -> Result<ExactRational> {
    let n = half(two_n)?;
    Ok(ExactRational(
        q(1) + BigRational::new(BigInt::from(beta(two_n)?), BigInt::from(mf_size(n)?)),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MfcBounds {
    #[serde(serialize_with = "ser_display")]
    pub lower: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub upper: BigUint,
}

fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `GB(2n,n)(|MF| - beta) <= |MFC_2n| <= GB(2n,n)|MF|`. The lower bound is
/// negative for `2n <= 6` and is returned as is.
pub fn mfc_bounds(two_n: usize) -> Result<MfcBounds> {
    let n = half(two_n)?;
    let gb = BigInt::from(gaussian_binomial(two_n, n));
    let mf = BigInt::from(mf_size(n)?);
    let b = BigInt::from(beta(two_n)?);
    Ok(MfcBounds {
        lower: &gb * (&mf - b),
        upper: (gb * mf).to_biguint().expect("positive"),
    })
}

/// `GB(2n,n)(2^(2^n) (2^n)! - 2^(3 2^(n-1) + 2n + 1) (2^(n-1))!)`, a lower
/// bound for `|MFC_2n|` valid once `beta_upper` bounds `beta` (`n >= 5`).
pub fn mfc_lower_closed(two_n: usize) -> Result<BigInt> {
    let n = half(two_n)?;
    if n < 5 {
        return Err(CountError::Hypothesis(two_n));
    }
    let gb = BigInt::from(gaussian_binomial(two_n, n));
    Ok(gb * (BigInt::from(mf_size(n)?) - BigInt::from(beta_upper(two_n)?)))
}

/// Upper bounds on the number of bent functions at distance `2^n` from `MFC_2n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NearMfcBound {
    /// `N(MF_2n) - lambda(2n)`.
    pub coefficient: ExactRational,
    /// `4/3 4^n + 29`.
    pub coarse_coefficient: ExactRational,
    /// `coefficient * GB(2n,n)|MF_2n|`.
    pub bound: ExactRational,
    /// `coarse_coefficient * GB(2n,n)|MF_2n|`.
    pub coarse_bound: ExactRational,
    /// `(4/3 4^n + 30) GB(2n,n)|MF_2n|`, bounding `|MFC^#SP_2n|`.
    pub mfcsp_bound: ExactRational,
}

pub fn near_mfc_upper(two_n: usize) -> Result<NearMfcBound> {
    let n = half(two_n)?;
    if two_n < 10 {
        return Err(CountError::Hypothesis(two_n));
    }
    let upper = q(BigInt::from(mfc_bounds(two_n)?.upper));
    let coefficient = near_average(n)?.0 - q(BigInt::from(lambda(two_n)?));
    let four_n = q(BigInt::one() << (2 * n));
    let coarse = BigRational::new(4.into(), 3.into()) * &four_n + q(29);
    let sp = BigRational::new(4.into(), 3.into()) * &four_n + q(30);
    Ok(NearMfcBound {
        bound: ExactRational(&coefficient * &upper),
        coarse_bound: ExactRational(&coarse * &upper),
        mfcsp_bound: ExactRational(sp * &upper),
        coefficient: ExactRational(coefficient),
        coarse_coefficient: ExactRational(coarse),
    })
}

/// `log2` of a positive integer from its bit length and top 64 bits.
pub fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return v.to_u64().map_or(f64::NAN, |x| (x as f64).log2());
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().expect("64 bits");
    shift as f64 + (top as f64).log2()
}

pub fn log2_rational(v: &BigRational) -> f64 {
    match (v.numer().to_biguint(), v.denom().to_biguint()) {
        (Some(n), Some(d)) if !n.is_zero() => log2_big(&n) - log2_big(&d),
        _ => f64::NAN,
    }
}

/// Decimal string of `v` rounded half-to-even at `places` digits.
pub fn decimal_half_even(v: &BigRational, places: usize) -> String {
    let negative = v.is_negative();
    let a = v.abs();
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = a.numer() * &scale;
    let (mut int, rem): (BigInt, BigInt) = scaled.div_rem(a.denom());
    let twice: BigInt = &rem * 2u32;
    match twice.cmp(a.denom()) {
        std::cmp::Ordering::Greater => int += 1,
        std::cmp::Ordering::Equal if int.is_odd() => int += 1,
        _ => {}
    }
    let digits = int.to_string();
    let body = if places == 0 {
        digits
    } else {
        let padded = format!("{:0>width$}", digits, width = places + 1);
        let (whole, frac) = padded.split_at(padded.len() - places);
        format!("{whole}.{frac}")
    };
    let is_zero = int.is_zero();
    if negative && !is_zero {
        format!("-{body}")
    } else {
        body
    }
}

/// The binary64 value nearest to `v` (ties to even).
pub fn rational_to_f64(v: &BigRational) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let sign = if v.is_negative() { -1.0 } else { 1.0 };
    let num = v.numer().abs().to_biguint().expect("abs");
    let den = v.denom().to_biguint().expect("positive");
    // Choose e with 2^52 <= num / den / 2^e < 2^53.
    let mut e = num.bits() as i64 - den.bits() as i64 - 53;
    loop {
        let (n2, d2) = if e >= 0 {
            (num.clone(), &den << e as usize)
        } else {
            (&num << (-e) as usize, den.clone())
        };
        let (quo, rem): (BigUint, BigUint) = n2.div_rem(&d2);
        if quo.bits() > 53 {
            e += 1;
            continue;
        }
        if quo.bits() < 53 {
            e -= 1;
            continue;
        }
        let mut m = quo.to_u64().expect("53 bits");
        let twice: BigUint = &rem << 1usize;
        match twice.cmp(&d2) {
            std::cmp::Ordering::Greater => m += 1,
            std::cmp::Ordering::Equal if m & 1 == 1 => m += 1,
            _ => {}
        }
        // Subnormals are far outside the range used here.
        return sign * (m as f64) * 2f64.powi(e as i32);
    }
}

/// One cell of a reproduced table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub table: u8,
    pub two_n: usize,
    pub column: &'static str,
    /// Exact value, absent for cells taken from outside sources.
    pub exact: Option<String>,
    pub log2: Option<f64>,
    /// The cell as printed.
    pub display: String,
}

fn cell(table: u8, two_n: usize, column: &'static str, exact: Option<String>, log2: Option<f64>, display: String) -> CountReport {
    CountReport {
        table,
        two_n,
        column,
        exact,
        log2,
        display,
    }
}

fn log_cell(table: u8, two_n: usize, column: &'static str, v: &BigUint) -> CountReport {
    let l = log2_big(v);
    cell(table, two_n, column, Some(v.to_string()), Some(l), format!("{l:.6}"))
}

/// Decimal rendering that stops early when the expansion terminates.
fn short_decimal(v: &ExactRational, places: usize) -> String {
    if v.is_integer() {
        return v.numer().to_string();
    }
    let full = v.to_decimal(places);
    let trimmed = full.trim_end_matches('0');
    trimmed.trim_end_matches('.').to_string()
}

/// Rows of table `id` in printed order.
pub fn table(id: u8) -> Result<Vec<CountReport>> {
    match id {
        1 => table1(),
        2 => table2(),
        3 => table3(),
        4 => table4(),
        5 => table5(),
        _ => Err(CountError::NoTable(id)),
    }
}

pub fn table_columns(id: u8) -> Result<&'static [&'static str]> {
    Ok(match id {
        1 => &["sigma3_x_2^8", "sigma4_x_2^9", "tail"],
        2 => &["mf", "near_mf", "mfsp", "bent"],
        3 => &["expected_m"],
        4 => &["lower", "upper"],
        5 => &["log2_beta", "log2_beta_bound", "log2_gb_beta", "log2_mf"],
        _ => return Err(CountError::NoTable(id)),
    })
}

fn table1() -> Result<Vec<CountReport>> {
    let mut out = Vec::new();
    for n in 4..=12 {
        let two_n = 2 * n;
        let s3 = ExactRational(sigma(n, 3)?.0 * q(256));
        out.push(cell(1, two_n, "sigma3_x_2^8", Some(s3.to_string()), Some(s3.log2()), s3.to_decimal(6)));
        let s4 = ExactRational(sigma(n, 4)?.0 * q(512));
        let shown = if s4.is_integer() {
            s4.to_string()
        } else {
            s4.to_decimal(16)
        };
        out.push(cell(1, two_n, "sigma4_x_2^9", Some(s4.to_string()), Some(s4.log2()), shown));
        let tail = table1_tail(n)?;
        let shown = format!("{:.16}", table1_tail_f64(n)?);
        out.push(cell(1, two_n, "tail", Some(tail.to_string()), Some(tail.log2()), shown));
    }
    Ok(out)
}

fn table2() -> Result<Vec<CountReport>> {
    let mut out = Vec::new();
    for n in 1..=4 {
        let two_n = 2 * n;
        for (column, v) in [("mf", mf_size(n)?), ("near_mf", near_mf_size(n)?), ("mfsp", mfsp_size(n)?)] {
            let l = if v.is_zero() { None } else { Some(log2_big(&v)) };
            let shown = if n <= 2 {
                v.to_string()
            } else {
                format!("2^{:.3}", l.unwrap_or(f64::NAN))
            };
            out.push(cell(2, two_n, column, Some(v.to_string()), l, shown));
        }
        out.push(cell(2, two_n, "bent", None, None, "external".into()));
    }
    Ok(out)
}

fn table3() -> Result<Vec<CountReport>> {
    let mut out = Vec::new();
    for n in 1..=8 {
        let two_n = 2 * n;
        let e = expected_m(two_n)?;
        let excess = e.clone() - ExactRational::from_int(1);
        let shown = if excess.0 >= q(1) {
            short_decimal(&e, 6)
        } else {
            format!("1 + 2^{:.6}", excess.log2())
        };
        out.push(cell(3, two_n, "expected_m", Some(e.to_string()), Some(excess.log2()), shown));
    }
    Ok(out)
}

fn table4() -> Result<Vec<CountReport>> {
    let mut out = Vec::new();
    for n in 1..=8 {
        let two_n = 2 * n;
        let b = mfc_bounds(two_n)?;
        let lower = match b.lower.to_biguint() {
            Some(v) if b.lower.sign() == Sign::Plus => log_cell(4, two_n, "lower", &v),
            _ => cell(4, two_n, "lower", Some(b.lower.to_string()), None, "< 0".into()),
        };
        out.push(lower);
        out.push(log_cell(4, two_n, "upper", &b.upper));
    }
    Ok(out)
}

fn table5() -> Result<Vec<CountReport>> {
    let mut out = Vec::new();
    for n in 4..=8 {
        let two_n = 2 * n;
        let b = beta(two_n)?;
        out.push(log_cell(5, two_n, "log2_beta", &b));
        out.push(log_cell(5, two_n, "log2_beta_bound", &beta_upper(two_n)?));
        out.push(log_cell(5, two_n, "log2_gb_beta", &(gaussian_binomial(two_n, n) * &b)));
        out.push(log_cell(5, two_n, "log2_mf", &mf_size(n)?));
    }
    Ok(out)
}
