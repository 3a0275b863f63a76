//! p-adic scalars and matrices with tracked precision, p-adic logarithms,
//! and the Lie algebra rank bound extracted from a family of integer
//! matrices of finite order mod p.
//!
//! A scalar carries an exact rational representative together with a
//! relative precision: `prec = Some(N)` asserts the true value agrees with
//! the representative in the first N significant p-adic digits, `None`
//! asserts exact equality. There is no inexact zero in this model: a
//! representative equal to 0 is the exact zero (so residue entries divisible
//! by the full modulus come back exact), and a difference whose known digits
//! all cancel but whose representative is nonzero is reported as
//! `PrecisionExhausted` rather than rounded to zero.
//!
//! Logarithms converge on matrices congruent to the identity mod p, for odd
//! p. For a matrix of finite order t mod p, the log of the t-th power mod
//! p^N lands in a Z_p-Lie algebra; closing the span of such logs under the
//! bracket and measuring its rank gives a lower bound for the dimension of
//! the p-adic analytic group generated by the family.

use crate::ablin::{IntMatrix, ResidueMatrix, SymplecticForm};
use crate::finite_group::FiniteGroup;
use crate::ratmat::{rat, Rat, RatMat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("precision must be at least 1 digit, got {0}")]
    PrecisionNotPositive(i64),
    #[error("all certified digits cancelled; recompute with more precision")]
    PrecisionExhausted,
    #[error("division by exact zero")]
    DivisionByZero,
    #[error("argument is not a principal unit (needs v(x - 1) >= 1)")]
    NotPrincipalUnit,
    #[error("series diverges: argument needs valuation at least 1")]
    ValuationTooSmall,
    #[error("series over an exact input does not terminate; attach a working precision first")]
    ExactInputNeedsPrecision,
    #[error("matrix is not congruent to the identity mod p at entry ({row}, {col})")]
    NotCongruentToIdentity { row: usize, col: usize },
    #[error("matrix entry ({row}, {col}) needs valuation at least 1")]
    EntryValuationTooSmall { row: usize, col: usize },
    #[error("operands belong to different primes")]
    PrimeMismatch,
    #[error("operands have mismatched shapes")]
    ShapeMismatch,
    #[error("residue modulus is {got}, expected {expected}")]
    ModulusMismatch { expected: u64, got: u64 },
    #[error("p^digits overflows for p = {p}, digits = {digits}")]
    ModulusTooLarge { p: u64, digits: i64 },
    #[error("no power of the generator is the identity mod p within {cap} steps")]
    OrderNotFound { cap: u64 },
    #[error("ran out of digits at working precision {digits}; rerun with a larger precision")]
    InsufficientPrecision { digits: i64 },
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub(crate) fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// v_p of a nonzero integer.
pub(crate) fn val_p_int(x: &BigInt, p: u64) -> i64 {
    debug_assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut v = 0;
    let mut x = x.abs();
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        x = q;
    }
}

/// v_p of a nonzero rational.
pub(crate) fn val_p_rat(x: &BigRational, p: u64) -> i64 {
    val_p_int(x.numer(), p) - val_p_int(x.denom(), p)
}

/// Largest k with p^k <= m.
fn ilog_p(m: u64, p: u64) -> i64 {
    let mut k = 0;
    let mut q = m;
    while q >= p {
        q /= p;
        k += 1;
    }
    k
}

/// Number of leading series terms that must be kept so that every dropped
/// term u^m/m (or u^m/m! when `factorial`) has valuation >= a, given
/// v(u) = v >= 1. Uses v_p(m) <= log_p m and v_p(m!) <= (m-1)/(p-1).
fn series_horizon(v: i64, a: i64, p: u64, factorial: bool) -> u64 {
    debug_assert!(v >= 1);
    let m_max = 2 * a.max(1) as u64 + p + 10;
    let mut last_bad = 0;
    for m in 1..=m_max {
        let drop = if factorial {
            (m as i64 - 1) / (p as i64 - 1)
        } else {
            ilog_p(m, p)
        };
        if m as i64 * v - drop < a {
            last_bad = m;
        }
    }
    last_bad
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// Element of Q_p known to a given relative precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicScalar {
    p: u64,
    value: BigRational,
    prec: Option<i64>,
}

impl PadicScalar {
    fn raw(p: u64, value: BigRational, prec: Option<i64>) -> Self {
        let prec = if value.is_zero() { None } else { prec };
        PadicScalar { p, value, prec }
    }

    fn check_prime(p: u64) -> Result<(), PadicError> {
        if is_odd_prime(p) {
            Ok(())
        } else {
            Err(PadicError::NotOddPrime(p))
        }
    }

    pub fn exact(p: u64, value: BigRational) -> Result<Self, PadicError> {
        Self::check_prime(p)?;
        Ok(Self::raw(p, value, None))
    }

    pub fn exact_int(p: u64, k: i64) -> Result<Self, PadicError> {
        Self::exact(p, BigRational::from_integer(BigInt::from(k)))
    }

    pub fn exact_ratio(p: u64, num: i64, den: i64) -> Result<Self, PadicError> {
        Self::exact(p, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero(p: u64) -> Result<Self, PadicError> {
        Self::exact_int(p, 0)
    }

    pub fn one(p: u64) -> Result<Self, PadicError> {
        Self::exact_int(p, 1)
    }

    /// Value known to `digits` significant p-adic digits. A zero value is the
    /// exact zero.
    pub fn with_precision(p: u64, value: BigRational, digits: i64) -> Result<Self, PadicError> {
        Self::check_prime(p)?;
        if digits < 1 {
            return Err(PadicError::PrecisionNotPositive(digits));
        }
        Ok(Self::raw(p, value, Some(digits)))
    }

    pub fn with_precision_int(p: u64, k: i64, digits: i64) -> Result<Self, PadicError> {
        Self::with_precision(p, BigRational::from_integer(BigInt::from(k)), digits)
    }

    /// Value known mod p^abs_digits, i.e. to absolute precision abs_digits.
    pub fn with_absolute_precision(
        p: u64,
        value: BigRational,
        abs_digits: i64,
    ) -> Result<Self, PadicError> {
        Self::check_prime(p)?;
        if value.is_zero() {
            return Ok(Self::raw(p, value, None));
        }
        let rel = abs_digits - val_p_rat(&value, p);
        if rel < 1 {
            return Err(PadicError::PrecisionExhausted);
        }
        Ok(Self::raw(p, value, Some(rel)))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn rational(&self) -> &BigRational {
        &self.value
    }

    /// Relative precision in digits; None means exact.
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    /// None for the exact zero (infinite valuation).
    pub fn valuation(&self) -> Option<i64> {
        if self.value.is_zero() {
            None
        } else {
            Some(val_p_rat(&self.value, self.p))
        }
    }

    /// The power of p below which digits are unknown; None means all digits
    /// are known.
    pub fn absolute_precision(&self) -> Option<i64> {
        match (self.valuation(), self.prec) {
            (Some(v), Some(n)) => Some(v + n),
            _ => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    fn same_prime(&self, other: &Self) -> Result<(), PadicError> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(PadicError::PrimeMismatch)
        }
    }

    pub fn neg(&self) -> Self {
        Self::raw(self.p, -self.value.clone(), self.prec)
    }

    pub fn add(&self, other: &Self) -> Result<Self, PadicError> {
        self.same_prime(other)?;
        let sum = &self.value + &other.value;
        let abs = min_opt(self.absolute_precision(), other.absolute_precision());
        if sum.is_zero() {
            // The representatives cancel exactly.
            return Ok(Self::raw(self.p, sum, None));
        }
        match abs {
            None => Ok(Self::raw(self.p, sum, None)),
            Some(a) => {
                let v = val_p_rat(&sum, self.p);
                if a - v < 1 {
                    // Nonzero residue entirely below the certified digits.
                    Err(PadicError::PrecisionExhausted)
                } else {
                    Ok(Self::raw(self.p, sum, Some(a - v)))
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PadicError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PadicError> {
        self.same_prime(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(self.p);
        }
        let prec = min_opt(self.prec, other.prec);
        Ok(Self::raw(self.p, &self.value * &other.value, prec))
    }

    pub fn div(&self, other: &Self) -> Result<Self, PadicError> {
        self.same_prime(other)?;
        if other.is_exact_zero() {
            return Err(PadicError::DivisionByZero);
        }
        if self.is_exact_zero() {
            return Self::zero(self.p);
        }
        let prec = min_opt(self.prec, other.prec);
        Ok(Self::raw(self.p, &self.value / &other.value, prec))
    }

    /// True when the two scalars agree on every digit both sides certify.
    pub fn congruent(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        let diff = &self.value - &other.value;
        if diff.is_zero() {
            return true;
        }
        match min_opt(self.absolute_precision(), other.absolute_precision()) {
            None => false,
            Some(f) => val_p_rat(&diff, self.p) >= f,
        }
    }

    /// True when the representatives agree mod p^abs_digits.
    pub fn congruent_mod(&self, other: &Self, abs_digits: i64) -> bool {
        if self.p != other.p {
            return false;
        }
        let diff = &self.value - &other.value;
        diff.is_zero() || val_p_rat(&diff, self.p) >= abs_digits
    }

    /// The unit part of the representative reduced mod p^digits. The
    /// denominator is a unit, so this is an ordinary modular division.
    pub fn unit_mod(&self, digits: i64) -> Option<BigInt> {
        let v = self.valuation()?;
        let pv = BigRational::from_integer(BigInt::from(self.p)).pow(v as i32);
        let u = &self.value / pv;
        let m = BigInt::from(self.p).pow(digits.max(1) as u32);
        Some(u.numer().mod_floor(&m) * mod_inverse(u.denom(), &m) % &m)
    }

    pub fn to_wire(&self) -> PadicScalarWire {
        match (self.valuation(), self.prec) {
            (None, _) => PadicScalarWire {
                p: self.p.to_string(),
                valuation: "inf".into(),
                unit: "0".into(),
                digits: "exact".into(),
            },
            (Some(v), None) => {
                let pv = BigRational::from_integer(BigInt::from(self.p)).pow(v as i32);
                PadicScalarWire {
                    p: self.p.to_string(),
                    valuation: v.to_string(),
                    unit: (&self.value / pv).to_string(),
                    digits: "exact".into(),
                }
            }
            (Some(v), Some(n)) => PadicScalarWire {
                p: self.p.to_string(),
                valuation: v.to_string(),
                unit: self.unit_mod(n).unwrap().to_string(),
                digits: n.to_string(),
            },
        }
    }

    pub fn from_wire(w: &PadicScalarWire) -> Result<Self, PadicError> {
        let bad = |m: &str| PadicError::Malformed(m.into());
        let p: u64 = w.p.parse().map_err(|_| bad("prime"))?;
        if w.valuation == "inf" {
            return Self::zero(p);
        }
        let v: i64 = w.valuation.parse().map_err(|_| bad("valuation"))?;
        let unit: BigRational = w.unit.parse().map_err(|_| bad("unit"))?;
        let pv = BigRational::from_integer(BigInt::from(p)).pow(v as i32);
        let value = unit * pv;
        if w.digits == "exact" {
            Self::exact(p, value)
        } else {
            let n: i64 = w.digits.parse().map_err(|_| bad("digits"))?;
            Self::with_precision(p, value, n)
        }
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.absolute_precision() {
            None => write!(f, "{}", self.value),
            Some(a) => write!(f, "{} + O({}^{})", self.value, self.p, a),
        }
    }
}

/// Wire form of a scalar: unit times p^valuation, with the digit count or
/// "exact". The zero scalar has valuation "inf".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicScalarWire {
    pub p: String,
    pub valuation: String,
    pub unit: String,
    pub digits: String,
}

/// Logarithm of a principal unit by the alternating series
/// u - u^2/2 + u^3/3 - ..., u = x - 1. Requires v(u) >= 1 and a finite
/// working precision (the series over an exact non-trivial argument never
/// terminates). The result carries the same absolute precision as x.
pub fn padic_log(x: &PadicScalar) -> Result<PadicScalar, PadicError> {
    let p = x.prime();
    let u = x.sub(&PadicScalar::one(p)?)?;
    if u.is_exact_zero() {
        return PadicScalar::zero(p);
    }
    if u.valuation().unwrap() < 1 {
        return Err(PadicError::NotPrincipalUnit);
    }
    let a = match u.absolute_precision() {
        Some(a) => a,
        None => return Err(PadicError::ExactInputNeedsPrecision),
    };
    let horizon = series_horizon(u.valuation().unwrap(), a, p, false);
    let mut sum = PadicScalar::zero(p)?;
    let mut power = u.clone();
    for n in 1..=horizon {
        let term = power.div(&PadicScalar::exact_int(p, n as i64)?)?;
        sum = if n % 2 == 1 { sum.add(&term)? } else { sum.sub(&term)? };
        if n < horizon {
            power = power.mul(&u)?;
        }
    }
    Ok(sum)
}

/// Exponential by the series sum x^n / n!, for v(x) >= 1 and odd p. Inverse
/// to `padic_log` on principal units, digit for digit.
pub fn padic_exp(x: &PadicScalar) -> Result<PadicScalar, PadicError> {
    let p = x.prime();
    if x.is_exact_zero() {
        return PadicScalar::one(p);
    }
    let v = x.valuation().unwrap();
    if v < 1 {
        return Err(PadicError::ValuationTooSmall);
    }
    let a = match x.absolute_precision() {
        Some(a) => a,
        None => return Err(PadicError::ExactInputNeedsPrecision),
    };
    let horizon = series_horizon(v, a, p, true);
    let mut sum = PadicScalar::one(p)?;
    let mut term = PadicScalar::one(p)?;
    for n in 1..=horizon {
        term = term.mul(x)?.div(&PadicScalar::exact_int(p, n as i64)?)?;
        sum = sum.add(&term)?;
    }
    Ok(sum)
}

/// Square matrix of scalars sharing one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicMatrix {
    p: u64,
    n: usize,
    data: Vec<PadicScalar>,
}

impl PadicMatrix {
    pub fn identity(p: u64, n: usize) -> Result<Self, PadicError> {
        let zero = PadicScalar::zero(p)?;
        let one = PadicScalar::one(p)?;
        let mut m = PadicMatrix { p, n, data: vec![zero; n * n] };
        for i in 0..n {
            m.data[i * n + i] = one.clone();
        }
        Ok(m)
    }

    pub fn from_int_matrix(p: u64, m: &IntMatrix) -> Result<Self, PadicError> {
        let n = m.size();
        let mut out = PadicMatrix::identity(p, n)?;
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = PadicScalar::exact_int(p, m.at(i, j))?;
            }
        }
        Ok(out)
    }

    /// Entries of a residue matrix mod p^digits, each carried to absolute
    /// precision `digits`.
    pub fn from_residue(r: &ResidueMatrix, p: u64, digits: i64) -> Result<Self, PadicError> {
        if digits < 1 {
            return Err(PadicError::PrecisionNotPositive(digits));
        }
        let expected = p
            .checked_pow(digits as u32)
            .ok_or(PadicError::ModulusTooLarge { p, digits })?;
        if r.modulus() != expected {
            return Err(PadicError::ModulusMismatch { expected, got: r.modulus() });
        }
        let n = r.size();
        let mut out = PadicMatrix::identity(p, n)?;
        for i in 0..n {
            for j in 0..n {
                let value = BigRational::from_integer(BigInt::from(r.at(i, j)));
                out.data[i * n + j] = PadicScalar::with_absolute_precision(p, value, digits)?;
            }
        }
        Ok(out)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &PadicScalar {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PadicScalar) {
        self.data[i * self.n + j] = v;
    }

    fn same_shape(&self, other: &Self) -> Result<(), PadicError> {
        if self.p != other.p {
            return Err(PadicError::PrimeMismatch);
        }
        if self.n != other.n {
            return Err(PadicError::ShapeMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PadicError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = a.add(b)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PadicError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = a.sub(b)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PadicError> {
        self.same_shape(other)?;
        let n = self.n;
        let mut out = PadicMatrix { p: self.p, n, data: vec![PadicScalar::zero(self.p)?; n * n] };
        for i in 0..n {
            for j in 0..n {
                let mut s = PadicScalar::zero(self.p)?;
                for k in 0..n {
                    s = s.add(&self.at(i, k).mul(other.at(k, j))?)?;
                }
                out.data[i * n + j] = s;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &PadicScalar) -> Result<Self, PadicError> {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.mul(c)?;
        }
        Ok(out)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_exact_zero())
    }

    /// Minimum valuation over the nonzero entries; None when all entries are
    /// exact zeros.
    pub fn min_valuation(&self) -> Option<i64> {
        self.data.iter().filter_map(|e| e.valuation()).min()
    }

    /// Minimum absolute precision over the entries; None when every entry is
    /// exact.
    pub fn min_absolute_precision(&self) -> Option<i64> {
        self.data.iter().filter_map(|e| e.absolute_precision()).min()
    }

    /// Entrywise congruence of representatives mod p^abs_digits.
    pub fn congruent_mod(&self, other: &Self, abs_digits: i64) -> bool {
        self.p == other.p
            && self.n == other.n
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.congruent_mod(b, abs_digits))
    }
}

impl fmt::Display for PadicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Matrix logarithm of M = I + X with every entry of X of valuation at least
/// 1 (or exactly zero). Exact nilpotent inputs terminate exactly; otherwise a
/// finite working precision is required.
pub fn matrix_log(m: &PadicMatrix) -> Result<PadicMatrix, PadicError> {
    let n = m.size();
    let x = m.sub(&PadicMatrix::identity(m.prime(), n)?)?;
    for i in 0..n {
        for j in 0..n {
            let e = x.at(i, j);
            if !e.is_exact_zero() && e.valuation().unwrap() < 1 {
                return Err(PadicError::NotCongruentToIdentity { row: i, col: j });
            }
        }
    }
    if x.is_exact_zero() {
        return Ok(x);
    }
    let horizon = log_series_horizon(&x)?;
    let p = m.prime();
    let mut sum: Option<PadicMatrix> = None;
    let mut power = x.clone();
    for k in 1..=horizon {
        let term = power.scale(&PadicScalar::exact_ratio(p, 1, k as i64)?)?;
        sum = Some(match sum {
            None => term,
            Some(s) => {
                if k % 2 == 1 {
                    s.add(&term)?
                } else {
                    s.sub(&term)?
                }
            }
        });
        if k == horizon {
            break;
        }
        power = power.mul(&x)?;
        if power.is_exact_zero() {
            break;
        }
    }
    Ok(sum.unwrap())
}

fn log_series_horizon(x: &PadicMatrix) -> Result<u64, PadicError> {
    let vmin = x.min_valuation().unwrap();
    match x.min_absolute_precision() {
        Some(a) => Ok(series_horizon(vmin, a, x.prime(), false)),
        None => nilpotency_index(x).ok_or(PadicError::ExactInputNeedsPrecision),
    }
}

/// Least k with X^k = 0, when X is nilpotent.
fn nilpotency_index(x: &PadicMatrix) -> Option<u64> {
    let mut pow = x.clone();
    for k in 1..=x.size() as u64 {
        if pow.is_exact_zero() {
            return Some(k);
        }
        pow = pow.mul(x).ok()?;
    }
    None
}

/// Matrix exponential, for entries of valuation at least 1 and odd p.
pub fn matrix_exp(x: &PadicMatrix) -> Result<PadicMatrix, PadicError> {
    let n = x.size();
    let p = x.prime();
    for i in 0..n {
        for j in 0..n {
            let e = x.at(i, j);
            if !e.is_exact_zero() && e.valuation().unwrap() < 1 {
                return Err(PadicError::EntryValuationTooSmall { row: i, col: j });
            }
        }
    }
    if x.is_exact_zero() {
        return PadicMatrix::identity(p, n);
    }
    let vmin = x.min_valuation().unwrap();
    let horizon = match x.min_absolute_precision() {
        Some(a) => series_horizon(vmin, a, p, true),
        None => nilpotency_index(x).ok_or(PadicError::ExactInputNeedsPrecision)?,
    };
    let mut sum = PadicMatrix::identity(p, n)?;
    let mut term = PadicMatrix::identity(p, n)?;
    for k in 1..=horizon {
        term = term.mul(x)?.scale(&PadicScalar::exact_ratio(p, 1, k as i64)?)?;
        if term.is_exact_zero() {
            break;
        }
        sum = sum.add(&term)?;
    }
    Ok(sum)
}

/// Row echelon structure over Q_p with minimal-valuation pivots. Each stored
/// row is the only one with a nonzero entry at its pivot column.
struct Echelon {
    dim: usize,
    rows: Vec<(usize, Vec<PadicScalar>)>,
}

impl Echelon {
    fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces v against the basis and inserts it if independent. Returns
    /// whether the rank grew.
    fn insert(&mut self, mut v: Vec<PadicScalar>) -> Result<bool, PadicError> {
        assert_eq!(v.len(), self.dim);
        for (pc, bv) in &self.rows {
            if v[*pc].is_exact_zero() {
                continue;
            }
            let f = v[*pc].div(&bv[*pc])?;
            for (ve, be) in v.iter_mut().zip(bv) {
                *ve = ve.sub(&f.mul(be)?)?;
            }
        }
        let pivot = match (0..self.dim)
            .filter(|&i| !v[i].is_exact_zero())
            .min_by_key(|&i| (v[i].valuation().unwrap(), i))
        {
            Some(c) => c,
            None => return Ok(false),
        };
        for (_, bv) in self.rows.iter_mut() {
            if bv[pivot].is_exact_zero() {
                continue;
            }
            let f = bv[pivot].div(&v[pivot])?;
            for (be, ve) in bv.iter_mut().zip(&v) {
                *be = be.sub(&f.mul(ve)?)?;
            }
        }
        self.rows.push((pivot, v));
        Ok(true)
    }
}

/// Rank of a family of vectors over Q_p, by Gauss-Jordan elimination with
/// minimal-valuation pivots. Fails with `PrecisionExhausted` when a
/// cancellation eats all certified digits.
pub fn padic_rank(vectors: &[Vec<PadicScalar>]) -> Result<usize, PadicError> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let mut ech = Echelon::new(first.len());
    for v in vectors {
        if v.len() != first.len() {
            return Err(PadicError::ShapeMismatch);
        }
        ech.insert(v.clone())?;
    }
    Ok(ech.rank())
}

const ORDER_CAP: u64 = 100_000;

/// Lower bound for the dimension of the p-adic Lie algebra spanned by the
/// logarithms of the given integer matrices, working to `digits` p-adic
/// digits.
///
/// Each generator M must have finite order t mod p; then M^t mod p^digits is
/// congruent to the identity mod p and its log converges. The logs are
/// closed under the bracket [A, B] = AB - BA and the rank of the resulting
/// family is returned. Ranks computed this way can only undercount (deeper
/// congruence levels could reveal more directions), never overcount.
pub fn lie_dimension_lower_bound(
    gens: &[IntMatrix],
    p: u64,
    digits: i64,
) -> Result<usize, PadicError> {
    PadicScalar::check_prime(p)?;
    if digits < 1 {
        return Err(PadicError::PrecisionNotPositive(digits));
    }
    let modulus = p
        .checked_pow(digits as u32)
        .ok_or(PadicError::ModulusTooLarge { p, digits })?;
    let Some(first) = gens.first() else {
        return Ok(0);
    };
    let n = first.size();
    let advise = |e: PadicError| match e {
        PadicError::PrecisionExhausted => PadicError::InsufficientPrecision { digits },
        other => other,
    };
    let mut logs = Vec::new();
    for m in gens {
        if m.size() != n {
            return Err(PadicError::ShapeMismatch);
        }
        let r = m.reduce_mod(p);
        let mut acc = r.clone();
        let mut t = 1;
        while !acc.is_identity() {
            acc = acc.mul(&r);
            t += 1;
            if t > ORDER_CAP {
                return Err(PadicError::OrderNotFound { cap: ORDER_CAP });
            }
        }
        let power = m.reduce_mod(modulus).pow(t);
        let pm = PadicMatrix::from_residue(&power, p, digits)?;
        logs.push(matrix_log(&pm).map_err(advise)?);
    }
    let flatten = |m: &PadicMatrix| -> Vec<PadicScalar> {
        let mut v = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                v.push(m.at(i, j).clone());
            }
        }
        v
    };
    let mut ech = Echelon::new(n * n);
    let mut kept: Vec<PadicMatrix> = Vec::new();
    for l in logs {
        if ech.insert(flatten(&l)).map_err(advise)? {
            kept.push(l);
        }
    }
    let mut i = 0;
    while i < kept.len() {
        for j in 0..i {
            let br = kept[i]
                .mul(&kept[j])
                .and_then(|ab| kept[j].mul(&kept[i]).and_then(|ba| ab.sub(&ba)))
                .map_err(advise)?;
            if ech.insert(flatten(&br)).map_err(advise)? {
                kept.push(br);
            }
        }
        i += 1;
    }
    Ok(ech.rank())
}

/// X lies in the symplectic Lie algebra: X^T J + J X = 0.
pub fn in_symplectic_lie_algebra(x: &IntMatrix, form: &SymplecticForm) -> bool {
    let j = form.matrix();
    x.size() == j.size() && x.transpose().mul(j) == j.mul(x).neg()
}

/// Dimension of the Lie algebra {X : X^T J + J X = 0} over the rationals,
/// by direct nullspace computation. Equals 2g^2 + g.
pub fn sp_lie_dimension(g: u32) -> usize {
    let n = 2 * g as usize;
    let form = SymplecticForm::standard(g);
    let j = form.matrix();
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            // (X^T J + J X)_{ik} = sum_m (J_{mk} X_{mi} + J_{im} X_{mk})
            let mut row = vec![Rat::zero(); n * n];
            for m in 0..n {
                row[m * n + i] = &row[m * n + i] + rat(j.at(m, k));
                row[m * n + k] = &row[m * n + k] + rat(j.at(i, m));
            }
            rows.push(row);
        }
    }
    let m = RatMat::from_rows(rows);
    m.cols() - m.rank()
}

/// The bracket does not vanish on the symplectic Lie algebra: E12 and E21
/// lie in sp_2 and [E12, E21] = E11 - E22 is a nonzero member.
pub fn sp_bracket_nontrivial() -> bool {
    let form = SymplecticForm::standard(1);
    let e12 = IntMatrix::from_rows(&[&[0, 1], &[0, 0]]);
    let e21 = IntMatrix::from_rows(&[&[0, 0], &[1, 0]]);
    let br = e12.mul(&e21).sub(&e21.mul(&e12));
    in_symplectic_lie_algebra(&e12, &form)
        && in_symplectic_lie_algebra(&e21, &form)
        && in_symplectic_lie_algebra(&br, &form)
        && !br.is_zero()
}

/// Dimension of the commutant of the left regular representation of H, by
/// solving X R_g = R_g X over the rationals for a generating set. Equals
/// |H|: the commutant is the right regular representation of the group
/// algebra.
pub fn commutant_dimension(h: &FiniteGroup) -> usize {
    let n = h.order();
    let gens = h.generating_set();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for &g in &gens {
        let ginv = h.inverse(g);
        for a in 0..n {
            for b in 0..n {
                // (X R_g)_{ab} = X_{a, g b} and (R_g X)_{ab} = X_{g^{-1} a, b}
                let c1 = a * n + h.op(g, b);
                let c2 = h.op(ginv, a) * n + b;
                if c1 == c2 {
                    continue;
                }
                let mut row = vec![Rat::zero(); n * n];
                row[c1] = rat(1);
                row[c2] = rat(-1);
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return n * n;
    }
    let m = RatMat::from_rows(rows);
    m.cols() - m.rank()
}
