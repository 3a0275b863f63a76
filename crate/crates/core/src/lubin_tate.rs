//! Formal group laws of Lubin-Tate type over unramified coefficient rings.
//!
//! For an odd prime p, residue degree f and q = p^f, the ring is
//! Z_p[w]/(m(w)) with m the lex-smallest monic irreducible polynomial of
//! degree f mod p (coefficients compared constant-first). Elements are kept
//! as exact rational coordinate vectors in the basis 1, w, ..., w^{f-1};
//! the extension is unramified, so the valuation of an element is the
//! minimum p-adic valuation of its coordinates. The ring's precision N only
//! enters congruence checks and serialization; all arithmetic is exact.
//!
//! Given a uniformizer pi, the series f(t) = pi t + t^q determines a unique
//! formal group law F with F = X + Y mod degree 2 and f(F(X,Y)) =
//! F(f(X), f(Y)). F is built degree by degree: the degree-n error of the
//! functional equation is divided by pi^n - pi, whose valuation must be 1.
//! The same induction yields the endomorphisms [a](t) = a t + ... commuting
//! with f, and inverting and integrating the partial derivative of F gives
//! the formal logarithm, whose coefficients may have denominators up to
//! q^{log_q D}.

use crate::padic::{is_odd_prime, val_p_rat};
use crate::ratmat::{Rat, RatMat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LtError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("residue degree {f} is outside 1..={max}")]
    ResidueDegreeOutOfRange { f: u32, max: u32 },
    #[error("precision must be at least 1 digit, got {0}")]
    PrecisionNotPositive(i64),
    #[error("p^f does not fit in 64 bits")]
    ParameterOverflow,
    #[error("cutoff degree must be at least 2, got {0}")]
    DegreeTooSmall(u16),
    #[error("degree {wanted} exceeds the cutoff {cutoff}")]
    DegreeAboveCutoff { wanted: u16, cutoff: u16 },
    #[error("pi must have valuation exactly 1")]
    NotUniformizer,
    #[error("q = {q} does not match the ring's p^f = {expected}")]
    WrongPowerQ { q: u64, expected: u64 },
    #[error("element is not integral (a coordinate has negative valuation)")]
    NotIntegral,
    #[error("divisor pi^{degree} - pi has valuation {valuation}, expected 1")]
    BadDivisorValuation { degree: u16, valuation: i64 },
    #[error("series must have 1 to 3 variables, got {0}")]
    VariableCountOutOfRange(usize),
    #[error("variable index {index} out of range for {vars} variables")]
    VariableIndexOutOfRange { index: usize, vars: usize },
    #[error("operands have mismatched shapes")]
    ShapeMismatch,
    #[error("operands have different degree cutoffs")]
    CutoffMismatch,
    #[error("substituted series must have zero constant term")]
    ConstantTermNotZero,
    #[error("logarithm denominators need {needed} digits, ring only carries {have}")]
    LogPrecisionExhausted { needed: i64, have: i64 },
    #[error("malformed input: {0}")]
    Malformed(String),
}

const MAX_RESIDUE_DEGREE: u32 = 6;

// ---------------------------------------------------------------------------
// Polynomial arithmetic over F_p, used only to pick the ring modulus.
// ---------------------------------------------------------------------------

fn ptrim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
}

fn psub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    ptrim(&mut out);
    out
}

fn mulmod(x: u64, y: u64, p: u64) -> u64 {
    (x as u128 * y as u128 % p as u128) as u64
}

fn pmul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mulmod(x, y, p)) % p;
        }
    }
    // m is monic, so plain long division reduces.
    let deg = m.len() - 1;
    while prod.len() > deg {
        let lead = *prod.last().unwrap();
        let shift = prod.len() - 1 - deg;
        if lead != 0 {
            for i in 0..m.len() {
                let idx = shift + i;
                prod[idx] = (prod[idx] + p - mulmod(lead, m[i], p)) % p;
            }
        }
        prod.pop();
    }
    ptrim(&mut prod);
    prod
}

fn ppow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut b = base.to_vec();
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = pmul_mod(&acc, &b, m, p);
        }
        b = pmul_mod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn modpow_u64(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    acc
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ptrim(&mut a);
    ptrim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        // remainder of a by b
        while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
            let lead_inv = modpow_u64(*b.last().unwrap(), p - 2, p);
            let factor = mulmod(*a.last().unwrap(), lead_inv, p);
            let shift = a.len() - b.len();
            if factor != 0 {
                for i in 0..b.len() {
                    a[shift + i] = (a[shift + i] + p - mulmod(factor, b[i], p)) % p;
                }
            }
            a.pop();
            ptrim(&mut a);
            if a.len() < b.len() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
        ptrim(&mut b);
    }
    ptrim(&mut a);
    a
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Deterministic irreducibility over F_p for a monic polynomial: x^{p^f} = x
/// mod m, and gcd(x^{p^{f/l}} - x, m) = 1 for each prime l | f.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let f = (m.len() - 1) as u32;
    let x = vec![0u64, 1];
    let frob = |times: u32| -> Vec<u64> {
        let mut t = x.clone();
        for _ in 0..times {
            t = ppow_mod(&t, p, m, p);
        }
        t
    };
    let mut xf = frob(f);
    ptrim(&mut xf);
    if xf != x {
        return false;
    }
    for l in prime_divisors(f) {
        let t = frob(f / l);
        let g = pgcd(&psub(&t, &x, p), m, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Coefficients c_0..c_{f-1} of the lex-smallest monic irreducible
/// w^f + c_{f-1} w^{f-1} + ... + c_0 over F_p, comparing (c_0, ..., c_{f-1}).
fn smallest_irreducible(p: u64, f: u32) -> Vec<u64> {
    if f == 1 {
        return vec![0]; // m = w
    }
    let total = p.pow(f);
    for k in 0..total {
        let mut c = vec![0u64; f as usize];
        let mut rem = k;
        for i in (0..f as usize).rev() {
            c[i] = rem % p;
            rem /= p;
        }
        let mut m = c.clone();
        m.push(1);
        if is_irreducible(&m, p) {
            return c;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

// ---------------------------------------------------------------------------
// The coefficient ring.
// ---------------------------------------------------------------------------

/// Unramified extension Z_p[w]/(m(w)) of residue degree f, with a working
/// precision for congruence checks and serialization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientRing {
    p: u64,
    f: u32,
    q: u64,
    precision: i64,
    modulus: Vec<u64>,
}

/// Element written in the basis 1, w, ..., w^{f-1} with exact rational
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElem {
    coeffs: Vec<BigRational>,
}

impl RingElem {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl CoefficientRing {
    pub fn new(p: u64, f: u32, precision: i64) -> Result<Self, LtError> {
        if !is_odd_prime(p) {
            return Err(LtError::NotOddPrime(p));
        }
        if f < 1 || f > MAX_RESIDUE_DEGREE {
            return Err(LtError::ResidueDegreeOutOfRange { f, max: MAX_RESIDUE_DEGREE });
        }
        if precision < 1 {
            return Err(LtError::PrecisionNotPositive(precision));
        }
        let q = p.checked_pow(f).ok_or(LtError::ParameterOverflow)?;
        Ok(CoefficientRing { p, f, q, precision, modulus: smallest_irreducible(p, f) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn residue_degree(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Coefficients c_0..c_{f-1} of the modulus w^f + ... + c_0.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> RingElem {
        RingElem { coeffs: vec![BigRational::zero(); self.f as usize] }
    }

    pub fn one(&self) -> RingElem {
        self.int(1)
    }

    pub fn int(&self, k: i64) -> RingElem {
        let mut e = self.zero();
        e.coeffs[0] = BigRational::from_integer(BigInt::from(k));
        e
    }

    /// The image of w. For f = 1 the modulus is w itself, so this is zero.
    pub fn w(&self) -> RingElem {
        let mut e = self.zero();
        if self.f >= 2 {
            e.coeffs[1] = BigRational::one();
        }
        e
    }

    pub fn from_ints(&self, coords: &[i64]) -> Result<RingElem, LtError> {
        self.from_rationals(
            coords
                .iter()
                .map(|&k| BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn from_rationals(&self, coords: Vec<BigRational>) -> Result<RingElem, LtError> {
        if coords.len() > self.f as usize {
            return Err(LtError::ShapeMismatch);
        }
        let mut e = self.zero();
        for (i, c) in coords.into_iter().enumerate() {
            e.coeffs[i] = c;
        }
        Ok(e)
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        RingElem { coeffs: a.coeffs.iter().map(|x| -x).collect() }
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let f = self.f as usize;
        let mut conv = vec![BigRational::zero(); 2 * f - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                conv[i + j] = &conv[i + j] + x * y;
            }
        }
        // reduce top degrees by w^f = -(m_{f-1} w^{f-1} + ... + m_0)
        for d in (f..conv.len()).rev() {
            if conv[d].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut conv[d], BigRational::zero());
            for i in 0..f {
                if self.modulus[i] == 0 {
                    continue;
                }
                let m = BigRational::from_integer(BigInt::from(self.modulus[i]));
                conv[d - f + i] = &conv[d - f + i] - &c * m;
            }
        }
        conv.truncate(f);
        RingElem { coeffs: conv }
    }

    pub fn scalar(&self, a: &RingElem, c: &BigRational) -> RingElem {
        RingElem { coeffs: a.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, a: &RingElem, mut e: u64) -> RingElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse in the fraction field, by solving the linear
    /// system of multiplication by a. None only for zero.
    pub fn inverse(&self, a: &RingElem) -> Option<RingElem> {
        if a.is_zero() {
            return None;
        }
        let f = self.f as usize;
        let mut cols = Vec::with_capacity(f);
        let mut basis_pow = self.one();
        for _ in 0..f {
            cols.push(self.mul(a, &basis_pow));
            basis_pow = self.mul(&basis_pow, &self.w());
        }
        let mut m = RatMat::zeros(f, f);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..f {
                m.set(i, j, col.coeffs[i].clone());
            }
        }
        let mut b = vec![Rat::zero(); f];
        b[0] = Rat::one();
        let x = m.solve(&b)?;
        Some(RingElem { coeffs: x })
    }

    /// Minimum p-adic valuation of the coordinates (the extension is
    /// unramified); None for zero.
    pub fn valuation(&self, a: &RingElem) -> Option<i64> {
        a.coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| val_p_rat(c, self.p))
            .min()
    }

    /// Coordinates agree mod p^precision.
    pub fn congruent(&self, a: &RingElem, b: &RingElem) -> bool {
        a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| {
            let d = x - y;
            d.is_zero() || val_p_rat(&d, self.p) >= self.precision
        })
    }
}

// ---------------------------------------------------------------------------
// Truncated power series.
// ---------------------------------------------------------------------------

/// Polynomial proxy for a power series in 1 to 3 variables: coefficients are
/// known for total degree up to the cutoff and unknown beyond it, so
/// equality is only ever tested through a stated degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    vars: usize,
    cutoff: u16,
    terms: BTreeMap<Vec<u16>, RingElem>,
}

fn total_degree(exps: &[u16]) -> u16 {
    exps.iter().sum()
}

impl TruncatedSeries {
    pub fn zero(vars: usize, cutoff: u16) -> Result<Self, LtError> {
        if !(1..=3).contains(&vars) {
            return Err(LtError::VariableCountOutOfRange(vars));
        }
        Ok(TruncatedSeries { vars, cutoff, terms: BTreeMap::new() })
    }

    pub fn variable(
        ring: &CoefficientRing,
        vars: usize,
        cutoff: u16,
        index: usize,
    ) -> Result<Self, LtError> {
        let mut s = Self::zero(vars, cutoff)?;
        if index >= vars {
            return Err(LtError::VariableIndexOutOfRange { index, vars });
        }
        if cutoff < 1 {
            return Err(LtError::DegreeTooSmall(cutoff));
        }
        let mut exps = vec![0u16; vars];
        exps[index] = 1;
        s.terms.insert(exps, ring.one());
        Ok(s)
    }

    fn one(ring: &CoefficientRing, vars: usize, cutoff: u16) -> Result<Self, LtError> {
        let mut s = Self::zero(vars, cutoff)?;
        s.terms.insert(vec![0; vars], ring.one());
        Ok(s)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn cutoff(&self) -> u16 {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &RingElem)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Coefficient of the given monomial; None stands for zero (or unknown,
    /// beyond the cutoff).
    pub fn coefficient(&self, exps: &[u16]) -> Option<&RingElem> {
        self.terms.get(exps)
    }

    fn insert(&mut self, exps: Vec<u16>, c: RingElem) {
        if total_degree(&exps) > self.cutoff || c.is_zero() {
            return;
        }
        self.terms.insert(exps, c);
    }

    fn accumulate(&mut self, ring: &CoefficientRing, exps: &[u16], c: &RingElem) {
        if total_degree(exps) > self.cutoff || c.is_zero() {
            return;
        }
        match self.terms.get_mut(exps) {
            Some(cur) => {
                *cur = ring.add(cur, c);
                if cur.is_zero() {
                    self.terms.remove(exps);
                }
            }
            None => {
                self.terms.insert(exps.to_vec(), c.clone());
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), LtError> {
        if self.vars != other.vars {
            return Err(LtError::ShapeMismatch);
        }
        if self.cutoff != other.cutoff {
            return Err(LtError::CutoffMismatch);
        }
        Ok(())
    }

    pub fn add(&self, ring: &CoefficientRing, other: &Self) -> Result<Self, LtError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(ring, e, c);
        }
        Ok(out)
    }

    pub fn sub(&self, ring: &CoefficientRing, other: &Self) -> Result<Self, LtError> {
        self.add(ring, &other.neg(ring))
    }

    pub fn neg(&self, ring: &CoefficientRing) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = ring.neg(c);
        }
        out
    }

    pub fn mul(&self, ring: &CoefficientRing, other: &Self) -> Result<Self, LtError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.vars, self.cutoff)?;
        for (ea, ca) in &self.terms {
            let da = total_degree(ea);
            for (eb, cb) in &other.terms {
                if da + total_degree(eb) > self.cutoff {
                    continue;
                }
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.accumulate(ring, &exps, &ring.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, ring: &CoefficientRing, c: &RingElem) -> Self {
        let mut out = Self { vars: self.vars, cutoff: self.cutoff, terms: BTreeMap::new() };
        for (e, v) in &self.terms {
            out.insert(e.clone(), ring.mul(v, c));
        }
        out
    }

    /// Smallest total degree of a known term.
    pub fn min_total_degree(&self) -> Option<u16> {
        self.terms.keys().map(|e| total_degree(e)).min()
    }

    pub fn pow(&self, ring: &CoefficientRing, e: u64) -> Result<Self, LtError> {
        if e == 0 {
            return Self::one(ring, self.vars, self.cutoff);
        }
        if let Some(d) = self.min_total_degree() {
            if (d as u64) * e > self.cutoff as u64 {
                return Self::zero(self.vars, self.cutoff);
            }
        } else {
            return Self::zero(self.vars, self.cutoff);
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(ring, self)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// Substitution X_i := args[i]. All substituted series must share a
    /// shape, have zero constant term, and there must be one per variable;
    /// the result takes its shape from them.
    pub fn substitute(
        &self,
        ring: &CoefficientRing,
        args: &[&TruncatedSeries],
    ) -> Result<Self, LtError> {
        if args.len() != self.vars {
            return Err(LtError::ShapeMismatch);
        }
        let (vars, cutoff) = (args[0].vars, args[0].cutoff);
        for a in args {
            if a.vars != vars {
                return Err(LtError::ShapeMismatch);
            }
            if a.cutoff != cutoff {
                return Err(LtError::CutoffMismatch);
            }
            if a.coefficient(&vec![0; vars]).is_some() {
                return Err(LtError::ConstantTermNotZero);
            }
        }
        let mut max_exp = vec![0u16; self.vars];
        for e in self.terms.keys() {
            for (m, &x) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(x);
            }
        }
        let mut powers: Vec<Vec<TruncatedSeries>> = Vec::with_capacity(self.vars);
        for (i, a) in args.iter().enumerate() {
            let mut ladder = vec![Self::one(ring, vars, cutoff)?];
            for k in 1..=max_exp[i] as usize {
                let next = ladder[k - 1].mul(ring, a)?;
                ladder.push(next);
            }
            powers.push(ladder);
        }
        let mut out = Self::zero(vars, cutoff)?;
        for (e, c) in &self.terms {
            let mut prod = Self::one(ring, vars, cutoff)?;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    prod = prod.mul(ring, &powers[i][k as usize])?;
                }
                if prod.is_zero() {
                    break;
                }
            }
            out = out.add(ring, &prod.scalar_mul(ring, c))?;
        }
        Ok(out)
    }

    pub fn homogeneous_part(&self, d: u16) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| total_degree(e) == d)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        TruncatedSeries { vars: self.vars, cutoff: self.cutoff, terms }
    }

    /// Partial derivative in the given variable; the cutoff drops by one
    /// because the top-degree coefficients of the derivative would need
    /// unknown terms.
    pub fn derivative(&self, var: usize) -> Result<Self, LtError> {
        if var >= self.vars {
            return Err(LtError::VariableIndexOutOfRange { index: var, vars: self.vars });
        }
        let mut out = TruncatedSeries {
            vars: self.vars,
            cutoff: self.cutoff.saturating_sub(1),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[var] -= 1;
            let k = BigRational::from_integer(BigInt::from(e[var]));
            out.insert(exps, RingElem { coeffs: c.coeffs.iter().map(|x| x * &k).collect() });
        }
        Ok(out)
    }

    /// Exact coefficient equality through total degree d, which must not
    /// exceed either cutoff.
    pub fn equal_through(&self, other: &Self, d: u16) -> Result<bool, LtError> {
        if self.vars != other.vars {
            return Err(LtError::ShapeMismatch);
        }
        if d > self.cutoff || d > other.cutoff {
            return Err(LtError::DegreeAboveCutoff {
                wanted: d,
                cutoff: self.cutoff.min(other.cutoff),
            });
        }
        let keys: std::collections::BTreeSet<&Vec<u16>> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|e| total_degree(e) <= d)
            .collect();
        for e in keys {
            let a = self.terms.get(e);
            let b = other.terms.get(e);
            match (a, b) {
                (Some(x), Some(y)) if x == y => {}
                (None, None) => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Coefficient congruence mod p^precision through total degree d.
    pub fn congruent_through(
        &self,
        ring: &CoefficientRing,
        other: &Self,
        d: u16,
    ) -> Result<bool, LtError> {
        if self.vars != other.vars {
            return Err(LtError::ShapeMismatch);
        }
        if d > self.cutoff || d > other.cutoff {
            return Err(LtError::DegreeAboveCutoff {
                wanted: d,
                cutoff: self.cutoff.min(other.cutoff),
            });
        }
        let zero = ring.zero();
        let keys: std::collections::BTreeSet<&Vec<u16>> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|e| total_degree(e) <= d)
            .collect();
        for e in keys {
            let a = self.terms.get(e).unwrap_or(&zero);
            let b = other.terms.get(e).unwrap_or(&zero);
            if !ring.congruent(a, b) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Minimum valuation over all coefficients; None for the zero series.
    pub fn min_coefficient_valuation(&self, ring: &CoefficientRing) -> Option<i64> {
        self.terms.values().filter_map(|c| ring.valuation(c)).min()
    }

    pub fn to_wire(&self, ring: &CoefficientRing) -> TruncatedSeriesWire {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let key = e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                let val = c.coeffs.iter().map(|x| x.to_string()).collect();
                (key, val)
            })
            .collect();
        TruncatedSeriesWire {
            p: ring.p.to_string(),
            f: ring.f.to_string(),
            modulus: ring.modulus.iter().map(|c| c.to_string()).collect(),
            precision: ring.precision.to_string(),
            vars: self.vars,
            cutoff: self.cutoff,
            terms,
        }
    }

    pub fn from_wire(w: &TruncatedSeriesWire) -> Result<(CoefficientRing, Self), LtError> {
        let bad = |m: &str| LtError::Malformed(m.into());
        let p: u64 = w.p.parse().map_err(|_| bad("prime"))?;
        let f: u32 = w.f.parse().map_err(|_| bad("residue degree"))?;
        let precision: i64 = w.precision.parse().map_err(|_| bad("precision"))?;
        let ring = CoefficientRing::new(p, f, precision)?;
        let modulus: Vec<u64> = w
            .modulus
            .iter()
            .map(|s| s.parse().map_err(|_| bad("modulus")))
            .collect::<Result<_, _>>()?;
        if modulus != ring.modulus {
            return Err(bad("modulus does not match the canonical choice for (p, f)"));
        }
        let mut series = Self::zero(w.vars, w.cutoff)?;
        for (key, val) in &w.terms {
            let exps: Vec<u16> = key
                .split(',')
                .map(|s| s.parse().map_err(|_| bad("exponent")))
                .collect::<Result<_, _>>()?;
            if exps.len() != w.vars || total_degree(&exps) > w.cutoff {
                return Err(bad("exponent vector"));
            }
            if val.len() != f as usize {
                return Err(bad("coefficient length"));
            }
            let coeffs: Vec<BigRational> = val
                .iter()
                .map(|s| s.parse().map_err(|_| bad("coefficient")))
                .collect::<Result<_, _>>()?;
            series.insert(exps, RingElem { coeffs });
        }
        Ok((ring, series))
    }
}

/// Sparse wire form of a series: exponent vectors joined by commas mapping
/// to exact rational coordinate strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeriesWire {
    pub p: String,
    pub f: String,
    pub modulus: Vec<String>,
    pub precision: String,
    pub vars: usize,
    pub cutoff: u16,
    pub terms: BTreeMap<String, Vec<String>>,
}

// ---------------------------------------------------------------------------
// The law, its endomorphisms, and the logarithm.
// ---------------------------------------------------------------------------

/// A formal group law F with F = X + Y mod degree 2 commuting with
/// f(t) = pi t + t^q, known through the cutoff of `series`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalGroupLaw {
    pub ring: CoefficientRing,
    pub pi: RingElem,
    pub q: u64,
    pub series: TruncatedSeries,
}

impl FormalGroupLaw {
    pub fn degree(&self) -> u16 {
        self.series.cutoff()
    }
}

/// f(X_index) = pi X_index + X_index^q as a truncated series.
fn frobenius_series(
    ring: &CoefficientRing,
    pi: &RingElem,
    q: u64,
    vars: usize,
    cutoff: u16,
    index: usize,
) -> Result<TruncatedSeries, LtError> {
    let mut s = TruncatedSeries::variable(ring, vars, cutoff, index)?.scalar_mul(ring, pi);
    if q <= cutoff as u64 {
        let mut exps = vec![0u16; vars];
        exps[index] = q as u16;
        s.insert(exps, ring.one());
    }
    Ok(s)
}

/// Divides the degree-n functional equation error by pi^n - pi, checking
/// the divisor has valuation exactly 1 and the correction stays integral.
fn correction(
    ring: &CoefficientRing,
    error_part: &TruncatedSeries,
    pi_pow_n: &RingElem,
    pi: &RingElem,
    n: u16,
) -> Result<TruncatedSeries, LtError> {
    let div = ring.sub(pi_pow_n, pi);
    match ring.valuation(&div) {
        Some(1) => {}
        v => {
            return Err(LtError::BadDivisorValuation {
                degree: n,
                valuation: v.unwrap_or(i64::MAX),
            })
        }
    }
    let inv = ring.inverse(&div).expect("valuation-1 element is nonzero");
    let delta = error_part.scalar_mul(ring, &inv);
    if delta.min_coefficient_valuation(ring).is_some_and(|v| v < 0) {
        return Err(LtError::NotIntegral);
    }
    Ok(delta)
}

/// The unique law with F = X + Y mod degree 2 and f(F(X,Y)) = F(f(X), f(Y))
/// through the given degree, built by the degree-by-degree induction.
pub fn lubin_tate_law(
    ring: &CoefficientRing,
    pi: &RingElem,
    q: u64,
    degree: u16,
) -> Result<FormalGroupLaw, LtError> {
    if pi.coeffs.len() != ring.f as usize {
        return Err(LtError::ShapeMismatch);
    }
    if ring.valuation(pi) != Some(1) {
        return Err(LtError::NotUniformizer);
    }
    if q != ring.q() {
        return Err(LtError::WrongPowerQ { q, expected: ring.q() });
    }
    if degree < 2 {
        return Err(LtError::DegreeTooSmall(degree));
    }
    let x = TruncatedSeries::variable(ring, 2, degree, 0)?;
    let y = TruncatedSeries::variable(ring, 2, degree, 1)?;
    let fx = frobenius_series(ring, pi, q, 2, degree, 0)?;
    let fy = frobenius_series(ring, pi, q, 2, degree, 1)?;
    let mut law = x.add(ring, &y)?;
    let mut pi_pow = ring.mul(pi, pi);
    for n in 2..=degree {
        let lhs = law.scalar_mul(ring, pi).add(ring, &law.pow(ring, q)?)?;
        let rhs = law.substitute(ring, &[&fx, &fy])?;
        let e_n = lhs.sub(ring, &rhs)?.homogeneous_part(n);
        if !e_n.is_zero() {
            let delta = correction(ring, &e_n, &pi_pow, pi, n)?;
            law = law.add(ring, &delta)?;
        }
        pi_pow = ring.mul(&pi_pow, pi);
    }
    Ok(FormalGroupLaw { ring: ring.clone(), pi: pi.clone(), q, series: law })
}

/// The unique series [a](t) = a t + ... commuting with f through the given
/// degree. Requires a integral.
pub fn lt_endomorphism(
    law: &FormalGroupLaw,
    a: &RingElem,
    degree: u16,
) -> Result<TruncatedSeries, LtError> {
    if degree > law.degree() {
        return Err(LtError::DegreeAboveCutoff { wanted: degree, cutoff: law.degree() });
    }
    if a.coeffs.len() != law.ring.f as usize {
        return Err(LtError::ShapeMismatch);
    }
    let ring = &law.ring;
    if ring.valuation(a).is_some_and(|v| v < 0) {
        return Err(LtError::NotIntegral);
    }
    let t = TruncatedSeries::variable(ring, 1, degree, 0)?;
    let f1 = frobenius_series(ring, &law.pi, law.q, 1, degree, 0)?;
    let mut phi = t.scalar_mul(ring, a);
    let mut pi_pow = ring.mul(&law.pi, &law.pi);
    for n in 2..=degree {
        let lhs = phi.scalar_mul(ring, &law.pi).add(ring, &phi.pow(ring, law.q)?)?;
        let rhs = phi.substitute(ring, &[&f1])?;
        let e_n = lhs.sub(ring, &rhs)?.homogeneous_part(n);
        if !e_n.is_zero() {
            let delta = correction(ring, &e_n, &pi_pow, &law.pi, n)?;
            phi = phi.add(ring, &delta)?;
        }
        pi_pow = ring.mul(&pi_pow, &law.pi);
    }
    Ok(phi)
}

fn ilog(base: u64, x: u64) -> i64 {
    let mut k = 0;
    let mut q = x;
    while q >= base {
        q /= base;
        k += 1;
    }
    k
}

/// The unique lambda(t) = t + ... with lambda(F(X,Y)) = lambda(X) +
/// lambda(Y) through the given degree, computed by inverting and
/// integrating the partial derivative of F in its first slot at (0, t).
/// Coefficient denominators are bounded by q^{floor(log_q degree)}; the
/// ring's precision must cover at least one digit past them.
pub fn formal_log(law: &FormalGroupLaw, degree: u16) -> Result<TruncatedSeries, LtError> {
    if degree > law.degree() {
        return Err(LtError::DegreeAboveCutoff { wanted: degree, cutoff: law.degree() });
    }
    if degree < 1 {
        return Err(LtError::DegreeTooSmall(degree));
    }
    let ring = &law.ring;
    let needed = ilog(law.q, degree as u64) + 1;
    if ring.precision() < needed {
        return Err(LtError::LogPrecisionExhausted { needed, have: ring.precision() });
    }
    let t = TruncatedSeries::variable(ring, 1, degree, 0)?;
    if degree == 1 {
        return Ok(t);
    }
    // g(t) = (dF/dX)(0, t), a unit power series with constant term 1
    let inner_cut = degree - 1;
    let zero1 = TruncatedSeries::zero(1, inner_cut)?;
    let t_small = TruncatedSeries::variable(ring, 1, inner_cut, 0)?;
    let g = law.series.derivative(0)?.substitute(ring, &[&zero1, &t_small])?;
    debug_assert_eq!(g.coefficient(&[0]), Some(&ring.one()));
    // invert g geometrically: 1/g = sum (1 - g)^k
    let h = TruncatedSeries::one(ring, 1, inner_cut)?.sub(ring, &g)?;
    let mut inv = TruncatedSeries::one(ring, 1, inner_cut)?;
    let mut hk = h.clone();
    while !hk.is_zero() {
        inv = inv.add(ring, &hk)?;
        hk = hk.mul(ring, &h)?;
    }
    // integrate termwise
    let mut lambda = TruncatedSeries::zero(1, degree)?;
    for (e, c) in &inv.terms {
        let k = e[0] as i64;
        let scale = BigRational::new(BigInt::one(), BigInt::from(k + 1));
        lambda.insert(vec![e[0] + 1], ring.scalar(c, &scale));
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u64, f: u32) -> CoefficientRing {
        CoefficientRing::new(p, f, 8).unwrap()
    }

    fn q_rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn modulus_is_lex_smallest_irreducible() {
        assert_eq!(ring(3, 1).modulus(), &[0]);
        assert_eq!(ring(3, 2).modulus(), &[1, 0]); // w^2 + 1
        assert_eq!(ring(5, 2).modulus(), &[1, 1]); // w^2 + w + 1
        assert_eq!(ring(7, 2).modulus(), &[1, 0]);
        assert_eq!(ring(3, 3).modulus(), &[1, 0, 2]); // w^3 + 2w^2 + 1
        // chosen quadratics really have no roots mod p
        for p in [3u64, 5, 7] {
            let m = ring(p, 2).modulus().to_vec();
            for c in 0..p {
                assert_ne!((c * c + m[1] * c + m[0]) % p, 0, "root {c} mod {p}");
            }
        }
    }

    #[test]
    fn irreducible_count_matches_formula() {
        // monic irreducible quadratics over F_p number p(p-1)/2
        for p in [3u64, 5, 7] {
            let mut count = 0;
            for c0 in 0..p {
                for c1 in 0..p {
                    if is_irreducible(&[c0, c1, 1], p) {
                        count += 1;
                    }
                }
            }
            assert_eq!(count, p * (p - 1) / 2, "p={p}");
        }
    }

    #[test]
    fn ring_construction_rejects_bad_parameters() {
        assert_eq!(CoefficientRing::new(2, 1, 8).unwrap_err(), LtError::NotOddPrime(2));
        assert_eq!(CoefficientRing::new(9, 1, 8).unwrap_err(), LtError::NotOddPrime(9));
        assert_eq!(
            CoefficientRing::new(3, 0, 8).unwrap_err(),
            LtError::ResidueDegreeOutOfRange { f: 0, max: 6 }
        );
        assert_eq!(
            CoefficientRing::new(3, 7, 8).unwrap_err(),
            LtError::ResidueDegreeOutOfRange { f: 7, max: 6 }
        );
        assert_eq!(CoefficientRing::new(3, 1, 0).unwrap_err(), LtError::PrecisionNotPositive(0));
    }

    #[test]
    fn element_arithmetic_mod_w2_plus_1() {
        let r = ring(3, 2);
        let w = r.w();
        let one = r.one();
        // (w + 1)^2 = w^2 + 2w + 1 = 2w since w^2 = -1
        let s = r.add(&w, &one);
        let sq = r.mul(&s, &s);
        assert_eq!(sq, r.from_ints(&[0, 2]).unwrap());
        // w * (-w) = 1
        let winv = r.inverse(&w).unwrap();
        assert_eq!(winv, r.from_ints(&[0, -1]).unwrap());
        assert_eq!(r.mul(&w, &winv), one);
        assert!(r.inverse(&r.zero()).is_none());
        assert_eq!(r.valuation(&r.int(18)), Some(2));
        assert_eq!(r.valuation(&r.zero()), None);
        let third = r.from_rationals(vec![q_rat(1, 3), BigRational::one()]).unwrap();
        assert_eq!(r.valuation(&third), Some(-1));
    }

    #[test]
    fn random_elements_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(6001);
        for (p, f) in [(3u64, 2u32), (5, 2), (3, 3)] {
            let r = ring(p, f);
            for _ in 0..10 {
                let coords: Vec<i64> = (0..f).map(|_| rng.gen_range(-20..20)).collect();
                let a = r.from_ints(&coords).unwrap();
                if a.is_zero() {
                    continue;
                }
                let inv = r.inverse(&a).unwrap();
                assert_eq!(r.mul(&a, &inv), r.one());
            }
        }
    }

    #[test]
    fn series_multiplication_and_truncation() {
        let r = ring(3, 1);
        let x = TruncatedSeries::variable(&r, 2, 4, 0).unwrap();
        let y = TruncatedSeries::variable(&r, 2, 4, 1).unwrap();
        let s = x.add(&r, &y).unwrap();
        let sq = s.mul(&r, &s).unwrap();
        assert_eq!(sq.coefficient(&[2, 0]), Some(&r.one()));
        assert_eq!(sq.coefficient(&[1, 1]), Some(&r.int(2)));
        assert_eq!(sq.coefficient(&[0, 2]), Some(&r.one()));
        // every term of (X+Y)^5 lies beyond cutoff 4
        assert!(s.pow(&r, 5).unwrap().is_zero());
        let d = sq.derivative(0).unwrap();
        assert_eq!(d.cutoff(), 3);
        assert_eq!(d.coefficient(&[1, 0]), Some(&r.int(2)));
        assert_eq!(d.coefficient(&[0, 1]), Some(&r.int(2)));
    }

    #[test]
    fn series_equality_is_degree_bounded() {
        let r = ring(3, 1);
        let x4 = TruncatedSeries::variable(&r, 2, 4, 0).unwrap();
        let x6 = TruncatedSeries::variable(&r, 2, 6, 0).unwrap();
        assert!(x4.equal_through(&x6, 4).unwrap());
        assert_eq!(
            x4.equal_through(&x6, 5).unwrap_err(),
            LtError::DegreeAboveCutoff { wanted: 5, cutoff: 4 }
        );
        assert_eq!(x4.add(&r, &x6).unwrap_err(), LtError::CutoffMismatch);
    }

    #[test]
    fn substitution_requires_zero_constant_term() {
        let r = ring(3, 1);
        let x = TruncatedSeries::variable(&r, 2, 4, 0).unwrap();
        let y = TruncatedSeries::variable(&r, 2, 4, 1).unwrap();
        let s = x.add(&r, &y).unwrap();
        let mut with_const = x.clone();
        with_const.insert(vec![0, 0], r.one());
        assert_eq!(
            s.substitute(&r, &[&with_const, &y]).unwrap_err(),
            LtError::ConstantTermNotZero
        );
        // F(T, T) for F = X + Y doubles the variable
        let t = TruncatedSeries::variable(&r, 1, 4, 0).unwrap();
        let diag = s.substitute(&r, &[&t, &t]).unwrap();
        assert_eq!(diag.coefficient(&[1]), Some(&r.int(2)));
    }

    #[test]
    fn law_at_p3_has_frozen_low_coefficients() {
        // degree-3 correction is ((X+Y)^3 - X^3 - Y^3)/(3^3 - 3), so the
        // X^2 Y and X Y^2 coefficients are 3/24 = 1/8
        let r = ring(3, 1);
        let law = lubin_tate_law(&r, &r.int(3), 3, 4).unwrap();
        let eighth = r.from_rationals(vec![q_rat(1, 8)]).unwrap();
        assert_eq!(law.series.coefficient(&[1, 0]), Some(&r.one()));
        assert_eq!(law.series.coefficient(&[0, 1]), Some(&r.one()));
        assert_eq!(law.series.coefficient(&[2, 1]), Some(&eighth));
        assert_eq!(law.series.coefficient(&[1, 2]), Some(&eighth));
        assert_eq!(law.series.coefficient(&[2, 0]), None);
        assert_eq!(law.series.coefficient(&[1, 1]), None);
    }

    #[test]
    fn law_at_p5_starts_additive() {
        let r = ring(5, 1);
        // below degree q = 5 there is nothing to correct
        let small = lubin_tate_law(&r, &r.int(5), 5, 4).unwrap();
        assert_eq!(small.series.terms().count(), 2);
        // the first corrections: binom(5,k)/(5^5 - 5)
        let law = lubin_tate_law(&r, &r.int(5), 5, 5).unwrap();
        let c41 = r.from_rationals(vec![q_rat(1, 624)]).unwrap();
        let c32 = r.from_rationals(vec![q_rat(1, 312)]).unwrap();
        assert_eq!(law.series.coefficient(&[4, 1]), Some(&c41));
        assert_eq!(law.series.coefficient(&[3, 2]), Some(&c32));
        assert_eq!(law.series.coefficient(&[2, 3]), Some(&c32));
        assert_eq!(law.series.coefficient(&[1, 4]), Some(&c41));
    }

    #[test]
    fn law_satisfies_group_axioms() {
        let r = ring(3, 1);
        let d = 8u16;
        let law = lubin_tate_law(&r, &r.int(3), 3, d).unwrap();
        let f = &law.series;
        // commutativity: swap the two exponents
        for (e, c) in f.terms() {
            let swapped = vec![e[1], e[0]];
            assert_eq!(f.coefficient(&swapped), Some(c));
        }
        // F(X, 0) = X
        let t = TruncatedSeries::variable(&r, 1, d, 0).unwrap();
        let zero1 = TruncatedSeries::zero(1, d).unwrap();
        let fx0 = f.substitute(&r, &[&t, &zero1]).unwrap();
        assert!(fx0.equal_through(&t, d).unwrap());
        // associativity as 3-variable series
        let x3 = TruncatedSeries::variable(&r, 3, d, 0).unwrap();
        let y3 = TruncatedSeries::variable(&r, 3, d, 1).unwrap();
        let z3 = TruncatedSeries::variable(&r, 3, d, 2).unwrap();
        let inner_xy = f.substitute(&r, &[&x3, &y3]).unwrap();
        let inner_yz = f.substitute(&r, &[&y3, &z3]).unwrap();
        let left = f.substitute(&r, &[&inner_xy, &z3]).unwrap();
        let right = f.substitute(&r, &[&x3, &inner_yz]).unwrap();
        assert!(left.equal_through(&right, d).unwrap());
        // functional equation holds through d
        let fx = frobenius_series(&r, &law.pi, 3, 2, d, 0).unwrap();
        let fy = frobenius_series(&r, &law.pi, 3, 2, d, 1).unwrap();
        let lhs = f.scalar_mul(&r, &law.pi).add(&r, &f.pow(&r, 3).unwrap()).unwrap();
        let rhs = f.substitute(&r, &[&fx, &fy]).unwrap();
        assert!(lhs.equal_through(&rhs, d).unwrap());
        // integrality
        assert!(f.min_coefficient_valuation(&r).unwrap() >= 0);
    }

    #[test]
    fn law_over_quadratic_ring_corrects_at_degree_q() {
        let r = ring(3, 2);
        let law = lubin_tate_law(&r, &r.int(3), 9, 10).unwrap();
        for (e, _) in law.series.terms() {
            let d = e[0] + e[1];
            assert!(d == 1 || d >= 9, "unexpected term at degree {d}");
        }
        // coefficient of X^8 Y is binom(9,1)/(3^9 - 3) = 3/6560
        let expect = r.from_rationals(vec![q_rat(3, 6560), BigRational::zero()]).unwrap();
        assert_eq!(law.series.coefficient(&[8, 1]), Some(&expect));
        assert!(law.series.min_coefficient_valuation(&r).unwrap() >= 0);
    }

    #[test]
    fn law_rejects_bad_parameters() {
        let r = ring(3, 1);
        assert_eq!(
            lubin_tate_law(&r, &r.int(9), 3, 6).unwrap_err(),
            LtError::NotUniformizer
        );
        assert_eq!(
            lubin_tate_law(&r, &r.int(2), 3, 6).unwrap_err(),
            LtError::NotUniformizer
        );
        assert_eq!(
            lubin_tate_law(&r, &r.int(3), 9, 6).unwrap_err(),
            LtError::WrongPowerQ { q: 9, expected: 3 }
        );
        assert_eq!(
            lubin_tate_law(&r, &r.int(3), 3, 1).unwrap_err(),
            LtError::DegreeTooSmall(1)
        );
    }

    #[test]
    fn endomorphisms_have_expected_normal_forms() {
        let r = ring(3, 1);
        let d = 8u16;
        let law = lubin_tate_law(&r, &r.int(3), 3, d).unwrap();
        let t = TruncatedSeries::variable(&r, 1, d, 0).unwrap();
        // [1] = t and [0] = 0
        assert!(lt_endomorphism(&law, &r.one(), d).unwrap().equal_through(&t, d).unwrap());
        assert!(lt_endomorphism(&law, &r.zero(), d).unwrap().is_zero());
        // [pi] = f
        let f1 = frobenius_series(&r, &law.pi, 3, 1, d, 0).unwrap();
        let pi_end = lt_endomorphism(&law, &law.pi, d).unwrap();
        assert!(pi_end.equal_through(&f1, d).unwrap());
        // [2](t) = 2t + t^3/4 + ..., and [2] = F(t, t)
        let two = lt_endomorphism(&law, &r.int(2), d).unwrap();
        let quarter = r.from_rationals(vec![q_rat(1, 4)]).unwrap();
        assert_eq!(two.coefficient(&[1]), Some(&r.int(2)));
        assert_eq!(two.coefficient(&[3]), Some(&quarter));
        let diag = law.series.substitute(&r, &[&t, &t]).unwrap();
        assert!(two.equal_through(&diag, d).unwrap());
        assert!(two.min_coefficient_valuation(&r).unwrap() >= 0);
        // non-integral multiplier is rejected
        let third = r.from_rationals(vec![q_rat(1, 3)]).unwrap();
        assert_eq!(lt_endomorphism(&law, &third, d).unwrap_err(), LtError::NotIntegral);
    }

    #[test]
    fn endomorphisms_compose_multiplicatively() {
        let r = ring(3, 1);
        let d = 8u16;
        let law = lubin_tate_law(&r, &r.int(3), 3, d).unwrap();
        let two = lt_endomorphism(&law, &r.int(2), d).unwrap();
        let three = lt_endomorphism(&law, &r.int(3), d).unwrap();
        let six = lt_endomorphism(&law, &r.int(6), d).unwrap();
        let composed = two.substitute(&r, &[&three]).unwrap();
        assert!(composed.equal_through(&six, d).unwrap());
        let other_way = three.substitute(&r, &[&two]).unwrap();
        assert!(other_way.equal_through(&six, d).unwrap());
    }

    #[test]
    fn logarithm_linearizes_the_law() {
        let r = ring(3, 1);
        let d = 8u16;
        let law = lubin_tate_law(&r, &r.int(3), 3, d).unwrap();
        let lam = formal_log(&law, d).unwrap();
        assert_eq!(lam.coefficient(&[1]), Some(&r.one()));
        // lambda = t - t^3/24 + ...
        let c3 = r.from_rationals(vec![q_rat(-1, 24)]).unwrap();
        assert_eq!(lam.coefficient(&[3]), Some(&c3));
        // denominators never exceed q^{log_q d}
        assert!(lam.min_coefficient_valuation(&r).unwrap() >= -ilog(3, d as u64));
        // lambda(F(X,Y)) = lambda(X) + lambda(Y)
        let x = TruncatedSeries::variable(&r, 2, d, 0).unwrap();
        let y = TruncatedSeries::variable(&r, 2, d, 1).unwrap();
        let lhs = lam.substitute(&r, &[&law.series]).unwrap();
        let rhs = lam
            .substitute(&r, &[&x])
            .unwrap()
            .add(&r, &lam.substitute(&r, &[&y]).unwrap())
            .unwrap();
        assert!(lhs.equal_through(&rhs, d).unwrap());
        // lambda([a]) = a lambda for a = 2 and a = pi
        for a in [r.int(2), law.pi.clone()] {
            let phi = lt_endomorphism(&law, &a, d).unwrap();
            let left = lam.substitute(&r, &[&phi]).unwrap();
            let right = lam.scalar_mul(&r, &a);
            assert!(left.equal_through(&right, d).unwrap(), "a = {a:?}");
        }
    }

    #[test]
    fn logarithm_of_additive_law_is_identity() {
        let r = ring(5, 1);
        let x = TruncatedSeries::variable(&r, 2, 6, 0).unwrap();
        let y = TruncatedSeries::variable(&r, 2, 6, 1).unwrap();
        let add_law = FormalGroupLaw {
            ring: r.clone(),
            pi: r.int(5),
            q: 5,
            series: x.add(&r, &y).unwrap(),
        };
        let lam = formal_log(&add_law, 6).unwrap();
        let t = TruncatedSeries::variable(&r, 1, 6, 0).unwrap();
        assert!(lam.equal_through(&t, 6).unwrap());
    }

    #[test]
    fn logarithm_needs_enough_precision_for_denominators() {
        let r = CoefficientRing::new(3, 1, 1).unwrap();
        let law = lubin_tate_law(&r, &r.int(3), 3, 12).unwrap();
        assert_eq!(
            formal_log(&law, 12).unwrap_err(),
            LtError::LogPrecisionExhausted { needed: 3, have: 1 }
        );
    }

    #[test]
    fn different_uniformizers_share_normalization() {
        let r = ring(3, 1);
        let pi2 = r.int(12); // 3 * (1 + 3)
        let law1 = lubin_tate_law(&r, &r.int(3), 3, 6).unwrap();
        let law2 = lubin_tate_law(&r, &pi2, 3, 6).unwrap();
        let l1 = formal_log(&law1, 6).unwrap();
        let l2 = formal_log(&law2, 6).unwrap();
        assert_eq!(l1.coefficient(&[1]), Some(&r.one()));
        assert_eq!(l2.coefficient(&[1]), Some(&r.one()));
        // the laws themselves differ
        assert_ne!(law1.series.coefficient(&[2, 1]), law2.series.coefficient(&[2, 1]));
    }

    #[test]
    fn series_wire_round_trip() {
        let r = ring(3, 2);
        let law = lubin_tate_law(&r, &r.int(3), 9, 10).unwrap();
        let wire = law.series.to_wire(&r);
        let json = serde_json::to_string(&wire).unwrap();
        let wire2: TruncatedSeriesWire = serde_json::from_str(&json).unwrap();
        let (ring2, series2) = TruncatedSeries::from_wire(&wire2).unwrap();
        assert_eq!(ring2, r);
        assert_eq!(series2, law.series);
        // tampering with the modulus is caught
        let mut bad = wire.clone();
        bad.modulus = vec!["2".into(), "0".into()];
        assert!(matches!(TruncatedSeries::from_wire(&bad), Err(LtError::Malformed(_))));
    }

    #[test]
    fn congruence_respects_ring_precision() {
        let r = ring(3, 1);
        let x = TruncatedSeries::variable(&r, 1, 4, 0).unwrap();
        let mut bumped = x.clone();
        let offset = r.from_rationals(vec![BigRational::from_integer(BigInt::from(
            3i64.pow(8),
        ))])
        .unwrap();
        bumped.insert(vec![3], offset);
        assert!(x.congruent_through(&r, &bumped, 4).unwrap());
        assert!(!x.equal_through(&bumped, 4).unwrap());
    }
}
