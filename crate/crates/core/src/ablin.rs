//! Abelianization and symplectic matrix checks.
//!
//! A substitution endomorphism abelianizes to an integer matrix once a basis
//! of generators is fixed: column j is the exponent vector of the image of
//! the j-th basis generator. Generators outside the basis must stay outside
//! (their images may not touch the basis), otherwise the matrix would not
//! describe the induced map on the chosen block.
//!
//! Against the standard alternating form J (block diagonal \[\[0,1\],\[-1,0\]\]
//! per handle, basis a1, b1, ..., ag, bg) the twist family abelianizes to
//! symplectic matrices. The finite quotients of the generated group are
//! explored by breadth-first closure over residue matrices mod m, with
//! orders checked against
//!   |Sp_2g(Z/p^k)| = p^{(k-1)(2g^2+g)} * p^{g^2} * prod_{i=1..g} (p^{2i} - 1).

use crate::ratmat::{rat, RatMat};
use crate::words::{Endomorphism, Gen};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AblinError {
    #[error("basis generator {0} is not in the endomorphism's domain")]
    BasisNotInDomain(Gen),
    #[error("image of basis generator {of} uses {uses}, which is outside the basis")]
    ImageLeavesBasis { of: Gen, uses: Gen },
    #[error("image of non-basis generator {of} touches basis generator {uses}")]
    NonBasisHitsBasis { of: Gen, uses: Gen },
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("modulus {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("generator is not invertible mod {0}")]
    NonInvertible(u64),
    #[error("quotient exceeds the element limit {0}; raise the limit to continue")]
    LimitExceeded(usize),
    #[error("generators must be square matrices of equal size")]
    ShapeMismatch,
    #[error(transparent)]
    Word(#[from] crate::words::WordError),
}

/// Square integer matrix, row-major. Entries stay well inside i64 for every
/// computation in this crate; products accumulate in i128 and are checked.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "not square");
        IntMatrix {
            n,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let mut out = IntMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s: i128 = 0;
                for k in 0..self.n {
                    s += self.at(i, k) as i128 * other.at(k, j) as i128;
                }
                out.set(i, j, i64::try_from(s).expect("entry overflow"));
            }
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        IntMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            n: self.n,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> IntMatrix {
        let mut out = IntMatrix::identity(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn to_ratmat(&self) -> RatMat {
        let rows: Vec<Vec<_>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| rat(self.at(i, j))).collect())
            .collect();
        RatMat::from_rows(rows)
    }

    pub fn reduce_mod(&self, m: u64) -> ResidueMatrix {
        ResidueMatrix {
            m,
            n: self.n,
            data: self.data.iter().map(|&v| v.rem_euclid(m as i64) as u64).collect(),
        }
    }

    /// Rows of decimal strings, the wire form used in reports.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j).to_string()).collect())
            .collect()
    }

    pub fn from_string_rows(rows: &[Vec<String>]) -> Option<IntMatrix> {
        let n = rows.len();
        let mut m = IntMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return None;
            }
            for (j, s) in row.iter().enumerate() {
                m.set(i, j, s.parse().ok()?);
            }
        }
        Some(m)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The standard alternating form on 2g coordinates ordered a1, b1, ..., ag, bg.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymplecticForm {
    pub g: u32,
    mat: IntMatrix,
}

impl SymplecticForm {
    pub fn standard(g: u32) -> Self {
        let n = 2 * g as usize;
        let mut j = IntMatrix::zeros(n);
        for i in 0..g as usize {
            j.set(2 * i, 2 * i + 1, 1);
            j.set(2 * i + 1, 2 * i, -1);
        }
        SymplecticForm { g, mat: j }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.mat
    }
}

/// Abelianizes an endomorphism over the given basis: column j is the exponent
/// vector of the image of basis\[j\]. Fails if a basis image strays outside
/// the basis, or a non-basis image touches it.
pub fn abelianize(e: &Endomorphism, basis: &[Gen]) -> Result<IntMatrix, AblinError> {
    let index: BTreeMap<Gen, usize> = basis.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut m = IntMatrix::zeros(basis.len());
    for (j, &bg) in basis.iter().enumerate() {
        let img = e.image(bg).ok_or(AblinError::BasisNotInDomain(bg))?;
        for (g, k) in img.exponent_sums() {
            let &i = index
                .get(&g)
                .ok_or(AblinError::ImageLeavesBasis { of: bg, uses: g })?;
            m.set(i, j, k);
        }
    }
    for g in e.domain() {
        if index.contains_key(&g) {
            continue;
        }
        let img = e.image(g).unwrap();
        for (h, _) in img.exponent_sums() {
            if index.contains_key(&h) {
                return Err(AblinError::NonBasisHitsBasis { of: g, uses: h });
            }
        }
    }
    Ok(m)
}

/// Abelianized images of the genus-g twist family on the basis
/// a1, b1, ..., ag, bg. Every returned matrix is 2g by 2g and symplectic.
pub fn symplectic_twist_matrices(g: u32) -> Result<Vec<IntMatrix>, AblinError> {
    let mut basis = Vec::new();
    for i in 1..=g {
        basis.push(Gen::A(i));
        basis.push(Gen::B(i));
    }
    crate::words::surface_twist_family(g)?
        .iter()
        .map(|e| abelianize(e, &basis))
        .collect()
}

/// M^T J M = J, exactly over the integers.
pub fn is_symplectic(m: &IntMatrix, form: &SymplecticForm) -> bool {
    if m.size() != form.mat.size() {
        return false;
    }
    m.transpose().mul(form.matrix()).mul(m) == *form.matrix()
}

/// |Sp_2g(Z/p^k)| for the prime power m = p^k.
pub fn sp_order(g: u32, m: u64) -> Result<BigInt, AblinError> {
    if m < 2 {
        return Err(AblinError::ModulusTooSmall(m));
    }
    let (p, k) = prime_power(m).ok_or(AblinError::NotPrimePower(m))?;
    let p = BigInt::from(p);
    let dim = 2 * (g as u64) * (g as u64) + g as u64;
    let mut order = p.pow((k - 1) as u32 * dim as u32);
    order *= p.pow(g * g);
    for i in 1..=g {
        order *= p.pow(2 * i) - BigInt::one();
    }
    Ok(order)
}

fn prime_power(m: u64) -> Option<(u64, u32)> {
    let mut p = 0;
    let mut q = m;
    for d in 2.. {
        if d * d > q {
            break;
        }
        if q % d == 0 {
            p = d;
            break;
        }
    }
    if p == 0 {
        return Some((m, 1)); // m itself is prime
    }
    let mut k = 0;
    while q % p == 0 {
        q /= p;
        k += 1;
    }
    if q == 1 {
        Some((p, k))
    } else {
        None
    }
}

/// Square matrix over Z/m. Ordering is lexicographic on the row-major entry
/// list, so a `BTreeSet<ResidueMatrix>` iterates in a canonical order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ResidueMatrix {
    m: u64,
    n: usize,
    data: Vec<u64>,
}

impl ResidueMatrix {
    pub fn identity(n: usize, m: u64) -> Self {
        let mut r = ResidueMatrix { m, n, data: vec![0; n * n] };
        for i in 0..n {
            r.data[i * n + i] = 1 % m;
        }
        r
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, other: &ResidueMatrix) -> ResidueMatrix {
        assert_eq!((self.n, self.m), (other.n, other.m));
        let mut out = ResidueMatrix { m: self.m, n: self.n, data: vec![0; self.n * self.n] };
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s: u128 = 0;
                for k in 0..self.n {
                    s += self.at(i, k) as u128 * other.at(k, j) as u128;
                }
                out.data[i * self.n + j] = (s % self.m as u128) as u64;
            }
        }
        out
    }

    pub fn transpose(&self) -> ResidueMatrix {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.data[j * self.n + i] = self.at(i, j);
            }
        }
        t
    }

    /// Binary exponentiation.
    pub fn pow(&self, mut e: u64) -> ResidueMatrix {
        let mut base = self.clone();
        let mut acc = ResidueMatrix::identity(self.n, self.m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == ResidueMatrix::identity(self.n, self.m)
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// Inverse of a symplectic residue matrix: M^-1 = -J M^T J. Verified against
// the actual product; a failure means the input was not symplectic mod m.
fn symplectic_inverse(r: &ResidueMatrix) -> Result<ResidueMatrix, AblinError> {
    let g = (r.n / 2) as u32;
    if r.n % 2 != 0 {
        return Err(AblinError::NonInvertible(r.m));
    }
    let j = SymplecticForm::standard(g).matrix().reduce_mod(r.m);
    let neg_j = SymplecticForm::standard(g).matrix().neg().reduce_mod(r.m);
    let cand = neg_j.mul(&r.transpose()).mul(&j);
    if cand.mul(r).is_identity() && r.mul(&cand).is_identity() {
        Ok(cand)
    } else {
        Err(AblinError::NonInvertible(r.m))
    }
}

/// Breadth-first closure of the group generated by the images of `gens`
/// mod m. Generators must be invertible mod m (symplectic inverses are
/// used, so they must be symplectic mod m). Fails if the closure exceeds
/// `limit` elements.
pub fn generate_quotient(
    gens: &[IntMatrix],
    m: u64,
    limit: usize,
) -> Result<BTreeSet<ResidueMatrix>, AblinError> {
    if m < 2 {
        return Err(AblinError::ModulusTooSmall(m));
    }
    let n = gens.first().ok_or(AblinError::ShapeMismatch)?.size();
    if gens.iter().any(|g| g.size() != n) {
        return Err(AblinError::ShapeMismatch);
    }
    let mut step = Vec::new();
    for g in gens {
        let r = g.reduce_mod(m);
        let inv = symplectic_inverse(&r)?;
        step.push(r);
        step.push(inv);
    }
    step.sort();
    step.dedup();

    let id = ResidueMatrix::identity(n, m);
    let mut seen: BTreeSet<ResidueMatrix> = BTreeSet::new();
    seen.insert(id.clone());
    let mut frontier = vec![id];
    while let Some(cur) = frontier.pop() {
        for s in &step {
            let next = cur.mul(s);
            if seen.insert(next.clone()) {
                if seen.len() > limit {
                    return Err(AblinError::LimitExceeded(limit));
                }
                frontier.push(next);
            }
        }
    }
    Ok(seen)
}
