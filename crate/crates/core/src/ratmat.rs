//! Exact linear algebra over the rationals.
//!
//! Everything here is arbitrary-precision `BigRational`: row reduction,
//! rank, nullspace, and a canonical [`Subspace`] type whose basis is kept in
//! reduced row echelon form so that subspace equality is plain structural
//! equality. No floating point enters at any stage.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational n/d.
pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Dense matrix of rationals, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Builds from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        RatMat::from_rows(rows.iter().map(|r| r.iter().map(|&n| rat(n)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> RatMat {
        let mut t = RatMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn add(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        RatMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &RatMat) -> RatMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        RatMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, r: &Rat) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * r).collect(),
        }
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = aik * other.at(k, j);
                    let cur = out.at(i, j) + t;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// Reduced row echelon form and pivot column indices. Pivot entries are
    /// scaled to 1 and each pivot column is cleared above and below.
    pub fn rref(&self) -> (RatMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.at(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.at(r, c).recip();
            for j in c..m.cols {
                let v = m.at(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.at(i, c).is_zero() {
                    continue;
                }
                let f = m.at(i, c).clone();
                for j in c..m.cols {
                    let v = m.at(i, j) - &f * m.at(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Unique solution of Mx = b for square invertible M; None otherwise.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        if self.rows != self.cols {
            return None;
        }
        let mut aug = RatMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() != self.cols || pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        Some((0..self.cols).map(|i| r.at(i, self.cols).clone()).collect())
    }

    /// Basis of the right kernel {v : Mv = 0}, one vector per free column.
    /// The basis is the standard one read off the RREF (free variable set to
    /// 1, others to 0), so it is canonical for a given matrix.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let (m, pivots) = self.rref();
        let piv_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if piv_of_col[f].is_some() {
                continue;
            }
            let mut vec = vec![Rat::zero(); self.cols];
            vec[f] = Rat::one();
            for (r, &c) in pivots.iter().enumerate() {
                vec[c] = -m.at(r, f).clone();
            }
            basis.push(vec);
        }
        basis
    }
}

impl fmt::Display for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A linear subspace of Q^n, stored as a basis in reduced row echelon form
/// with zero rows dropped. Two `Subspace` values are equal as Rust values
/// iff they are equal as subspaces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: RatMat,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: RatMat::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: RatMat::identity(ambient),
        }
    }

    /// Span of the given vectors.
    pub fn span(ambient: usize, vectors: &[Vec<Rat>]) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient));
        let stacked = RatMat::from_rows(vectors.to_vec());
        Subspace::from_row_space(ambient, &stacked)
    }

    /// Row space of a matrix.
    pub fn from_row_space(ambient: usize, m: &RatMat) -> Self {
        if m.rows() == 0 {
            return Subspace::zero(ambient);
        }
        assert_eq!(m.cols(), ambient);
        let (r, pivots) = m.rref();
        if pivots.is_empty() {
            return Subspace::zero(ambient);
        }
        let rows: Vec<Vec<Rat>> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace {
            ambient,
            basis: RatMat::from_rows(rows),
        }
    }

    /// Right kernel of a matrix, as a subspace of Q^cols.
    pub fn kernel_of(m: &RatMat) -> Self {
        Subspace::span(m.cols(), &m.nullspace())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.basis.rows()).map(|i| self.basis.row(i).to_vec()).collect()
    }

    /// Membership test by reducing v against the echelon basis.
    pub fn contains(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut v = v.to_vec();
        for i in 0..self.basis.rows() {
            let row = self.basis.row(i);
            let pivot = row.iter().position(|x| !x.is_zero()).unwrap();
            if !v[pivot].is_zero() {
                let f = v[pivot].clone();
                for (vj, rj) in v.iter_mut().zip(row) {
                    *vj -= &f * rj;
                }
            }
        }
        v.iter().all(|x| x.is_zero())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis_rows().iter().all(|v| self.contains(v))
    }

    /// Smallest subspace containing self and the extra vectors.
    pub fn extend(&self, extra: &[Vec<Rat>]) -> Subspace {
        let mut rows = self.basis_rows();
        rows.extend(extra.iter().cloned());
        Subspace::span(self.ambient, &rows)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        self.extend(&other.basis_rows())
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "subspace dim {} of Q^{}:\n{}",
            self.dim(),
            self.ambient,
            self.basis
        )
    }
}

/// Smallest power of 10 scaling heuristic is deliberately absent: callers
/// needing integer matrices should clear denominators themselves via
/// [`clear_denominators`].
pub fn clear_denominators(v: &[Rat]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| {
        let d = x.denom();
        let g = num_integer::Integer::gcd(&acc, d);
        acc / g * d
    });
    v.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// True iff every entry is an integer.
pub fn all_integral(v: &[Rat]) -> bool {
    v.iter().all(|x| x.denom().abs() == BigInt::one())
}
