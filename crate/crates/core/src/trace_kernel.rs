//! The twist family on d-dimensional abelianizations.
//!
//! Coordinates are y_1..y_d, matching the generators x_1..x_d. For even d
//! the surface block is (a_i, b_i) = (y_{2i+1}, y_{2i+2}), for odd d it is
//! (y_{2i}, y_{2i+1}); the remaining low coordinates ride along untouched
//! except that, for even d, the extra twist phi adds y_2 into y_1.
//!
//! [`TwistFamily::for_degree`] builds the family matrices directly from the
//! coordinate formulas; [`TwistFamily::from_word_family`] abelianizes the
//! word-level substitutions instead. The two constructions are independent
//! routes to the same matrices and are cross-checked in the tests.
//!
//! The geometric content: every family matrix is unipotent, the common fixed
//! covectors of the transposes cut out the invariant hyperplanes, and for
//! all degrees in range there is exactly one, namely
//!   span{y_1, y_3, ..., y_d}  (d even, y_2 omitted)
//!   span{y_2, y_3, ..., y_d}  (d odd,  y_1 omitted)
//! of dimension d - 1, as reported by [`predicted_kernel`].

use crate::ablin::{abelianize, AblinError, IntMatrix};
use crate::ratmat::{rat, Rat, RatMat, Subspace};
use crate::words::{twist_family, PresentationSpec, WordError};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceKernelError {
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(u32),
    #[error("family member {0} is not unipotent")]
    NotUnipotent(String),
    #[error("power exponent must be nonzero")]
    ZeroPower,
    #[error("the extra twist exists only in even degree, got {0}")]
    OddDegree(u32),
    #[error("line is inadmissible: the y_2 coordinate is zero")]
    InadmissibleLine,
    #[error("vector has length {got}, expected {want}")]
    WrongLength { got: usize, want: usize },
    #[error("word-level construction failed: {0}")]
    Word(#[from] WordError),
    #[error("abelianization failed: {0}")]
    Ablin(#[from] AblinError),
}

/// The abelianized twist family for degree d: named d x d unipotent integer
/// matrices, ordered phi (even d only), phi_1..phi_g, phi'_1..phi'_g,
/// phi''_1..phi''_{g-1}.
#[derive(Clone, Debug)]
pub struct TwistFamily {
    pub d: u32,
    pub g: u32,
    pub names: Vec<String>,
    pub mats: Vec<IntMatrix>,
}

/// 0-based coordinate index of y(a_i) in degree d.
pub fn a_index(d: u32, i: u32) -> usize {
    if d % 2 == 0 {
        (2 * i) as usize // y_{2i+1}
    } else {
        (2 * i - 1) as usize // y_{2i}
    }
}

/// 0-based coordinate index of y(b_i) in degree d.
pub fn b_index(d: u32, i: u32) -> usize {
    if d % 2 == 0 {
        (2 * i + 1) as usize // y_{2i+2}
    } else {
        (2 * i) as usize // y_{2i+1}
    }
}

impl TwistFamily {
    /// Builds the matrices straight from the coordinate formulas.
    pub fn for_degree(d: u32) -> Result<Self, TraceKernelError> {
        if d < 2 {
            return Err(TraceKernelError::DegreeTooSmall(d));
        }
        let g = if d % 2 == 0 { (d - 2) / 2 } else { (d - 1) / 2 };
        let n = d as usize;
        let mut names = Vec::new();
        let mut mats = Vec::new();

        if d % 2 == 0 {
            // phi: y_2 flows into y_1.
            let mut m = IntMatrix::identity(n);
            m.set(0, 1, 1);
            names.push("phi".to_string());
            mats.push(m);
        }
        for i in 1..=g {
            // phi_i: b_i -> b_i a_i, so column b_i gains the a_i row.
            let mut m = IntMatrix::identity(n);
            m.set(a_index(d, i), b_index(d, i), 1);
            names.push(format!("phi_{i}"));
            mats.push(m);
        }
        for i in 1..=g {
            // phi'_i: a_i -> a_i b_i^-1.
            let mut m = IntMatrix::identity(n);
            m.set(b_index(d, i), a_index(d, i), -1);
            names.push(format!("phi'_{i}"));
            mats.push(m);
        }
        for i in 1..g {
            // phi''_i columns: a_i picks up -b_i + b_{i+1},
            // a_{i+1} picks up +b_i - b_{i+1}; b rows are fixed.
            let (ai, bi) = (a_index(d, i), b_index(d, i));
            let (ai1, bi1) = (a_index(d, i + 1), b_index(d, i + 1));
            let mut m = IntMatrix::identity(n);
            m.set(bi, ai, -1);
            m.set(bi1, ai, 1);
            m.set(bi, ai1, 1);
            m.set(bi1, ai1, -1);
            names.push(format!("phi''_{i}"));
            mats.push(m);
        }
        Ok(TwistFamily { d, g, names, mats })
    }

    /// Builds the same family by abelianizing the word-level substitutions
    /// over the basis x_1..x_d.
    pub fn from_word_family(d: u32) -> Result<Self, TraceKernelError> {
        let spec = PresentationSpec::new(d).map_err(TraceKernelError::Word)?;
        let basis = spec.y_basis();
        let mut names = Vec::new();
        let mut mats = Vec::new();
        for e in twist_family(&spec) {
            names.push(e.name.clone());
            mats.push(abelianize(&e, &basis)?);
        }
        Ok(TwistFamily { d, g: spec.g, names, mats })
    }

    pub fn dimension(&self) -> usize {
        self.d as usize
    }

    /// The matrix of the extra twist phi (even degree only).
    pub fn phi_matrix(&self) -> Result<&IntMatrix, TraceKernelError> {
        if self.d % 2 != 0 {
            return Err(TraceKernelError::OddDegree(self.d));
        }
        Ok(&self.mats[0])
    }
}

/// The expected invariant hyperplane: all coordinates except y_2 (d even)
/// or y_1 (d odd). Dimension d - 1.
pub fn predicted_kernel(d: u32) -> Result<Subspace, TraceKernelError> {
    if d < 2 {
        return Err(TraceKernelError::DegreeTooSmall(d));
    }
    let n = d as usize;
    let skip = if d % 2 == 0 { 1 } else { 0 };
    let basis: Vec<Vec<Rat>> = (0..n)
        .filter(|&j| j != skip)
        .map(|j| {
            let mut v = vec![Rat::zero(); n];
            v[j] = rat(1);
            v
        })
        .collect();
    Ok(Subspace::span(n, &basis))
}

/// All hyperplanes preserved by every family member. Requires each matrix to
/// be unipotent ((M - I)^d = 0), which makes the invariant hyperplanes
/// exactly the kernels of the common fixed covectors of the transposes; one
/// hyperplane is returned per basis covector, so the list is complete
/// whenever the fixed-covector space is a single line.
pub fn invariant_hyperplanes(fam: &TwistFamily) -> Result<Vec<Subspace>, TraceKernelError> {
    let n = fam.dimension();
    let id = IntMatrix::identity(n);
    for (name, m) in fam.names.iter().zip(&fam.mats) {
        if !m.sub(&id).pow(fam.d).is_zero() {
            return Err(TraceKernelError::NotUnipotent(name.clone()));
        }
    }
    // Stack (M^T - I) over all M; the nullspace is the fixed covector space.
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for m in &fam.mats {
        let mt = m.transpose().sub(&id).to_ratmat();
        for i in 0..n {
            rows.push(mt.row(i).to_vec());
        }
    }
    let stacked = RatMat::from_rows(rows);
    let covectors = stacked.nullspace();
    Ok(covectors
        .iter()
        .map(|c| Subspace::kernel_of(&RatMat::from_rows(vec![c.clone()])))
        .collect())
}

/// Smallest subspace containing v and closed under M - I for every family
/// member: repeatedly applies each M - I to the current basis until the
/// dimension stops growing.
pub fn orbit_span(fam: &TwistFamily, v: &[Rat]) -> Result<Subspace, TraceKernelError> {
    let n = fam.dimension();
    if v.len() != n {
        return Err(TraceKernelError::WrongLength { got: v.len(), want: n });
    }
    let id = IntMatrix::identity(n);
    let deltas: Vec<RatMat> = fam.mats.iter().map(|m| m.sub(&id).to_ratmat()).collect();
    let mut span = Subspace::span(n, &[v.to_vec()]);
    loop {
        let mut extra = Vec::new();
        for b in span.basis_rows() {
            for delta in &deltas {
                let w = delta.mul_vec(&b);
                if !span.contains(&w) {
                    extra.push(w);
                }
            }
        }
        if extra.is_empty() {
            return Ok(span);
        }
        span = span.extend(&extra);
    }
}

/// n-th power of the extra twist in coordinates: I + n E_{12}. The closed
/// form holds because E_{12}^2 = 0.
pub fn phi_power(d: u32, n: i64) -> Result<IntMatrix, TraceKernelError> {
    if d < 2 {
        return Err(TraceKernelError::DegreeTooSmall(d));
    }
    if d % 2 != 0 {
        return Err(TraceKernelError::OddDegree(d));
    }
    let mut m = IntMatrix::identity(d as usize);
    m.set(0, 1, n);
    Ok(m)
}

/// True iff the n-th power of the extra twist moves the line spanned by v,
/// decided by an actual rank computation on (v, phi^n v). Admissible lines
/// must have a nonzero y_2 coordinate; n must be nonzero and d even.
pub fn phi_power_moves_line(d: u32, n: i64, v: &[Rat]) -> Result<bool, TraceKernelError> {
    if n == 0 {
        return Err(TraceKernelError::ZeroPower);
    }
    let m = phi_power(d, n)?;
    if v.len() != d as usize {
        return Err(TraceKernelError::WrongLength { got: v.len(), want: d as usize });
    }
    if v[1].is_zero() {
        return Err(TraceKernelError::InadmissibleLine);
    }
    let image = m.to_ratmat().mul_vec(v);
    let stacked = RatMat::from_rows(vec![v.to_vec(), image]);
    Ok(stacked.rank() == 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn e(n: usize, j: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); n];
        v[j] = rat(1);
        v
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rat> {
        (0..n).map(|_| rat(rng.gen_range(-5..=5))).collect()
    }

    // Draws until the predicate holds; the sampled sets below are generic,
    // so rejection terminates fast.
    fn random_vec_where(
        rng: &mut ChaCha8Rng,
        n: usize,
        pred: impl Fn(&[Rat]) -> bool,
    ) -> Vec<Rat> {
        loop {
            let v = random_vec(rng, n);
            if pred(&v) {
                return v;
            }
        }
    }

    #[test]
    fn direct_and_word_route_families_agree() {
        for d in 2..=9 {
            let direct = TwistFamily::for_degree(d).unwrap();
            let via_words = TwistFamily::from_word_family(d).unwrap();
            assert_eq!(direct.names, via_words.names, "names at d={d}");
            assert_eq!(direct.mats, via_words.mats, "matrices at d={d}");
        }
    }

    #[test]
    fn family_sizes_follow_the_counting_rule() {
        // even d: 1 + 2g + (g-1) members (g >= 1); odd d: 2g + (g-1).
        for (d, want) in [(2u32, 1usize), (3, 2), (4, 3), (5, 5), (6, 6), (7, 8), (8, 9), (9, 11)] {
            assert_eq!(TwistFamily::for_degree(d).unwrap().mats.len(), want, "d={d}");
        }
    }

    #[test]
    fn family_matrices_are_unipotent() {
        for d in 2..=9 {
            let fam = TwistFamily::for_degree(d).unwrap();
            let id = IntMatrix::identity(d as usize);
            for (name, m) in fam.names.iter().zip(&fam.mats) {
                assert!(m.sub(&id).pow(d).is_zero(), "{name} at d={d}");
            }
        }
    }

    #[test]
    fn predicted_kernel_shape() {
        for d in 2..=9 {
            let k = predicted_kernel(d).unwrap();
            let n = d as usize;
            assert_eq!(k.dim(), n - 1);
            if d % 2 == 0 {
                assert!(k.contains(&e(n, 0)));
                assert!(!k.contains(&e(n, 1)));
            } else {
                assert!(k.contains(&e(n, 1)));
                assert!(!k.contains(&e(n, 0)));
            }
        }
        assert!(predicted_kernel(1).is_err());
    }

    #[test]
    fn unique_invariant_hyperplane_matches_prediction() {
        for d in 2..=9 {
            let fam = TwistFamily::for_degree(d).unwrap();
            let planes = invariant_hyperplanes(&fam).unwrap();
            assert_eq!(planes.len(), 1, "d={d}");
            assert_eq!(planes[0], predicted_kernel(d).unwrap(), "d={d}");
        }
    }

    #[test]
    fn non_unipotent_family_is_rejected() {
        let mut fam = TwistFamily::for_degree(4).unwrap();
        let mut bad = IntMatrix::identity(4);
        bad.set(0, 0, 2);
        fam.mats.push(bad);
        fam.names.push("scale".to_string());
        assert_eq!(
            invariant_hyperplanes(&fam).unwrap_err(),
            TraceKernelError::NotUnipotent("scale".to_string())
        );
    }

    #[test]
    fn orbit_of_y2_in_degree_four_is_the_coordinate_plane() {
        // Only phi moves y_2, feeding y_1; nothing moves y_1. Expected span
        // {y_1, y_2}, worked out by hand from the matrix formulas.
        let fam = TwistFamily::for_degree(4).unwrap();
        let span = orbit_span(&fam, &e(4, 1)).unwrap();
        assert_eq!(span, Subspace::span(4, &[e(4, 0), e(4, 1)]));
    }

    #[test]
    fn orbit_span_contains_v_and_is_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4001);
        for d in 2..=8 {
            let fam = TwistFamily::for_degree(d).unwrap();
            let n = d as usize;
            let id = IntMatrix::identity(n);
            for _ in 0..10 {
                let v = random_vec(&mut rng, n);
                let span = orbit_span(&fam, &v).unwrap();
                assert!(span.contains(&v));
                for m in &fam.mats {
                    let delta = m.sub(&id).to_ratmat();
                    for b in span.basis_rows() {
                        assert!(span.contains(&delta.mul_vec(&b)));
                    }
                }
            }
        }
    }

    #[test]
    fn generic_vectors_have_full_orbit_span() {
        // Vectors with any zero coordinate can have smaller orbits (y_2 alone
        // spans only {y_1, y_2} in even degree), so degenerate draws are
        // rejected and resampled.
        let mut rng = ChaCha8Rng::seed_from_u64(4002);
        for d in 2..=8 {
            let fam = TwistFamily::for_degree(d).unwrap();
            let n = d as usize;
            for _ in 0..10 {
                let v = random_vec_where(&mut rng, n, |v| v.iter().all(|x| !x.is_zero()));
                assert!(orbit_span(&fam, &v).unwrap().is_full(), "d={d}");
            }
        }
    }

    fn coord(v: &[Rat], idx: usize) -> Rat {
        v[idx].clone()
    }

    #[test]
    fn claim_a_nonzero_b_coordinate_pulls_in_the_handle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4003);
        for d in 3..=8u32 {
            let fam = TwistFamily::for_degree(d).unwrap();
            let n = d as usize;
            for i in 1..=fam.g {
                let bi = b_index(d, i);
                for _ in 0..20 {
                    let v = random_vec_where(&mut rng, n, |v| !v[bi].is_zero());
                    let span = orbit_span(&fam, &v).unwrap();
                    assert!(span.contains(&e(n, a_index(d, i))), "d={d} i={i}");
                    assert!(span.contains(&e(n, bi)), "d={d} i={i}");
                }
            }
        }
    }

    #[test]
    fn claim_b_nonzero_a_coordinate_pulls_in_the_handle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4004);
        for d in 3..=8u32 {
            let fam = TwistFamily::for_degree(d).unwrap();
            let n = d as usize;
            for i in 1..=fam.g {
                let ai = a_index(d, i);
                for _ in 0..20 {
                    let v = random_vec_where(&mut rng, n, |v| !v[ai].is_zero());
                    let span = orbit_span(&fam, &v).unwrap();
                    assert!(span.contains(&e(n, ai)), "d={d} i={i}");
                    assert!(span.contains(&e(n, b_index(d, i))), "d={d} i={i}");
                }
            }
        }
    }

    #[test]
    fn claim_c_handles_propagate_upward() {
        let mut rng = ChaCha8Rng::seed_from_u64(4005);
        for d in 5..=8u32 {
            let fam = TwistFamily::for_degree(d).unwrap();
            let n = d as usize;
            for i in 1..fam.g {
                let ai = a_index(d, i);
                for _ in 0..20 {
                    let v = random_vec_where(&mut rng, n, |v| !v[ai].is_zero());
                    let span = orbit_span(&fam, &v).unwrap();
                    assert!(span.contains(&e(n, a_index(d, i + 1))), "d={d} i={i}");
                    assert!(span.contains(&e(n, b_index(d, i + 1))), "d={d} i={i}");
                }
            }
        }
    }

    #[test]
    fn claim_d_handles_propagate_downward() {
        let mut rng = ChaCha8Rng::seed_from_u64(4006);
        for d in 5..=8u32 {
            let fam = TwistFamily::for_degree(d).unwrap();
            let n = d as usize;
            for i in 1..fam.g {
                let ai1 = a_index(d, i + 1);
                for _ in 0..20 {
                    let v = random_vec_where(&mut rng, n, |v| !v[ai1].is_zero());
                    let span = orbit_span(&fam, &v).unwrap();
                    assert!(span.contains(&e(n, a_index(d, i))), "d={d} i={i}");
                    assert!(span.contains(&e(n, b_index(d, i))), "d={d} i={i}");
                }
            }
        }
    }

    #[test]
    fn double_twist_difference_identity_holds_entrywise() {
        // (phi''_i - I) v = (v_{a_{i+1}} - v_{a_i}) (e_{b_i} - e_{b_{i+1}}).
        let mut rng = ChaCha8Rng::seed_from_u64(4007);
        for d in 5..=8u32 {
            let fam = TwistFamily::for_degree(d).unwrap();
            let n = d as usize;
            let id = IntMatrix::identity(n);
            for i in 1..fam.g {
                let idx = fam.names.iter().position(|s| s == &format!("phi''_{i}")).unwrap();
                let delta = fam.mats[idx].sub(&id).to_ratmat();
                for _ in 0..20 {
                    let v = random_vec(&mut rng, n);
                    let lhs = delta.mul_vec(&v);
                    let factor = coord(&v, a_index(d, i + 1)) - coord(&v, a_index(d, i));
                    let mut rhs = vec![Rat::zero(); n];
                    rhs[b_index(d, i)] = factor.clone();
                    rhs[b_index(d, i + 1)] = -factor;
                    assert_eq!(lhs, rhs, "d={d} i={i}");
                }
            }
        }
    }

    #[test]
    fn phi_power_closed_form_matches_repeated_multiplication() {
        for d in [2u32, 4, 6, 8] {
            let fam = TwistFamily::for_degree(d).unwrap();
            let phi = fam.phi_matrix().unwrap();
            let inv = phi_power(d, -1).unwrap();
            assert!(phi.mul(&inv) == IntMatrix::identity(d as usize));
            for n in 1..=5i64 {
                assert_eq!(phi_power(d, n).unwrap(), phi.pow(n as u32), "d={d} n={n}");
                assert_eq!(phi_power(d, -n).unwrap(), inv.pow(n as u32), "d={d} n=-{n}");
            }
        }
    }

    #[test]
    fn phi_powers_move_admissible_lines() {
        let mut rng = ChaCha8Rng::seed_from_u64(4008);
        for d in [2u32, 4, 6, 8] {
            let n = d as usize;
            for _ in 0..50 {
                let v = random_vec_where(&mut rng, n, |v| !v[1].is_zero());
                for p in (-5..=5i64).filter(|&p| p != 0) {
                    assert!(phi_power_moves_line(d, p, &v).unwrap(), "d={d} p={p}");
                }
            }
        }
    }

    #[test]
    fn phi_power_error_cases() {
        let v2 = vec![rat(1), rat(1)];
        assert_eq!(phi_power_moves_line(2, 0, &v2).unwrap_err(), TraceKernelError::ZeroPower);
        assert_eq!(
            phi_power_moves_line(5, 1, &vec![rat(1); 5]).unwrap_err(),
            TraceKernelError::OddDegree(5)
        );
        assert_eq!(
            phi_power_moves_line(4, 1, &vec![rat(1), rat(0), rat(1), rat(1)]).unwrap_err(),
            TraceKernelError::InadmissibleLine
        );
        assert_eq!(
            phi_power_moves_line(4, 1, &v2).unwrap_err(),
            TraceKernelError::WrongLength { got: 2, want: 4 }
        );
    }
}
