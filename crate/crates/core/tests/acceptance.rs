//! Acceptance gate: ten end-to-end criteria, one test and one printed
//! pass/fail line each, with the stated time budgets asserted.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use twistlab::ablin::{
    generate_quotient, is_symplectic, sp_order, symplectic_twist_matrices, IntMatrix,
    SymplecticForm,
};
use twistlab::finite_group::{
    catalogue_up_to, symmetric, verify_normalizer_lemma, GroupError,
};
use twistlab::lubin_tate::{
    formal_log, lt_endomorphism, lubin_tate_law, CoefficientRing, TruncatedSeries,
};
use twistlab::padic::{
    commutant_dimension, lie_dimension_lower_bound, padic_exp, padic_log,
    sp_bracket_nontrivial, sp_lie_dimension, PadicScalar,
};
use twistlab::ratmat::{rat, Rat};
use twistlab::trace_kernel::{
    a_index, b_index, invariant_hyperplanes, orbit_span, phi_power_moves_line,
    predicted_kernel, TwistFamily,
};
use twistlab::words::{fixes_delta_under, twist_family, PresentationSpec};

fn done(criterion: u32, what: &str, started: Instant, budget_secs: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("criterion {criterion}: pass ({what}; {elapsed:.2}s of {budget_secs}s budget)");
    assert!(
        elapsed < budget_secs,
        "criterion {criterion} exceeded its {budget_secs}s budget: {elapsed:.2}s"
    );
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rat> {
    (0..n).map(|_| rat(rng.gen_range(-5..=5))).collect()
}

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

fn unit(n: usize, j: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[j] = rat(1);
    v
}

#[test]
fn criterion_01_every_twist_fixes_the_boundary_word() {
    let started = Instant::now();
    for d in 3..=9 {
        let spec = PresentationSpec::new(d).unwrap();
        for e in twist_family(&spec) {
            assert!(
                fixes_delta_under(&spec, &e).unwrap(),
                "{} does not fix the boundary word at d={d}",
                e.name
            );
        }
    }
    done(1, "boundary word fixed exactly for d in 3..=9", started, 1.0);
}

#[test]
fn criterion_02_symplectic_matrices_and_quotient_orders() {
    let started = Instant::now();
    for g in 1..=4 {
        let form = SymplecticForm::standard(g);
        for m in symplectic_twist_matrices(g).unwrap() {
            assert!(is_symplectic(&m, &form), "g={g}");
        }
    }
    for (g, modulus, order) in [(1u32, 2u64, 6usize), (1, 3, 24), (2, 2, 720), (2, 3, 51840)] {
        let mats = symplectic_twist_matrices(g).unwrap();
        let quotient = generate_quotient(&mats, modulus, order + 1).unwrap();
        assert_eq!(quotient.len(), order, "g={g} mod {modulus}");
        assert_eq!(BigInt::from(order), sp_order(g, modulus).unwrap());
    }
    done(2, "M^T J M = J for g <= 4; quotient orders 6, 24, 720, 51840", started, 60.0);
}

#[test]
fn criterion_03_unique_invariant_hyperplane_matches_prediction() {
    let started = Instant::now();
    for d in 2..=9 {
        let fam = TwistFamily::for_degree(d).unwrap();
        let planes = invariant_hyperplanes(&fam).unwrap();
        assert_eq!(planes.len(), 1, "d={d}");
        assert_eq!(planes[0], predicted_kernel(d).unwrap(), "d={d}");
    }
    done(3, "exactly one invariant hyperplane, equal to the prediction, d in 2..=9", started, 1.0);
}

#[test]
fn criterion_04_orbit_span_claims_and_double_twist_identity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9004);
    // (a) nonzero b_i coordinate pulls in handle i
    for d in 3..=8u32 {
        let fam = TwistFamily::for_degree(d).unwrap();
        let n = d as usize;
        for i in 1..=fam.g {
            for _ in 0..20 {
                let v = random_vec_where(&mut rng, n, |v| !v[b_index(d, i)].is_zero());
                let span = orbit_span(&fam, &v).unwrap();
                assert!(span.contains(&unit(n, a_index(d, i))), "(a) d={d} i={i}");
                assert!(span.contains(&unit(n, b_index(d, i))), "(a) d={d} i={i}");
            }
        }
    }
    // (b) nonzero a_i coordinate pulls in handle i
    for d in 3..=8u32 {
        let fam = TwistFamily::for_degree(d).unwrap();
        let n = d as usize;
        for i in 1..=fam.g {
            for _ in 0..20 {
                let v = random_vec_where(&mut rng, n, |v| !v[a_index(d, i)].is_zero());
                let span = orbit_span(&fam, &v).unwrap();
                assert!(span.contains(&unit(n, a_index(d, i))), "(b) d={d} i={i}");
                assert!(span.contains(&unit(n, b_index(d, i))), "(b) d={d} i={i}");
            }
        }
    }
    // (c) handle i pulls in handle i+1
    for d in 5..=8u32 {
        let fam = TwistFamily::for_degree(d).unwrap();
        let n = d as usize;
        for i in 1..fam.g {
            for _ in 0..20 {
                let v = random_vec_where(&mut rng, n, |v| !v[a_index(d, i)].is_zero());
                let span = orbit_span(&fam, &v).unwrap();
                assert!(span.contains(&unit(n, a_index(d, i + 1))), "(c) d={d} i={i}");
                assert!(span.contains(&unit(n, b_index(d, i + 1))), "(c) d={d} i={i}");
            }
        }
    }
    // (d) handle i+1 pulls in handle i
    for d in 5..=8u32 {
        let fam = TwistFamily::for_degree(d).unwrap();
        let n = d as usize;
        for i in 1..fam.g {
            for _ in 0..20 {
                let v = random_vec_where(&mut rng, n, |v| !v[a_index(d, i + 1)].is_zero());
                let span = orbit_span(&fam, &v).unwrap();
                assert!(span.contains(&unit(n, a_index(d, i))), "(d) d={d} i={i}");
                assert!(span.contains(&unit(n, b_index(d, i))), "(d) d={d} i={i}");
            }
        }
    }
    // entrywise: (phi''_i - I) v = (v_{a_{i+1}} - v_{a_i}) (e_{b_i} - e_{b_{i+1}})
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
                let factor = v[a_index(d, i + 1)].clone() - v[a_index(d, i)].clone();
                let mut rhs = vec![Rat::zero(); n];
                rhs[b_index(d, i)] = factor.clone();
                rhs[b_index(d, i + 1)] = -factor;
                assert_eq!(lhs, rhs, "identity d={d} i={i}");
            }
        }
    }
    done(4, "claims (a)-(d) on 20 seeded vectors each, plus the entrywise identity", started, 5.0);
}

#[test]
fn criterion_05_twist_powers_move_admissible_lines() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9005);
    for d in [2u32, 4, 6, 8] {
        let n = d as usize;
        for power in -5i64..=5 {
            if power == 0 {
                continue;
            }
            for _ in 0..50 {
                let v = random_vec_where(&mut rng, n, |v| !v[1].is_zero());
                assert!(phi_power_moves_line(d, power, &v).unwrap(), "d={d} n={power}");
            }
        }
    }
    done(5, "phi^n moves all sampled admissible lines, n in [-5,5] minus 0", started, 1.0);
}

#[test]
fn criterion_06_dimension_comparison() {
    let started = Instant::now();
    for g in [1u32, 2] {
        let gens = symplectic_twist_matrices(g).unwrap();
        for p in [3u64, 5] {
            let got = lie_dimension_lower_bound(&gens, p, 8).unwrap();
            assert_eq!(got, (2 * g * g + g) as usize, "g={g} p={p}");
        }
    }
    for h in catalogue_up_to(12) {
        assert_eq!(commutant_dimension(&h), h.order(), "{}", h.name);
    }
    for g in 2..=4u32 {
        assert!(2 * g * g + g > 2 * g + 1, "g={g}");
    }
    // the g=1 exception: 2g^2+g = 3 = 2g+1, no strict gap
    assert_eq!(2 * 1 * 1 + 1, 2 * 1 + 1);
    done(
        6,
        "lie lower bound 2g^2+g for g in {1,2}, p in {3,5}; commutant = |H| through order 12; \
         strict gap for g in 2..=4 with the g=1 equality flagged",
        started,
        30.0,
    );
}

#[test]
fn criterion_07_sp_bracket_and_dimension_formula() {
    let started = Instant::now();
    assert!(sp_bracket_nontrivial());
    for g in 1..=4u32 {
        assert_eq!(sp_lie_dimension(g), (2 * g * g + g) as usize, "g={g}");
    }
    done(7, "[E12, E21] nonzero in sp2; sp dimension 2g^2+g for g <= 4", started, 1.0);
}

#[test]
fn criterion_08_lubin_tate_laws_at_degree_twelve() {
    let started = Instant::now();
    let degree = 12u16;
    for p in [3u64, 5] {
        for f in [1u32, 2] {
            let ring = CoefficientRing::new(p, f, 8).unwrap();
            let pi = ring.int(p as i64);
            let law = lubin_tate_law(&ring, &pi, ring.q(), degree).unwrap();
            let fser = &law.series;
            let tag = format!("p={p} f={f}");

            // commutativity
            for (e, c) in fser.terms() {
                assert_eq!(fser.coefficient(&[e[1], e[0]]), Some(c), "{tag}");
            }
            // associativity
            let x3 = TruncatedSeries::variable(&ring, 3, degree, 0).unwrap();
            let y3 = TruncatedSeries::variable(&ring, 3, degree, 1).unwrap();
            let z3 = TruncatedSeries::variable(&ring, 3, degree, 2).unwrap();
            let xy = fser.substitute(&ring, &[&x3, &y3]).unwrap();
            let yz = fser.substitute(&ring, &[&y3, &z3]).unwrap();
            let left = fser.substitute(&ring, &[&xy, &z3]).unwrap();
            let right = fser.substitute(&ring, &[&x3, &yz]).unwrap();
            assert!(left.congruent_through(&ring, &right, degree).unwrap(), "{tag}");
            // F(X, 0) = X
            let t = TruncatedSeries::variable(&ring, 1, degree, 0).unwrap();
            let zero1 = TruncatedSeries::zero(1, degree).unwrap();
            let fx0 = fser.substitute(&ring, &[&t, &zero1]).unwrap();
            assert!(fx0.congruent_through(&ring, &t, degree).unwrap(), "{tag}");
            // [pi] = pi t + t^q
            let mut frob = t.scalar_mul(&ring, &pi);
            if ring.q() <= degree as u64 {
                frob = frob.add(&ring, &t.pow(&ring, ring.q()).unwrap()).unwrap();
            }
            let pi_end = lt_endomorphism(&law, &pi, degree).unwrap();
            assert!(pi_end.congruent_through(&ring, &frob, degree).unwrap(), "{tag}");
            // [2] o [3] = [6]
            let two = lt_endomorphism(&law, &ring.int(2), degree).unwrap();
            let three = lt_endomorphism(&law, &ring.int(3), degree).unwrap();
            let six = lt_endomorphism(&law, &ring.int(6), degree).unwrap();
            let composed = two.substitute(&ring, &[&three]).unwrap();
            assert!(composed.congruent_through(&ring, &six, degree).unwrap(), "{tag}");
            // lambda(F) = lambda + lambda, and lambda o [a] = a lambda
            let lam = formal_log(&law, degree).unwrap();
            let x2 = TruncatedSeries::variable(&ring, 2, degree, 0).unwrap();
            let y2 = TruncatedSeries::variable(&ring, 2, degree, 1).unwrap();
            let lhs = lam.substitute(&ring, &[fser]).unwrap();
            let rhs = lam
                .substitute(&ring, &[&x2])
                .unwrap()
                .add(&ring, &lam.substitute(&ring, &[&y2]).unwrap())
                .unwrap();
            assert!(lhs.congruent_through(&ring, &rhs, degree).unwrap(), "{tag}");
            for a in [ring.int(2), pi.clone()] {
                let phi = lt_endomorphism(&law, &a, degree).unwrap();
                let composed = lam.substitute(&ring, &[&phi]).unwrap();
                let scaled = lam.scalar_mul(&ring, &a);
                assert!(composed.congruent_through(&ring, &scaled, degree).unwrap(), "{tag}");
            }
        }
    }
    done(8, "group law axioms and logarithm identities, p in {3,5}, f in {1,2}, D=12, N=8", started, 60.0);
}

fn is_even(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut transpositions = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut at = start;
        while !seen[at] {
            seen[at] = true;
            at = perm[at];
            len += 1;
        }
        transpositions += len - 1;
    }
    transpositions % 2 == 0
}

#[test]
fn criterion_09_normalizer_lemma_cases() {
    let started = Instant::now();
    let s4 = symmetric(4);
    let a4: Vec<usize> = (0..s4.group.order()).filter(|&i| is_even(s4.perm(i))).collect();
    assert_eq!(a4.len(), 12);
    let report = verify_normalizer_lemma(&s4.group, &a4).unwrap();
    assert!(report.all_pass());
    assert_eq!(report.normalizer_order, 2);
    assert_eq!(report.restriction_image_order, 2);

    let s3 = symmetric(3);
    let c3: Vec<usize> =
        (0..s3.group.order()).filter(|&i| s3.group.element_order(i) != 2).collect();
    assert_eq!(c3.len(), 3);
    let report = verify_normalizer_lemma(&s3.group, &c3).unwrap();
    assert!(report.all_pass());
    assert_eq!(report.normalizer_order, 2);
    assert_eq!(report.restriction_image_order, 2);

    // V4 is abelian and self-centralizing inside S4: hypotheses reject it
    let v4: Vec<usize> = (0..s4.group.order())
        .filter(|&i| {
            let perm = s4.perm(i);
            perm.iter().enumerate().all(|(a, &b)| perm[b] == a)
                && (perm.iter().enumerate().all(|(a, &b)| a == b)
                    || perm.iter().enumerate().all(|(a, &b)| a != b))
        })
        .collect();
    assert_eq!(v4.len(), 4);
    assert!(matches!(
        verify_normalizer_lemma(&s4.group, &v4),
        Err(GroupError::HypothesisViolated(_))
    ));
    done(9, "(S4, A4) and (S3, C3) verified with both sides of order 2; (S4, V4) rejected", started, 10.0);
}

#[test]
fn criterion_10_padic_soundness_thousand_cases() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9010);
    for case in 0..1000 {
        let p = *[3u64, 5, 7].choose(&mut rng).unwrap();
        let digits = rng.gen_range(4..12i64);
        let extra = rng.gen_range(1..6i64);
        let base = rng.gen_range(1..100i64);
        let mut k = rng.gen_range(1..(p as i64) * 5);
        if k % (p as i64) == 0 {
            k += 1;
        }
        // refinement: narrower input never loses agreed digits
        let coarse = PadicScalar::with_precision_int(p, base, digits).unwrap();
        let fine = PadicScalar::with_precision_int(p, base, digits + extra).unwrap();
        let factor = PadicScalar::exact_int(p, k).unwrap();
        let a = coarse.mul(&factor).unwrap();
        let b = fine.mul(&factor).unwrap();
        assert!(
            b.precision().unwrap() >= a.precision().unwrap(),
            "case {case}: refinement widened"
        );
        assert!(a.congruent(&b), "case {case}: refinement changed agreed digits");

        // round trip on a principal unit of valuation 1 or 2
        let mut lead = rng.gen_range(1..50i64);
        if lead % (p as i64) == 0 {
            lead += 1;
        }
        let step = (p as i64).pow(rng.gen_range(1..=2u32));
        let u = PadicScalar::with_precision_int(p, 1 + step * lead, digits).unwrap();
        let log = padic_log(&u).unwrap();
        let back = padic_exp(&log).unwrap();
        assert!(back.congruent(&u), "case {case}: exp(log u) != u");
        let forward = padic_log(&back).unwrap();
        assert!(forward.congruent(&log), "case {case}: log(exp l) != l");
    }
    done(10, "1000 seeded refinement cases and log/exp round trips", started, 10.0);
}
