mod common;

use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use proptest::prelude::*;

use common::{
    closed_system_holds, dpoly_at, is_farkas, is_solution, open_system_holds, order_conditions_hold, poly_at, q, qf,
    ssp_coefficient, vertex_enumeration_feasible,
};
use ssp_lmm::bounds::{existence_step_threshold, upper_bound};
use ssp_lmm::certificate::{
    analyze_roots, canonical_explicit_bound_certificate, canonical_implicit_bound_certificate, check_root_conditions,
    parse_certificate, square_certificate, verify_certificate, write_certificate, CertificatePolynomial, DualSystem,
};
use ssp_lmm::integrator::{lmm_integrate, TestProblem, VIOLATION_TOL};
use ssp_lmm::lp::{solve_feasibility, FeasibilityOutcome, FeasibilityProblem};
use ssp_lmm::optimizer::{extract_optimal_method, is_feasible, optimal_ssp, Feasibility, SspBracket, SspQuery};
use ssp_lmm::order::{order_residuals, threshold_factor, witness_to_method, MethodCoefficients, ThresholdFactor, Variant};
use ssp_lmm::rational::{format_rational, parse_rational, to_f64, Rational, RationalMatrix};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| qf(n, d))
}

fn nonneg_rational(max: i64) -> impl Strategy<Value = Rational> {
    (0i64..=max * 16, 1i64..=16).prop_map(|(n, d)| qf(n, d))
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Explicit), Just(Variant::Implicit)]
}

fn lp_problem(max_m: usize, max_n: usize) -> impl Strategy<Value = (Vec<Vec<Rational>>, Vec<Rational>)> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(small_rational(), n), m),
            prop::collection::vec(small_rational(), m),
        )
    })
}

fn to_problem(a: &[Vec<Rational>], b: &[Rational]) -> FeasibilityProblem {
    FeasibilityProblem::new(RationalMatrix::from_rows(a.to_vec()).unwrap(), b.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_outcome_reverifies((a, b) in lp_problem(5, 7)) {
        let lp = to_problem(&a, &b);
        let out = solve_feasibility(&lp);
        prop_assert!(out.verify(&lp));
        match out {
            FeasibilityOutcome::Feasible { x } => prop_assert!(is_solution(&a, &b, &x)),
            FeasibilityOutcome::Infeasible { y } => prop_assert!(is_farkas(&a, &b, &y)),
        }
    }

    #[test]
    fn lp_matches_vertex_enumeration((a, b) in lp_problem(3, 4)) {
        let out = solve_feasibility(&to_problem(&a, &b));
        prop_assert_eq!(out.is_feasible(), vertex_enumeration_feasible(&a, &b));
    }

    #[test]
    fn farkas_vector_is_normalized((a, b) in lp_problem(4, 5)) {
        if let FeasibilityOutcome::Infeasible { y } = solve_feasibility(&to_problem(&a, &b)) {
            let first = y.iter().find(|v| !v.is_zero()).unwrap();
            prop_assert_eq!(first.abs(), q(1));
        }
    }

    #[test]
    fn rational_text_round_trip(x in small_rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn decimal_input_is_exact(whole in -999i64..=999, frac in 0u32..10_000) {
        let text = format!("{whole}.{frac:04}");
        let mag = q(whole.abs()) + qf(frac as i64, 10_000);
        let want = if whole < 0 { -mag } else { mag };
        prop_assert_eq!(parse_rational(&text).unwrap(), want);
    }

    #[test]
    fn certificate_text_round_trip(
        coeffs in prop::collection::vec(small_rational(), 1..7),
        k in 1usize..15,
        r in nonneg_rational(5),
        system in prop_oneof![
            Just(DualSystem::OpenExplicit), Just(DualSystem::OpenImplicit),
            Just(DualSystem::ClosedExplicit), Just(DualSystem::ClosedImplicit),
        ],
    ) {
        prop_assume!(coeffs.iter().any(|c| !c.is_zero()));
        let c = CertificatePolynomial::new(coeffs, k, r, system).unwrap();
        prop_assert_eq!(parse_certificate(&write_certificate(&c)).unwrap(), c);
    }

    #[test]
    fn squaring_identity(coeffs in prop::collection::vec(small_rational(), 1..6), r in small_rational(), j in 0i64..12) {
        let sq: Vec<Rational> = {
            let mut out = vec![q(0); 2 * coeffs.len() - 1];
            for (a, ca) in coeffs.iter().enumerate() {
                for (b, cb) in coeffs.iter().enumerate() {
                    out[a + b] += ca * cb;
                }
            }
            out
        };
        let x = q(j);
        let lhs = -dpoly_at(&sq, &x) + q(2) * &r * poly_at(&sq, &x);
        let rhs = q(2) * poly_at(&coeffs, &x) * (-dpoly_at(&coeffs, &x) + &r * poly_at(&coeffs, &x));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn value_and_root_forms_agree(
        int_roots in prop::collection::vec((0usize..=8, 1usize..=3), 0..3),
        quad in prop::option::of((small_rational(), 1i64..=20)),
        lead in prop_oneof![Just(1i64), Just(-1), Just(3)],
        k in 1usize..=8,
        r in nonneg_rational(4),
    ) {
        // c · Π (x − λ)^m · ((x − a)² + b): integer roots plus a complex pair.
        let mut coeffs = vec![q(lead)];
        let mul = |c: &[Rational], f: &[Rational]| {
            let mut out = vec![q(0); c.len() + f.len() - 1];
            for (i, ci) in c.iter().enumerate() {
                for (j, fj) in f.iter().enumerate() {
                    out[i + j] += ci * fj;
                }
            }
            out
        };
        for &(root, m) in &int_roots {
            for _ in 0..m {
                coeffs = mul(&coeffs, &[-q(root as i64), q(1)]);
            }
        }
        if let Some((a, b)) = quad {
            coeffs = mul(&coeffs, &[&a * &a + q(b), q(-2) * &a, q(1)]);
        }
        prop_assume!(coeffs.len() >= 2);
        let cert = CertificatePolynomial::new(coeffs, k, r, DualSystem::OpenImplicit).unwrap();
        let analysis = analyze_roots(&cert);
        for j in 0..=k {
            let report = check_root_conditions(&cert, &analysis, j);
            prop_assert!(report.all_agree(), "j = {}: {:?}", j, report);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lp_witnesses_and_certificates_round_trip(v in variant(), k in 1usize..=6, p in 1usize..=4, r in nonneg_rational(3)) {
        match is_feasible(v, k, p, &r).unwrap() {
            Feasibility::Feasible(w) => {
                prop_assert!(w.verify());
                let m = witness_to_method(&w);
                prop_assert!(order_residuals(&m, p).iter().all(Zero::is_zero));
                prop_assert!(order_conditions_hold(&m.alpha, &m.beta, p));
                prop_assert!(threshold_factor(&m).at_least(&r));
                if let Some(c) = ssp_coefficient(&m.alpha, &m.beta) {
                    prop_assert!(c >= r);
                }
            }
            Feasibility::Infeasible(c) => {
                prop_assert!(verify_certificate(&c).verdict);
                prop_assert!(open_system_holds(&c.coefficients(), k, &r, v == Variant::Implicit));
            }
        }
    }

    #[test]
    fn feasibility_is_monotone_in_r(v in variant(), k in 1usize..=6, p in 1usize..=4, r1 in nonneg_rational(3), t in 0i64..=8) {
        let r0 = &r1 * qf(t, 8);
        if is_feasible(v, k, p, &r1).unwrap().is_feasible() {
            prop_assert!(is_feasible(v, k, p, &r0).unwrap().is_feasible());
        }
    }
}

#[test]
fn zero_rhs_terminates_feasible() {
    let a = RationalMatrix::from_i64_rows(&[&[1, -1, 0, 2], &[0, 0, 0, 0], &[-3, 3, 1, 0]]).unwrap();
    let lp = FeasibilityProblem::new(a, vec![q(0); 3]).unwrap();
    let out = solve_feasibility(&lp);
    assert!(out.is_feasible() && out.verify(&lp));
}

#[test]
fn squared_canonical_certificates_verify_at_twice_r() {
    for k in 1..=10 {
        for p in 1..=5 {
            let c = canonical_explicit_bound_certificate(k, p).unwrap();
            let sq = square_certificate(&c).unwrap();
            assert_eq!(sq.r(), &(q(2) * c.r()));
            assert_eq!(sq.system(), DualSystem::ClosedImplicit);
            assert!(verify_certificate(&sq).verdict);
            assert!(closed_system_holds(&sq.coefficients(), k, sq.r(), true));
        }
    }
}

fn grid() -> &'static Vec<SspBracket> {
    static GRID: OnceLock<Vec<SspBracket>> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut out = Vec::new();
        for v in [Variant::Explicit, Variant::Implicit] {
            for k in 1..=7 {
                for p in 1..=4 {
                    if let Ok(b) = optimal_ssp(&SspQuery::new(k, p, v)) {
                        out.push(b);
                    }
                }
            }
        }
        out
    })
}

fn cell(v: Variant, k: usize, p: usize) -> Option<&'static SspBracket> {
    grid().iter().find(|b| b.query.variant == v && b.query.k == k && b.query.p == p)
}

#[test]
fn optima_respect_closed_form_bounds() {
    for b in grid() {
        let SspQuery { k, p, variant, .. } = b.query;
        if variant == Variant::Implicit && p < 2 {
            continue;
        }
        let bound = upper_bound(variant, k, p).unwrap();
        assert!(b.r_lo <= bound.bound_value, "{variant} ({k},{p})");
        assert!(verify_certificate(&bound.certificate).verdict);
        assert_eq!(bound.certificate.r(), &bound.bound_value);
    }
}

#[test]
fn closed_certificates_cap_the_optimum() {
    for b in grid() {
        let SspQuery { k, p, variant, .. } = b.query;
        if variant == Variant::Implicit && p < 2 {
            continue;
        }
        let c = match variant {
            Variant::Explicit => canonical_explicit_bound_certificate(k, p).unwrap(),
            Variant::Implicit => canonical_implicit_bound_certificate(k, p).unwrap(),
        };
        assert!(b.r_lo <= c.r() + &b.query.tolerance);
    }
}

#[test]
fn optimum_is_nondecreasing_in_k() {
    for v in [Variant::Explicit, Variant::Implicit] {
        for p in 1..=4 {
            for k in 1..7 {
                if let (Some(a), Some(b)) = (cell(v, k, p), cell(v, k + 1, p)) {
                    let slack = q(2) * &a.query.tolerance;
                    assert!(&b.r_lo + &slack >= a.r_lo, "{v} p={p} k={k}");
                }
            }
        }
    }
}

#[test]
fn explicit_optimum_drops_with_order() {
    for k in 2..=7 {
        for p in 1..4 {
            let (a, b) = (cell(Variant::Explicit, k, p).unwrap(), cell(Variant::Explicit, k, p + 1).unwrap());
            let step = &a.r_hi - qf(1, k as i64 - 1);
            let cap = if step.is_negative() { q(0) } else { step } + q(2) * &a.query.tolerance;
            assert!(b.r_lo <= cap, "k={k} p={p}: {} > {}", b.r_lo, cap);
        }
    }
}

#[test]
fn existence_threshold_is_monotone() {
    let t: Vec<usize> = (1..=12).map(existence_step_threshold).collect();
    assert!(t.windows(2).all(|w| w[0] <= w[1]), "{t:?}");
}

fn ssp_methods() -> &'static Vec<(MethodCoefficients, f64)> {
    static METHODS: OnceLock<Vec<(MethodCoefficients, f64)>> = OnceLock::new();
    METHODS.get_or_init(|| {
        grid()
            .iter()
            .filter_map(|b| extract_optimal_method(b).ok())
            .filter_map(|m| match threshold_factor(&m) {
                ThresholdFactor::Finite(c) if c.is_positive() => Some((m, to_f64(&c))),
                _ => None,
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn forward_euler_step_never_grows_the_norm(frac in 0.0f64..=1.0) {
        for problem in [TestProblem::decay(), TestProblem::advection(40)] {
            let h = frac * problem.h_fe;
            let u = &problem.initial_state;
            let next = problem.forward_euler_step(u, h);
            prop_assert!(problem.norm.eval(&next) <= problem.norm.eval(u) + VIOLATION_TOL);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ssp_step_restriction_gives_monotone_runs(idx in any::<prop::sample::Index>(), frac in 0.05f64..=1.0) {
        let methods = ssp_methods();
        let (m, c) = &methods[idx.index(methods.len())];
        for problem in [TestProblem::decay(), TestProblem::advection(40)] {
            let h = frac * c * problem.h_fe;
            let run = lmm_integrate(m, &problem, h, 200).unwrap();
            prop_assert!(run.max_violation <= VIOLATION_TOL, "{:?} on {}: {:e}", m, problem.id, run.max_violation);
        }
    }
}

#[test]
fn observed_order_on_decay() {
    let problem = TestProblem::decay();
    for b in grid() {
        let SspQuery { k, p, .. } = b.query;
        let Ok(m) = extract_optimal_method(b) else { continue };
        let err = |h: f64, steps: usize| {
            let run = lmm_integrate(&m, &problem, h, steps).unwrap();
            (run.final_state[0] - (-run.final_time).exp()).abs()
        };
        let h = 0.05;
        let steps = 40;
        let e1 = err(h, steps);
        let e2 = err(h / 2.0, 2 * steps + k - 1);
        assert!(e1 / e2 >= 2f64.powf(p as f64 - 0.5), "({k},{p}) {:?}: {e1:e} -> {e2:e}", b.query.variant);
    }
}
