//! Invariants as property tests.

use std::f64::consts::PI;

use proptest::prelude::*;
use zenograph::coupling::{couple, log_potential, reflect, rescale};
use zenograph::dynamics::{
    case_state, evolve_contraction, evolve_ring, evolve_unitary_full, ring_state, FullGraphState, Grid,
};
use zenograph::graph::{char_closed, kappa_of, livsic_closed, weyl_closed, GraphSpec};
use zenograph::halfline::{spectral_distribution, BoundaryCondition, HalfLineState};
use zenograph::herglotz::{
    char_from_livsic, herglotz_eval, livsic_from_weyl, weyl_from_livsic, CharFn, Extended, HalfPlanePoint,
    HerglotzMeasure, VonNeumannParam,
};
use zenograph::monitoring::{estimate_decay_rate, monitored_survival, predicted_tau, Scenario};
use zenograph::stable::{params_from_tails, stable_cf, StableLawParams};
use zenograph::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn upper() -> impl Strategy<Value = Complex64> {
    (-20.0..20.0f64, 0.01..10.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn phase() -> impl Strategy<Value = Complex64> {
    (-PI..PI).prop_map(|a| Complex64::from_polar(1.0, a))
}

fn disk() -> impl Strategy<Value = Complex64> {
    (0.0..0.95f64, -PI..PI).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn spec() -> impl Strategy<Value = GraphSpec> {
    (0..3usize, 0.05..0.95f64, 0.1..4.0f64, phase()).prop_map(|(case, k, ell, theta)| {
        match case {
            0 => GraphSpec::gate(k, theta),
            1 => GraphSpec::interval(ell, theta),
            _ => GraphSpec::appendix(k, ell, theta),
        }
        .unwrap()
    })
}

fn measure() -> impl Strategy<Value = HerglotzMeasure> {
    prop_oneof![
        (0.1..3.0f64).prop_map(|r| HerglotzMeasure::constant_density(r).unwrap()),
        (-2.0..2.0f64, 0.5..3.0f64, 0.1..2.0f64).prop_map(|(o, s, w)| HerglotzMeasure::lattice(o, s, w).unwrap()),
        (0.2..2.0f64, 0.0..0.9f64, 0.3..3.0f64, -PI..PI)
            .prop_map(|(a, r, l, p)| HerglotzMeasure::poisson(a, r, l, p).unwrap()),
        prop::collection::vec((-5.0..5.0f64, 0.1..2.0f64), 1..6).prop_map(|a| HerglotzMeasure::discrete(a).unwrap()),
    ]
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cayley_round_trip(z in upper(), s in disk()) {
        let m = weyl_from_livsic(s).unwrap();
        prop_assert!(close(livsic_from_weyl(Extended::Finite(m)), s, 1e-12));
        prop_assert!(close(weyl_from_livsic(livsic_from_weyl(Extended::Finite(z))).unwrap(), z, 1e-12));
    }

    #[test]
    fn char_map_is_an_involution(s in disk(), kappa in disk()) {
        let k = VonNeumannParam::new(kappa).unwrap();
        let twice = char_from_livsic(char_from_livsic(s, k).unwrap(), k).unwrap();
        prop_assert!(close(twice, s, 1e-12));
    }

    #[test]
    fn graph_functions_are_bounded(spec in spec(), z in upper()) {
        prop_assert!(livsic_closed(&spec, z).unwrap().norm() < 1.0);
        prop_assert!(weyl_closed(&spec, z).unwrap().im > 0.0);
        prop_assert!(char_closed(&spec, z).unwrap().norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn triple_consistency(spec in spec(), z in upper()) {
        let kappa = VonNeumannParam::new(kappa_of(&spec).unwrap()).unwrap();
        let s = livsic_closed(&spec, z).unwrap();
        prop_assert!(close(char_from_livsic(s, kappa).unwrap(), char_closed(&spec, z).unwrap(), 1e-10));
    }

    #[test]
    fn reference_rotation_is_constant(k in 0.05..0.95f64, ell in 0.1..4.0f64, t1 in phase(), t2 in phase(), z in upper(), w in upper()) {
        let a = GraphSpec::appendix(k, ell, t1).unwrap();
        let b = GraphSpec::appendix(k, ell, t2).unwrap();
        let r1 = char_closed(&a, z).unwrap() / char_closed(&b, z).unwrap();
        let r2 = char_closed(&a, w).unwrap() / char_closed(&b, w).unwrap();
        prop_assert!((r1.norm() - 1.0).abs() < 1e-12);
        prop_assert!(close(r1, r2, 1e-12));
    }

    #[test]
    fn coupled_moduli_and_potentials_add(a in spec(), b in spec(), z in upper()) {
        let (s1, s2) = (CharFn::Graph(a), CharFn::Graph(b));
        let p = couple(&s1, &s2);
        let v1 = s1.eval(z).unwrap();
        let v2 = s2.eval(z).unwrap();
        prop_assert!((p.eval(z).unwrap().norm() - v1.norm() * v2.norm()).abs() <= 1e-15);
        prop_assert!((p.eval(I).unwrap().norm() - s1.eval(I).unwrap().norm() * s2.eval(I).unwrap().norm()).abs() <= 1e-15);
        let g = log_potential(p.inner(), z).unwrap();
        let g1 = log_potential(&s1, z).unwrap();
        let g2 = log_potential(&s2, z).unwrap();
        prop_assert!((g - g1 - g2).abs() <= 1e-12 * g.abs().max(1.0));
    }

    #[test]
    fn rescale_composes_projectively(a1 in 0.2..3.0f64, b1 in -2.0..2.0f64, a2 in 0.2..3.0f64, b2 in -2.0..2.0f64, z in upper()) {
        let s = CharFn::ProductForm { k: 0.6, ell: 1.3, phase: Complex64::new(1.0, 0.0) };
        let nested = rescale(&rescale(&s, a1, b1).unwrap().0, a2, b2).unwrap();
        let direct = rescale(&s, a1 * a2, a2 * b1 + b2).unwrap();
        prop_assert!(nested.eval(z).unwrap().norm() <= 1.0);
        let grid = [z, I, Complex64::new(1.0, 0.5)];
        prop_assert!(nested.projective_distance(&direct, &grid).unwrap() < 1e-12);
    }

    #[test]
    fn reflection_is_an_involution(x in -3.0..3.0f64, t in 0.1..3.0f64, z in upper()) {
        let s = CharFn::RankOne { measure: HerglotzMeasure::discrete(vec![(x, 1.0)]).unwrap(), t };
        prop_assert!(close(reflect(&reflect(&s)).eval(z).unwrap(), s.eval(z).unwrap(), 1e-15));
        prop_assert!(s.eval(z).unwrap().norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn stable_cf_modulus_and_symmetry(alpha in 0.1..2.0f64, beta in -1.0..1.0f64, sigma in 0.1..3.0f64, t in -5.0..5.0f64) {
        let p = StableLawParams::new(alpha, beta, 0.3, sigma).unwrap();
        let v = stable_cf(&p, t);
        prop_assert!((v.norm() - (-sigma * t.abs().powf(alpha)).exp()).abs() <= 1e-14);
        prop_assert!(close(stable_cf(&p, -t), v.conj(), 1e-14));
    }

    #[test]
    fn symmetric_stable_convolution(alpha in 0.1..2.0f64, b1 in 0.1..2.0f64, b2 in 0.1..2.0f64, t in -4.0..4.0f64) {
        let p = StableLawParams::new(alpha, 0.0, 0.0, 1.0).unwrap();
        let b = (b1.powf(alpha) + b2.powf(alpha)).powf(1.0 / alpha);
        let lhs = stable_cf(&p, b1 * t) * stable_cf(&p, b2 * t);
        prop_assert!((lhs - stable_cf(&p, b * t)).norm() <= 1e-12);
    }

    #[test]
    fn tail_parameters_are_homogeneous(c1 in 0.0..2.0f64, c2 in 0.01..2.0f64, s in 0.1..10.0f64, alpha in 0.1..1.9f64) {
        let p = params_from_tails(c1, c2, alpha).unwrap();
        let q = params_from_tails(s * c1, s * c2, alpha).unwrap();
        prop_assert!((q.sigma - s * p.sigma).abs() <= 1e-12 * q.sigma.abs().max(1.0));
        prop_assert!((q.beta - p.beta).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn herglotz_positivity_and_normalisation(mu in measure(), z in upper()) {
        let m = herglotz_eval(&mu, HalfPlanePoint::new(z.re, z.im).unwrap()).unwrap();
        prop_assert!(m.im > 0.0);
        let norm = mu.normalization().unwrap();
        prop_assert!(norm > 0.0 && norm.is_finite());
    }

    #[test]
    fn spectral_measures_are_normalised(spec in spec()) {
        let n = zenograph::graph::spectral_measure(&spec).unwrap().normalization().unwrap();
        prop_assert!((n - 1.0).abs() < 1e-6, "{n}");
    }

    #[test]
    fn ring_group_is_unitary(flux in -PI..PI, a in disk(), b in disk(), cells in 1..400u32) {
        let g = Grid::new(1.0 / 64.0, 1.0, 2.0).unwrap();
        let st = ring_state(1.0, &g, |x| a + b * (5.0 * x).cos()).unwrap();
        let out = evolve_ring(&st, flux, cells as f64 / 64.0).unwrap();
        prop_assert!((out.norm_sq() - st.norm_sq()).abs() <= 1e-12 * st.norm_sq().max(1e-300));
    }

    #[test]
    fn semigroup_law_and_contraction(k in 0.05..0.95f64, m in 8..64u32, s in 0..200u32, u in 0..200u32, a in disk()) {
        let g = Grid::new(1.0 / 32.0, 1.0, 16.0).unwrap();
        let spec = GraphSpec::appendix(k, m as f64 / 32.0, Complex64::new(1.0, 0.0)).unwrap();
        let st = case_state(&spec, &g, |l, x| match l {
            "left" if x > -3.0 => a + (x * 2.0).sin(),
            "appendix" => a * x,
            _ => Complex64::new(0.0, 0.0),
        }).unwrap();
        let (s, u) = (s as f64 / 32.0, u as f64 / 32.0);
        let two = evolve_contraction(&evolve_contraction(&st, &spec, s).unwrap(), &spec, u).unwrap();
        let one = evolve_contraction(&st, &spec, s + u).unwrap();
        prop_assert_eq!(&two.data, &one.data);
        prop_assert!(one.norm_sq() <= st.norm_sq() * (1.0 + 1e-14));
    }

    #[test]
    fn interval_semigroup_is_nilpotent(m in 8..64u32, extra in 0..64u32, a in disk()) {
        let g = Grid::new(1.0 / 32.0, 1.0, 4.0).unwrap();
        let ell = m as f64 / 32.0;
        let spec = GraphSpec::interval(ell, Complex64::new(1.0, 0.0)).unwrap();
        let st = case_state(&spec, &g, |_, x| a + x).unwrap();
        let out = evolve_contraction(&st, &spec, ell + extra as f64 / 32.0).unwrap();
        prop_assert!(out.data.iter().flatten().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn full_group_conserves_norm(k in 0.0..1.0f64, a in disk(), cells in -128..128i32) {
        let g = Grid::new(1.0 / 32.0, 1.0, 12.0).unwrap();
        let st = FullGraphState::from_fn(0.0, &g, |x| if x.abs() < 3.0 { a + x } else { Complex64::new(0.0, 0.0) },
            |x| if x.abs() < 3.0 { a * (x * 3.0).cos() } else { Complex64::new(0.0, 0.0) }).unwrap();
        let out = evolve_unitary_full(&st, k, 0.0, cells as f64 / 32.0).unwrap();
        let (n0, n1) = (st.state().norm_sq(), out.state().norm_sq());
        prop_assert!((n1 - n0).abs() <= 1e-12 * n0);
    }

    #[test]
    fn kirchhoff_rule_after_evolution(k in 0.05..0.95f64, cells in 8..64u32, a in disk()) {
        let dx = 1.0 / 256.0;
        let g = Grid::new(dx, 1.0, 8.0).unwrap();
        let spec = GraphSpec::appendix(k, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        let f = move |x: f64| (a + 1.0) * (-(x + 1.0).powi(2)).exp();
        let st = case_state(&spec, &g, |l, x| if l == "left" { f(x) } else { Complex64::new(0.0, 0.0) }).unwrap();
        let out = evolve_contraction(&st, &spec, cells as f64 * dx).unwrap();
        let left = out.head_value("left").unwrap().norm_sqr();
        let right = out.tail_value("right").unwrap().norm_sqr();
        let app = out.tail_value("appendix").unwrap().norm_sqr();
        // |f'| ≤ 2 |a + 1| on this profile
        let tol = 2.0 * dx * 2.0 * (a + 1.0).norm() * 2.0 * (a + 1.0).norm();
        prop_assert!((left - right - app).abs() <= tol, "{left} vs {right} + {app}");
    }

    #[test]
    fn flux_periodicity(flux in -PI..PI, a in disk()) {
        let g = Grid::new(1.0 / 1024.0, 1.0, 1.0).unwrap();
        let f = |x: f64| a + x;
        let p1 = predicted_tau(&Scenario::ring(1.0, flux, &g, f).unwrap()).unwrap();
        let p2 = predicted_tau(&Scenario::ring(1.0, flux + 2.0 * PI, &g, f).unwrap()).unwrap();
        prop_assert!((p1 - p2).abs() <= 1e-12 * p1.max(1.0));
    }

    #[test]
    fn decay_rate_ignores_global_phase_and_gauge(rot in -PI..PI, chi in -3.0..3.0f64, w in 0.2..1.0f64) {
        let g = Grid::new(2f64.powi(-14), 1.0, 1.0).unwrap();
        // φ(0) = κ φ(ℓ): only Δ|φ|² remains
        let f = |x: f64| Complex64::new(w + x, 0.3 * x);
        let kappa = f(0.0) / f(1.0);
        let base = estimate_decay_rate(&Scenario::dissipative_ring(1.0, kappa, &g, f).unwrap(), 1.0, &zenograph::monitoring::default_ladder()).unwrap();
        let gauged = move |x: f64| f(x) * Complex64::from_polar(1.0, rot + chi * x * x);
        let kappa_g = gauged(0.0) / gauged(1.0);
        let other = estimate_decay_rate(&Scenario::dissipative_ring(1.0, kappa_g, &g, gauged).unwrap(), 1.0, &zenograph::monitoring::default_ladder()).unwrap();
        prop_assert!((base.tau_extrapolated - other.tau_extrapolated).abs() <= 0.02 * base.tau_extrapolated);
    }

    #[test]
    fn predicted_tau_vanishes_on_the_domain(theta in phase(), k in 0.05..0.95f64, a in disk(), kick in disk()) {
        let g = Grid::new(1.0 / 512.0, 1.0, 6.0).unwrap();
        let spec = GraphSpec::gate(k, theta).unwrap();
        let w = |x: f64| (-(x * x)).exp() * (1.0 - (x / 4.0).powi(2)).max(0.0).powi(2);
        let inside = Scenario::graph(spec, &g, |l, x| if l == "left" { (a + 1.0) * w(x) } else { -theta * (a + 1.0) * w(x) }).unwrap();
        prop_assert!(predicted_tau(&inside).unwrap() < 1e-6);
        let outside = Scenario::graph(spec, &g, |l, x| if l == "left" { (a + 1.0) * w(x) } else { (-theta * (a + 1.0) + kick + 0.1) * w(x) }).unwrap();
        prop_assert!(predicted_tau(&outside).unwrap() > 1e-6);
    }

    #[test]
    fn monitored_survival_decreases_in_t(a in disk(), flux in -PI..PI) {
        let g = Grid::new(2f64.powi(-12), 1.0, 1.0).unwrap();
        let scn = Scenario::ring(1.0, flux, &g, |x| a + 2.0 * x).unwrap();
        let mut last = 1.0;
        for j in 1..=8 {
            let p = monitored_survival(&scn, j as f64 * 0.25, 256).unwrap();
            prop_assert!(p <= last + 1e-3);
            last = p;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn half_line_distribution_is_monotone(rate in 0.5..2.0f64, gamma in -2.0..-0.1f64) {
        let st = HalfLineState::from_fn(|x| Complex64::new((-rate * x).exp() * (1.0 + x), 0.0), 2e-3, 40.0).unwrap();
        let d = spectral_distribution(&st, BoundaryCondition::Mixed(gamma)).unwrap();
        let mut last = 0.0;
        for l in [-10.0, -1.0, 0.0, 0.5, 2.0, 10.0, 100.0, 1e4] {
            let n = d.n(l).unwrap();
            prop_assert!(n >= last - 1e-12);
            last = n;
        }
        // Mixed tails decay like λ^{-3/2}: N(10⁵) is within 1e-6 of the total
        let total = d.n(1e5).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-6, "{total}");
    }
}
