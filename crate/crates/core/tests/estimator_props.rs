mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;
use rangeshape::estimator::{
    analytic_observation, estimate_from_traces, expected_nd, f_theta_x, length_error_sensitivity,
    two_pair_lambda, two_pair_solve, xi0_of, xi_candidates, EstimatorParams, Observation,
};
use rangeshape::harness::triangle;
use rangeshape::sim::{deploy_sensors, simulate_traces};
use rangeshape::{Angle, SimConfig};

/// Analytic observations from two sensors on the same side of the motion axis
/// (`cos ξ = μ sgn(sin θ)`, so only such pairs share `μ`) with distinct
/// durations.
fn observations(lambda: f64, xi: f64, t1: f64, t2: f64) -> Option<(Observation, Observation)> {
    if t1.sin() * t2.sin() <= 0.0 {
        return None;
    }
    let a = analytic_observation(lambda, Angle::new(xi), Angle::new(t1), 1.0)?;
    let b = analytic_observation(lambda, Angle::new(xi), Angle::new(t2), 1.0)?;
    let sep = (a.l_d - b.l_d).abs() / a.l_d.max(b.l_d);
    (sep > 1e-3).then_some((a, b))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 2000,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn two_pair_round_trip(
        lambda in 1.0f64..200.0,
        xi in 0.0f64..TAU,
        u1 in 0.001f64..0.999,
        u2 in 0.001f64..0.999,
    ) {
        // sensor directions on the edge's visible side
        let (t1, t2) = (xi + u1 * PI, xi + u2 * PI);
        prop_assume!(Angle::new(t1).sin().abs() > 1e-3 && Angle::new(t2).sin().abs() > 1e-3);
        let Some((a, b)) = observations(lambda, xi, t1, t2) else {
            return Ok(());
        };
        let (l, cands) = two_pair_solve(a, b, 1.0, 1e-3).edge().expect("solvable");
        prop_assert!((l - lambda).abs() <= 1e-9 * lambda, "{l} vs {lambda}");
        let truth = Angle::new(xi);
        prop_assert!(
            cands.iter().any(|c| c.approx_eq(truth, 1e-9)),
            "{truth:?} not in {cands:?}"
        );
    }

    #[test]
    fn f_matches_quadrature(
        theta in 0.0f64..FRAC_PI_2,
        cz in 1u8..=4,
        u in 0.0f64..1.0,
        w in 0.0f64..1.0,
        r in 1.0f64..200.0,
        q in 0.0f64..1.0,
    ) {
        let c = common::in_zone(cz, theta, u);
        let p = c + w * PI;
        let x = q * r;
        if let Ok(f) = f_theta_x(theta, x, Angle::new(p), Angle::new(c), r) {
            let oracle = common::f_quadrature(theta, x, p, c, r);
            prop_assert!((f - oracle).abs() <= 1e-6, "{f} vs {oracle}");
        }
    }

    #[test]
    fn mirrored_data_negates_candidates(
        lambda in 1.0f64..200.0,
        l in 1.0f64..200.0,
        s in 0.01f64..5.0,
    ) {
        let neg = Observation::new(l, -s);
        let pos = Observation::new(l, s);
        if let (Some(a), Some(b)) = (xi0_of(lambda, neg, 1.0), xi0_of(lambda, pos, 1.0)) {
            let ca = xi_candidates(a, neg.s_d);
            let cb = xi_candidates(b, pos.s_d);
            for (x, y) in ca.iter().zip(&cb) {
                prop_assert!(x.approx_eq(Angle::new(-y.radians()), 1e-12));
            }
        }
    }

    #[test]
    fn expected_nd_is_continuous(lambda in 1.0f64..200.0, xi in 0.0f64..TAU) {
        let cfg = SimConfig::default();
        let h = 1e-7;
        let a = expected_nd(lambda, Angle::new(xi), 1.0, 5000.0, &cfg);
        let b = expected_nd(lambda, Angle::new(xi + h), 1.0, 5000.0, &cfg);
        // |∂E/∂ξ| ≤ v m_t n_s · 2πλ / (2π|Ω|)
        let bound = 5000.0 * cfg.n_s as f64 * lambda / cfg.area();
        prop_assert!((a - b).abs() <= bound * h * 1.01 + 1e-12);
    }

    #[test]
    fn sensitivity_matches_finite_differences(
        lambda in 1.0f64..200.0,
        xi in 0.0f64..TAU,
        u1 in 0.01f64..0.99,
        u2 in 0.01f64..0.99,
    ) {
        let (t1, t2) = (xi + u1 * PI, xi + u2 * PI);
        prop_assume!(Angle::new(t1).sin().abs() > 1e-2 && Angle::new(t2).sin().abs() > 1e-2);
        let Some((a, b)) = observations(lambda, xi, t1, t2) else {
            return Ok(());
        };
        prop_assume!((a.l_d - b.l_d).abs() > 0.05 * a.l_d.max(b.l_d));
        let d = length_error_sensitivity(a, b, lambda, 1.0).unwrap();
        let fd = central_difference(a, b);
        prop_assert!((d - fd).abs() <= 1e-4 * fd.abs().max(1e-9), "{d} vs {fd}");
    }
}

/// `∂λ/∂l` of the two-pair length by central differences in `l` with `s`
/// fixed.
pub fn central_difference(a: Observation, b: Observation) -> f64 {
    let h = 1e-6 * a.l_d;
    let at = |l: f64| two_pair_lambda(Observation::new(l, a.s_d), b, 1.0).unwrap();
    (at(a.l_d + h) - at(a.l_d - h)) / (2.0 * h)
}

#[test]
fn expected_nd_vanishes_at_reach() {
    let cfg = SimConfig::default();
    let xi = Angle::new(1.1);
    let lambda = cfg.r_max / xi.sin();
    assert_eq!(expected_nd(lambda, xi, 1.0, 5000.0, &cfg), 0.0);
    assert_eq!(expected_nd(lambda * 1.01, xi, 1.0, 5000.0, &cfg), 0.0);
    assert!(expected_nd(lambda * 0.99, xi, 1.0, 5000.0, &cfg) > 0.0);
}

#[test]
fn estimation_is_deterministic() {
    let cfg = SimConfig {
        n_s: 800,
        seed: 19,
        ..SimConfig::default()
    };
    let run = || {
        let sensors = deploy_sensors(&cfg).unwrap();
        let traces = simulate_traces(&triangle(), &cfg, &sensors).unwrap().traces;
        estimate_from_traces(&traces, &cfg, &EstimatorParams::default()).unwrap().1
    };
    let (a, b) = (run(), run());
    assert_eq!(a.edges, b.edges);
    assert_eq!(a.shape, b.shape);
}
