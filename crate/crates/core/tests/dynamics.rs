mod common;

use dcf_admm::dynamics::{
    compare_iterates_to_ode, compare_with_scale, integrate, scaled_suboptimality_bound, GradientScale, OdeKind,
    OdeSystem,
};
use dcf_admm::objective::minimize_cg;
use dcf_admm::solver::{SolverConfig, Variant};

/// `f(w) = ½ Σ d_i w_i²`.
fn diagonal(d: Vec<f64>, w0: Vec<f64>, kind: OdeKind, alpha: f64) -> OdeSystem {
    let grad = Box::new(move |w: &[f64]| w.iter().zip(&d).map(|(a, b)| a * b).collect());
    OdeSystem::new(kind, alpha, grad, w0).unwrap()
}

fn quad(d: &[f64], w: &[f64]) -> f64 {
    0.5 * w.iter().zip(d).map(|(a, b)| b * a * a).sum::<f64>()
}

#[test]
fn optimum_stays_put() {
    let d = vec![1.0, 3.0];
    for kind in [OdeKind::FirstOrder, OdeKind::Accelerated { r: 4.0 }] {
        let sys = diagonal(d.clone(), vec![0.0, 0.0], kind, 1.1);
        let traj = integrate(&sys, 1.0, 100.0, 0.05).unwrap();
        assert!(traj.states.iter().all(|s| s.w.iter().all(|v| v.abs() < 1e-15)));
    }
}

#[test]
fn accelerated_energy_never_increases() {
    let d = vec![0.5, 2.0, 7.0];
    let sys = diagonal(d.clone(), vec![1.0, -2.0, 0.5], OdeKind::Accelerated { r: 4.0 }, 1.1);
    let c = sys.gradient_coefficient();
    let traj = integrate(&sys, 1e-3, 50.0, 1e-3).unwrap();
    let energy: Vec<f64> = traj
        .states
        .iter()
        .map(|s| quad(&d, &s.w) + s.v.iter().map(|v| v * v).sum::<f64>() / (2.0 * c))
        .collect();
    for pair in energy.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "{pair:?}");
    }
}

#[test]
fn trajectories_stay_bounded() {
    let mut r = common::rng(21);
    for _ in 0..20 {
        let w0 = common::random_tensor(&mut r, 2, 1, 5.0).into_vec();
        let d = vec![0.1, 1.0, 4.0, 10.0];
        let start = quad(&d, &w0);
        let sys = diagonal(d.clone(), w0, OdeKind::Accelerated { r: 3.0 }, 1.5);
        let traj = integrate(&sys, 0.01, 100.0, 0.01).unwrap();
        for s in &traj.states {
            assert!(quad(&d, &s.w) <= start + 1e-9);
        }
    }
}

#[test]
fn inverse_square_bound_holds() {
    let d = vec![0.3, 1.0, 2.5, 6.0];
    let sys = diagonal(
        d.clone(),
        vec![1.0, 1.0, -1.0, 0.5],
        OdeKind::Accelerated { r: 4.0 },
        1.1,
    );
    let traj = integrate(&sys, 1e-3, 100.0, 1e-2).unwrap();
    let samples: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| (*t, quad(&d, &s.w)))
        .collect();
    let check = scaled_suboptimality_bound(&samples, 0.0, 2.0, 0.1).unwrap();
    assert!(check.ratio <= 1.5, "{check:?}");
}

#[test]
fn starting_at_the_optimum_tracks_exactly() {
    let (_, prob) = common::random_problem(1, 4, 2, 10.0, 1.0);
    let w_star = minimize_cg(&prob, 1e-14, 5000).unwrap();
    for variant in Variant::ALL {
        let cfg = SolverConfig {
            rho: 100.0,
            ..SolverConfig::for_variant(variant)
        };
        let report = dcf_admm::dynamics::compare_iterates_to_ode_from(&prob, &cfg, 0.5, Some(&w_star)).unwrap();
        assert!(report.max_deviation < 1e-9, "{variant}: {}", report.max_deviation);
    }
}

#[test]
fn first_order_deviation_shrinks_with_rho() {
    let (_, prob) = common::random_problem(2, 4, 2, 10.0, 1.0);
    let dev = |rho: f64| {
        let cfg = SolverConfig {
            rho,
            ..SolverConfig::for_variant(Variant::Admm)
        };
        compare_iterates_to_ode(&prob, &cfg, 0.25).unwrap().max_deviation
    };
    let (a, b) = (dev(1e2), dev(1e3));
    assert!(b < a, "{a} {b}");
}

#[test]
fn alpha_coefficient_is_the_relaxed_limit() {
    // With α far from one only the α coefficient keeps converging.
    let (_, prob) = common::random_problem(3, 4, 2, 10.0, 1.0);
    let run = |rho: f64, scale| {
        let cfg = SolverConfig {
            rho,
            alpha: 1.5,
            ..SolverConfig::for_variant(Variant::RAdmm)
        };
        compare_with_scale(&prob, &cfg, 0.25, None, scale)
            .unwrap()
            .max_deviation
    };
    let alpha: Vec<f64> = [1e2, 1e3, 1e4].iter().map(|&r| run(r, GradientScale::Alpha)).collect();
    assert!(alpha[1] < alpha[0] && alpha[2] < alpha[1], "{alpha:?}");
    let published = run(1e4, GradientScale::InverseTwoMinusAlpha);
    assert!(published > 10.0 * alpha[2], "{published} vs {}", alpha[2]);
}
