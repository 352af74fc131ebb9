mod common;

use common::*;
use confinv::conformal::{conformal_length, conformal_state_at};
use confinv::inversive::{cusp_angle, torsion_angle, MobiusMap};
use confinv::rectifier::*;
use confinv::{ArcLengthMap, CurveSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(c: &CurveSpec, map: &ArcLengthMap, est: Estimator, normals: SphereNormals) -> EstimatorReport {
    let r = Rectifier::new(c, map).with_sphere_normals(normals);
    let s0 = 0.45 * map.total_length();
    r.estimate(est, s0, &r.default_schedule(est, s0).unwrap()).unwrap()
}

fn rel_error(r: &EstimatorReport) -> f64 {
    r.extrapolated_rel_error.unwrap()
}

#[test]
fn helix_estimators_reach_their_tolerances() {
    let (c, map) = helix();
    for (est, tol) in [
        (Estimator::Nu, 0.01),
        (Estimator::P, 0.02),
        (Estimator::T2Beta, 0.02),
        (Estimator::T2Gamma, 0.02),
        (Estimator::Q, 0.05),
        (Estimator::Kappa, 0.005),
        (Estimator::Tau, 0.005),
    ] {
        let r = report(&c, &map, est, SphereNormals::Gram);
        assert!(rel_error(&r) <= tol, "{}: {:e}", est.name(), rel_error(&r));
        assert!(r.skipped.is_empty());
    }
    let p = report(&c, &map, Estimator::P, SphereNormals::Gram);
    assert!(p.extrapolated.unwrap() < 0.0);
    assert!((p.reference.unwrap() - p.alternate_reference.unwrap()).abs() < 1e-12);
}

#[test]
fn trig_poly_estimators_match_the_analytic_pipeline() {
    let (c, map) = trig_poly();
    for (est, tol, normals) in [
        (Estimator::Nu, 0.02, SphereNormals::Gram),
        (Estimator::P, 0.02, SphereNormals::Gram),
        (Estimator::T2Beta, 0.02, SphereNormals::Gram),
        (Estimator::T2Gamma, 0.02, SphereNormals::Centers),
        (Estimator::Q, 0.05, SphereNormals::Gram),
    ] {
        let r = report(&c, &map, est, normals);
        assert!(rel_error(&r) <= tol, "{}: {:e}", est.name(), rel_error(&r));
    }
}

#[test]
fn beta_and_gamma_routes_agree() {
    for (c, map) in spatial_curves() {
        let b = report(&c, &map, Estimator::T2Beta, SphereNormals::Gram).extrapolated.unwrap();
        let g = report(&c, &map, Estimator::T2Gamma, SphereNormals::Centers).extrapolated.unwrap();
        assert!((b - g).abs() <= 0.04 * b.abs(), "{}: beta {b} gamma {g}", c.name());
    }
}

#[test]
fn cusp_leading_coefficient_is_universal() {
    for (c, map) in spatial_curves() {
        let r = report(&c, &map, Estimator::CuspLeading, SphereNormals::Gram);
        assert!(rel_error(&r) <= 0.01, "{}: {:e}", c.name(), rel_error(&r));
        assert!(r.fitted_order.unwrap() >= 1.5, "{}: order {:?}", c.name(), r.fitted_order);
    }
}

/// `ω⁴/8 - (1 - cos α) - Pω⁶` with the analytic `P` vanishes to order 7.
#[test]
fn cusp_remainder_after_p_term() {
    const ROUNDOFF_FLOOR: f64 = 1e-20;
    for (c, map) in [trig_poly(), torus_knot()] {
        let s0 = 0.45 * map.total_length();
        let p = conformal_state_at(&c, &map, s0).unwrap().p;
        let (hs, errs): (Vec<f64>, Vec<f64>) = (0..7)
            .map(|k| 0.2 * 0.5f64.powi(k))
            .map(|w| {
                let x = sample_conformal(&c, &map, s0, w, Window::new(-2, 4)).unwrap();
                let a = cusp_angle([&x[0], &x[1], &x[2], &x[3]]).unwrap();
                (w, (w.powi(4) / 8.0 - a.one_minus_cos - p * w.powi(6)).abs())
            })
            .filter(|(_, e)| *e > ROUNDOFF_FLOOR)
            .unzip();
        let (order, run) = fitted_order(&hs, &errs);
        assert!(run >= 3, "{}: {errs:?}", c.name());
        assert!(order.unwrap() >= 6.5, "{}: order {order:?}, {errs:?}", c.name());
    }
}

#[test]
fn planar_curve_has_no_torsion_estimate() {
    let (c, map) = curve("ellipse", &[2.0, 1.0]);
    let s0 = 1.2;
    let w = 0.05;
    let x = sample_conformal(&c, &map, s0, w, Window::symmetric(5)).unwrap();
    let b = torsion_angle([&x[0], &x[1], &x[2], &x[3], &x[4]]).unwrap();
    let t2 = 8.0 * b.one_minus_cos / w.powi(6);
    assert!(t2.abs() <= 1e-4, "{t2:e}");

    // Every sphere through planar points is a plane.
    let r = Rectifier::new(&c, &map);
    let rep = r.estimate(Estimator::T2Gamma, s0, &Schedule::geometric(0.1, 2.0, 4).unwrap()).unwrap();
    assert!(rep.steps.is_empty());
    assert_eq!(rep.skipped.len(), 4);
    assert!(rep.skipped.iter().all(|s| s.reason.contains("sphere")));
    assert!(rep.warnings.iter().any(|w| w.contains("no step")));
}

#[test]
fn torsion_estimate_is_mobius_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (c, map) in spatial_curves() {
        let s0 = 0.45 * map.total_length();
        let sched = Estimator::T2Beta.default_schedule();
        let plain = Rectifier::new(&c, &map).estimate(Estimator::T2Beta, s0, &sched).unwrap();
        let x = sample_conformal(&c, &map, s0, 0.2, Window::symmetric(5)).unwrap();
        let m = MobiusMap::random(&mut rng, &x);
        let mapped = Rectifier::new(&c, &map).with_mobius(m).estimate(Estimator::T2Beta, s0, &sched).unwrap();
        // 8/ω⁶ magnifies position roundoff; below ω = 0.05 it reaches 1e-6.
        for (a, b) in plain.steps.iter().zip(&mapped.steps).filter(|(a, _)| a.step >= 0.05) {
            assert!((a.estimate - b.estimate).abs() <= 1e-6 * a.estimate.abs().max(1.0), "{}: {} vs {}", c.name(), a.estimate, b.estimate);
        }
    }
}

#[test]
fn conformal_samples_are_equally_spaced() {
    for (c, map) in spatial_curves() {
        let s0 = 0.45 * map.total_length();
        let w = 0.05;
        let ss: Vec<f64> = (-2..=2).map(|k| confinv::conformal::omega_equidistant(&c, &map, s0, w, k).unwrap()).collect();
        for pair in ss.windows(2) {
            let gap = conformal_length(&c, &map, pair[0], pair[1], TOL).unwrap();
            assert!((gap - w).abs() <= 1e-10, "{}: {gap}", c.name());
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let (c, map) = trig_poly();
    let a = report(&c, &map, Estimator::Q, SphereNormals::Gram).to_json().unwrap();
    let b = report(&c, &map, Estimator::Q, SphereNormals::Gram).to_json().unwrap();
    assert_eq!(a, b);
}
