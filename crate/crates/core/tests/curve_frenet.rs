mod common;

use approx::assert_relative_eq;
use common::*;
use confinv::curve::point_at_s;
use confinv::frenet::{frenet_state, metric_cusp_angle, metric_plane_angle};
use confinv::rectifier::{sample_metric, Window};
use confinv::{Error, Point3, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn helix_anchor_and_one_unit_of_parameter() {
    let (c, map) = helix();
    let p = point_at_s(&c, &map, 0.0).unwrap();
    assert_relative_eq!(p, Point3::new(2.0, 0.0, 0.0), epsilon = 1e-15);
    let p = point_at_s(&c, &map, 5f64.sqrt()).unwrap();
    assert_relative_eq!(p, Point3::new(2.0 * 1f64.cos(), 2.0 * 1f64.sin(), 1.0), epsilon = 1e-11);
    assert!(matches!(point_at_s(&c, &map, map.total_length() + 1.0), Err(Error::Domain { .. })));
}

#[test]
fn finite_differences_track_analytic_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (c, _) in spatial_curves() {
        let fd = c.clone().with_finite_differences(1.0);
        let (lo, hi) = c.domain();
        for _ in 0..20 {
            let t = rng.random_range(lo + 0.1 * (hi - lo)..hi - 0.1 * (hi - lo));
            let exact = c.derivatives(t, 5).unwrap();
            let approx = fd.derivatives(t, 5).unwrap();
            for k in 0..5 {
                let rel = (approx[k] - exact[k]).norm() / exact[k].norm();
                let tol = if k < 3 { 1e-6 } else { 1e-3 };
                assert!(rel <= tol, "{} order {} at t = {t}: rel {rel:e}", c.name(), k + 1);
            }
        }
    }
}

#[test]
fn reparametrized_speed_is_one() {
    for (c, map) in spatial_curves() {
        let l = map.total_length();
        for i in 1..10 {
            let s = l * i as f64 / 10.0;
            let h = 1e-4;
            let a = point_at_s(&c, &map, s - h).unwrap();
            let b = point_at_s(&c, &map, s + h).unwrap();
            // Central difference error ~ κ²h²/6.
            assert!(((b - a).norm() / (2.0 * h) - 1.0).abs() < 1e-8, "{} at s = {s}", c.name());
        }
    }
}

/// `dT/ds = κN`, `dN/ds = -κT + τB`, `dB/ds = -τN`, checked by five-point
/// differences of the computed frame.
#[test]
fn frame_satisfies_frenet_serret() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (c, map) in spatial_curves() {
        for _ in 0..20 {
            let s = random_s(&mut rng, &map);
            let h = 1e-5;
            let f = frenet_state(&c, &map, s).unwrap();
            let at = |k: f64| frenet_state(&c, &map, s + k * h).unwrap();
            let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
            let d = |g: &dyn Fn(&confinv::frenet::FrenetState) -> Vector3| {
                (g(&p1) * 8.0 - g(&m1) * 8.0 - g(&p2) + g(&m2)) / (12.0 * h)
            };
            let dt = d(&|x| x.tangent());
            let dn = d(&|x| x.normal());
            let db = d(&|x| x.binormal());
            let r1 = (dt - f.normal() * f.kappa).norm();
            let r2 = (dn + f.tangent() * f.kappa - f.binormal() * f.tau).norm();
            let r3 = (db + f.normal() * f.tau).norm();
            assert!(r1.max(r2).max(r3) < 1e-6, "{} at s = {s}: {r1:e} {r2:e} {r3:e}", c.name());
            // The curvature and torsion derivatives against the same stencil.
            let dk = (8.0 * (p1.kappa - m1.kappa) - p2.kappa + m2.kappa) / (12.0 * h);
            let dtau = (8.0 * (p1.tau - m1.tau) - p2.tau + m2.tau) / (12.0 * h);
            assert!((dk - f.dkappa).abs() < 1e-6 * f.dkappa.abs().max(1.0));
            assert!((dtau - f.dtau).abs() < 1e-6 * f.dtau.abs().max(1.0));
        }
    }
}

#[test]
fn helix_metric_angle_leading_terms() {
    let (c, map) = helix();
    let s0 = 5.0;
    let eps = 1e-2;
    let x = sample_metric(&c, &map, s0, eps, Window::symmetric(3)).unwrap();
    let a = metric_cusp_angle(&x[0], &x[1], &x[2]).unwrap();
    assert_relative_eq!(a.one_minus_cos, 8e-6, max_relative = 0.01);

    let x = sample_metric(&c, &map, s0, eps, Window::symmetric(5)).unwrap();
    let g = metric_plane_angle([&x[0], &x[1], &x[2], &x[3], &x[4]]).unwrap();
    assert_relative_eq!(g.one_minus_cos, 8e-6, max_relative = 0.01);
}

/// Slope of `log|κ̂² - κ²|` (resp. `τ̂²`) against `log ε` over `ε = 0.1·2^-k`.
#[test]
fn squared_metric_estimators_have_order_two() {
    let (c, map) = trig_poly();
    let s0 = 0.45 * map.total_length();
    let f = frenet_state(&c, &map, s0).unwrap();
    let (mut hs, mut ek, mut et) = (vec![], vec![], vec![]);
    for k in 0..5 {
        let eps = 0.1 / 2f64.powi(k);
        let x = sample_metric(&c, &map, s0, eps, Window::symmetric(5)).unwrap();
        let a = metric_cusp_angle(&x[1], &x[2], &x[3]).unwrap();
        let g = metric_plane_angle([&x[0], &x[1], &x[2], &x[3], &x[4]]).unwrap();
        hs.push(eps.ln());
        ek.push((2.0 * a.one_minus_cos / (eps * eps) - f.kappa * f.kappa).abs().ln());
        et.push((g.one_minus_cos / (2.0 * eps * eps) - f.tau * f.tau).abs().ln());
    }
    for errs in [ek, et] {
        let slope = confinv::numeric::fit_slope(&hs, &errs).unwrap();
        assert!((slope - 2.0).abs() <= 0.3, "slope {slope}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chords_are_shorter_than_arcs(frac in 0.0f64..0.9, delta in 1e-6f64..1.0) {
        let (c, map) = trig_poly();
        let s = frac * map.total_length();
        let d = delta.min(map.total_length() - s);
        let a = point_at_s(&c, &map, s).unwrap();
        let b = point_at_s(&c, &map, s + d).unwrap();
        prop_assert!((b - a).norm() <= d * (1.0 + 1e-12));
    }

    #[test]
    fn frame_is_orthonormal(frac in 0.05f64..0.95) {
        let (c, map) = torus_knot();
        let f = frenet_state(&c, &map, frac * map.total_length()).unwrap();
        let (t, n, b) = (f.tangent(), f.normal(), f.binormal());
        for (u, v) in [(t, n), (n, b), (t, b)] {
            prop_assert!(u.dot(&v).abs() < 1e-12);
        }
        for u in [t, n, b] {
            prop_assert!((u.norm() - 1.0).abs() < 1e-12);
        }
    }
}
