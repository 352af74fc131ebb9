//! Frenet frame, curvature, torsion and their arc-length derivatives, plus
//! the two angle constructions on ordinary inscribed polygons.
//!
//! Derivatives are exact to roundoff: the parameter Taylor expansion of the
//! curve is reparametrized by arc length with truncated series arithmetic,
//! so `kappa'''` and `tau''` never go through nested finite differences.

use serde::{Deserialize, Serialize};

use crate::curve::{ArcLengthMap, CurveSpec, Point3, Vector3};
use crate::error::{Error, Result};
use crate::inversive::AngleCos;
use crate::series::{Series, VecSeries};

/// Curvature below this is treated as an inflection point.
pub const KAPPA_FLOOR: f64 = 1e-12;

/// Chord-length order needed for `kappa'''` and `tau''`.
pub const FRENET_ORDER: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetState {
    pub s: f64,
    /// Curve parameter at `s`.
    pub param: f64,
    pub point: [f64; 3],
    pub tangent: [f64; 3],
    pub normal: [f64; 3],
    pub binormal: [f64; 3],
    pub kappa: f64,
    pub tau: f64,
    pub dkappa: f64,
    pub ddkappa: f64,
    pub dddkappa: f64,
    pub dtau: f64,
    pub ddtau: f64,
}

impl FrenetState {
    pub fn tangent(&self) -> Vector3 {
        Vector3::from(self.tangent)
    }

    pub fn normal(&self) -> Vector3 {
        Vector3::from(self.normal)
    }

    pub fn binormal(&self) -> Vector3 {
        Vector3::from(self.binormal)
    }
}

/// Taylor series in arc length `σ = s - s0` of the curve, curvature and
/// torsion around one point.
#[derive(Clone, Debug)]
pub(crate) struct ArcJet {
    /// `x(s0 + σ) - x(s0)`.
    pub position: VecSeries,
    pub kappa: Series,
    pub tau: Series,
}

/// Reparametrizes the order-`order` parameter expansion at `t` by arc length.
pub(crate) fn arc_position_series(curve: &CurveSpec, t: f64, order: usize) -> Result<VecSeries> {
    let derivs = curve.derivatives(t, order)?;
    let axis = |i: usize| {
        let mut d = vec![0.0];
        d.extend(derivs.iter().map(|v| v[i]));
        Series::from_derivatives(&d)
    };
    let x = VecSeries([axis(0), axis(1), axis(2)]);
    let velocity = x.derivative();
    let speed = velocity
        .dot(&velocity)
        .sqrt()
        .ok_or(Error::DegenerateCurve { t, speed: derivs[0].norm() })?;
    let delta_of_sigma = speed.integral().revert().ok_or(Error::DegenerateCurve { t, speed: 0.0 })?;
    Ok(x.compose(&delta_of_sigma))
}

pub(crate) fn arc_jet(curve: &CurveSpec, t: f64, s: f64, order: usize) -> Result<ArcJet> {
    let position = arc_position_series(curve, t, order)?;
    let d1 = position.derivative();
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    let kappa_sq = d2.dot(&d2);
    let kappa0 = kappa_sq.coeff(0).max(0.0).sqrt();
    if !(kappa0 > KAPPA_FLOOR) {
        return Err(Error::Inflection { s, kappa: kappa0 });
    }
    let kappa = kappa_sq.sqrt().ok_or(Error::Inflection { s, kappa: kappa0 })?;
    let triple = d1.cross(&d2).dot(&d3);
    let tau = triple.div(&kappa_sq).ok_or(Error::Inflection { s, kappa: kappa0 })?;
    Ok(ArcJet { position, kappa, tau })
}

/// Frenet apparatus at curve parameter `t`; `s` is carried along as a label.
pub fn frenet_state_at_param(curve: &CurveSpec, t: f64, s: f64) -> Result<FrenetState> {
    let jet = arc_jet(curve, t, s, FRENET_ORDER)?;
    let tangent = Vector3::from(jet.position.coeff(1));
    let accel = Vector3::from(jet.position.coeff(2)) * 2.0;
    let kappa = jet.kappa.coeff(0);
    let normal = accel / kappa;
    let binormal = tangent.cross(&normal);
    Ok(FrenetState {
        s,
        param: t,
        point: curve.eval(t).coords.into(),
        tangent: tangent.into(),
        normal: normal.into(),
        binormal: binormal.into(),
        kappa,
        tau: jet.tau.coeff(0),
        dkappa: jet.kappa.derivative_at_zero(1),
        ddkappa: jet.kappa.derivative_at_zero(2),
        dddkappa: jet.kappa.derivative_at_zero(3),
        dtau: jet.tau.derivative_at_zero(1),
        ddtau: jet.tau.derivative_at_zero(2),
    })
}

/// Frenet apparatus at arc length `s`.
pub fn frenet_state(curve: &CurveSpec, map: &ArcLengthMap, s: f64) -> Result<FrenetState> {
    let t = map.t_of_s(s)?;
    frenet_state_at_param(curve, t, s)
}

fn unit(v: Vector3, what: &str) -> Result<Vector3> {
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::DegenerateInput(format!("{what} has zero length")));
    }
    Ok(v / n)
}

/// Angle between the straight edges `x1 → x2` and `x2 → x3`.
pub fn metric_cusp_angle(x1: &Point3, x2: &Point3, x3: &Point3) -> Result<AngleCos> {
    let u = unit(x1 - x2, "edge x1-x2")?;
    let v = unit(x2 - x3, "edge x2-x3")?;
    Ok(AngleCos::from_unit_vectors(&u, &v))
}

/// `(x1-x2)·(x2-x3) / (|x1-x2| |x2-x3|)`, clamped to `[-1, 1]`.
pub fn metric_cusp_cos(x1: &Point3, x2: &Point3, x3: &Point3) -> Result<f64> {
    Ok(metric_cusp_angle(x1, x2, x3)?.cos)
}

const COLLINEAR_FLOOR: f64 = 1e-13;

fn plane_normal(a: Vector3, b: Vector3) -> Result<Vector3> {
    let c = a.cross(&b);
    let scale = a.norm() * b.norm();
    if !(c.norm() > COLLINEAR_FLOOR * scale) {
        return Err(Error::DegeneratePlane);
    }
    Ok(c / c.norm())
}

/// Angle between the unit normals of the planes through `(x2, x3, x1)` and
/// `(x5, x3, x4)`.
pub fn metric_plane_angle(x: [&Point3; 5]) -> Result<AngleCos> {
    let [x1, x2, x3, x4, x5] = x;
    let n1 = plane_normal(x2 - x3, x1 - x3)?;
    let n2 = plane_normal(x5 - x3, x4 - x3)?;
    Ok(AngleCos::from_unit_vectors(&n1, &n2))
}

pub fn metric_plane_cos(x: [&Point3; 5]) -> Result<f64> {
    Ok(metric_plane_angle(x)?.cos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{arclength_map, catalog_curve};
    use approx::assert_relative_eq;

    #[test]
    fn helix_curvature_and_torsion() {
        let h = catalog_curve("helix", &[2.0, 1.0]).unwrap();
        let map = arclength_map(&h, 1e-12).unwrap();
        for &s in &[0.5, 3.0, 11.0] {
            let f = frenet_state(&h, &map, s).unwrap();
            assert_relative_eq!(f.kappa, 0.4, epsilon = 1e-13);
            assert_relative_eq!(f.tau, 0.2, epsilon = 1e-13);
            for d in [f.dkappa, f.ddkappa, f.dddkappa, f.dtau, f.ddtau] {
                assert!(d.abs() < 1e-12, "{d}");
            }
        }
    }

    #[test]
    fn circle_has_unit_curvature_no_torsion() {
        let c = catalog_curve("circle", &[1.0]).unwrap();
        let map = arclength_map(&c, 1e-12).unwrap();
        let f = frenet_state(&c, &map, 1.0).unwrap();
        assert_relative_eq!(f.kappa, 1.0, epsilon = 1e-13);
        assert!(f.tau.abs() < 1e-13);
    }

    #[test]
    fn line_is_an_inflection() {
        let l = catalog_curve("line", &[1.0, 2.0, 2.0]).unwrap();
        let map = arclength_map(&l, 1e-12).unwrap();
        assert!(matches!(frenet_state(&l, &map, 1.0), Err(Error::Inflection { .. })));
    }

    #[test]
    fn ellipse_curvature_derivative_matches_closed_form() {
        // kappa(t) = ab / (a² sin² t + b² cos² t)^{3/2}
        let (a, b) = (2.0f64, 1.0f64);
        let e = catalog_curve("ellipse", &[a, b]).unwrap();
        let kappa_t = |t: f64| a * b / (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).powf(1.5);
        let speed = |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
        let t = 0.8;
        let f = frenet_state_at_param(&e, t, 0.0).unwrap();
        assert_relative_eq!(f.kappa, kappa_t(t), epsilon = 1e-13);
        let h = 1e-5;
        let dk_dt = (kappa_t(t + h) - kappa_t(t - h)) / (2.0 * h);
        assert_relative_eq!(f.dkappa, dk_dt / speed(t), max_relative = 1e-8);
    }

    #[test]
    fn frame_is_orthonormal_and_right_handed() {
        let c = catalog_curve("trig_poly", &[42.0, 3.0]).unwrap();
        let f = frenet_state_at_param(&c, 1.1, 0.0).unwrap();
        let (t, n, b) = (f.tangent(), f.normal(), f.binormal());
        assert_relative_eq!(t.norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(n.norm(), 1.0, epsilon = 1e-12);
        assert!(t.dot(&n).abs() < 1e-12);
        assert_relative_eq!(t.cross(&n).dot(&b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn metric_cusp_examples() {
        let p = |x: f64| Point3::new(x, 0.0, 0.0);
        assert_relative_eq!(metric_cusp_cos(&p(0.0), &p(1.0), &p(2.0)).unwrap(), 1.0);
        assert_relative_eq!(metric_cusp_cos(&p(1.0), &p(0.0), &p(1.0)).unwrap(), -1.0);
        assert!(matches!(metric_cusp_cos(&p(1.0), &p(1.0), &p(2.0)), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn metric_plane_examples() {
        let pts: Vec<Point3> = (0..5).map(|i| Point3::new(i as f64, (i * i) as f64 * 0.1, 0.0)).collect();
        let c = metric_plane_cos([&pts[0], &pts[1], &pts[2], &pts[3], &pts[4]]).unwrap();
        assert_relative_eq!(c.abs(), 1.0, epsilon = 1e-12);
        let line: Vec<Point3> = (0..5).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        assert!(matches!(
            metric_plane_cos([&line[0], &line[1], &line[2], &line[3], &line[4]]),
            Err(Error::DegeneratePlane)
        ));
    }
}
