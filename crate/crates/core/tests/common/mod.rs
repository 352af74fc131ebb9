#![allow(dead_code)]

use std::sync::Arc;

use confinv::curve::ParametricCurve;
use confinv::{arclength_map, catalog_curve, ArcLengthMap, CurveSpec, Point3, Vector3};
use nalgebra::Matrix3;
use rand::Rng;

pub const TOL: f64 = 1e-13;

pub fn curve(name: &str, params: &[f64]) -> (CurveSpec, ArcLengthMap) {
    let c = catalog_curve(name, params).unwrap();
    let map = arclength_map(&c, TOL).unwrap();
    (c, map)
}

pub fn helix() -> (CurveSpec, ArcLengthMap) {
    curve("helix", &[2.0, 1.0])
}

pub fn trig_poly() -> (CurveSpec, ArcLengthMap) {
    curve("trig_poly", &[42.0, 3.0])
}

pub fn torus_knot() -> (CurveSpec, ArcLengthMap) {
    curve("torus_knot", &[2.0, 3.0, 2.0, 1.0])
}

/// The three non-planar catalog curves used throughout.
pub fn spatial_curves() -> Vec<(CurveSpec, ArcLengthMap)> {
    vec![helix(), trig_poly(), torus_knot()]
}

/// `x ↦ scale · R x + shift` applied to another curve; `R` may be improper.
#[derive(Debug)]
pub struct Transformed {
    pub inner: CurveSpec,
    pub linear: Matrix3<f64>,
    pub shift: Vector3,
}

impl ParametricCurve for Transformed {
    fn eval(&self, t: f64) -> Point3 {
        Point3::from(self.linear * self.inner.eval(t).coords + self.shift)
    }

    fn analytic_derivatives(&self, t: f64, order: usize) -> Option<Vec<Vector3>> {
        let d = self.inner.derivatives(t, order).ok()?;
        Some(d.into_iter().map(|v| self.linear * v).collect())
    }
}

pub fn transformed(inner: &CurveSpec, linear: Matrix3<f64>, shift: Vector3) -> (CurveSpec, ArcLengthMap) {
    let domain = inner.domain();
    let c = CurveSpec::new("transformed", Arc::new(Transformed { inner: inner.clone(), linear, shift }), domain).unwrap();
    let map = arclength_map(&c, TOL).unwrap();
    (c, map)
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let axis = loop {
        let v = random_vector(rng);
        if v.norm() > 0.1 {
            break v.normalize();
        }
    };
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    *nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).matrix()
}

pub fn random_vector<R: Rng>(rng: &mut R) -> Vector3 {
    Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_point<R: Rng>(rng: &mut R) -> Point3 {
    Point3::from(random_vector(rng))
}

/// Points whose pairwise distances are at least `min_gap`.
pub fn separated_points<R: Rng, const N: usize>(rng: &mut R, min_gap: f64) -> [Point3; N] {
    loop {
        let pts: [Point3; N] = std::array::from_fn(|_| random_point(rng));
        let ok = (0..N).all(|i| (i + 1..N).all(|j| (pts[i] - pts[j]).norm() >= min_gap));
        if ok {
            return pts;
        }
    }
}

/// Interior arc length, away from both ends.
pub fn random_s<R: Rng>(rng: &mut R, map: &ArcLengthMap) -> f64 {
    let l = map.total_length();
    rng.random_range(0.15 * l..0.85 * l)
}
