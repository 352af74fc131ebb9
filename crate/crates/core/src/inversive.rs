//! Elementary inversive geometry: circles through three points and their
//! unit tangents, crossing angles between such circles, spheres through four
//! points, and Möbius transformations of 3-space.
//!
//! Every angle carries both its cosine and `1 - cos`. The latter is always
//! evaluated as `½|û - v̂|²` from unit vectors, which keeps full relative
//! precision when the angle is tiny.

use nalgebra::{Matrix3, Rotation3, Unit};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{Point3, Vector3};
use crate::error::{Error, Result};

/// Relative distance below which two points count as coincident.
pub const COINCIDENT_FLOOR: f64 = 1e-14;

/// `|z1·(z2×z3)| / diam³` below which four points count as coplanar.
pub const COPLANAR_FLOOR: f64 = 1e-13;

/// Cosine of an angle between two directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleCos {
    pub cos: f64,
    pub one_minus_cos: f64,
}

impl AngleCos {
    pub fn from_unit_vectors(u: &Vector3, v: &Vector3) -> Self {
        let u = u.normalize();
        let v = v.normalize();
        AngleCos {
            cos: u.dot(&v).clamp(-1.0, 1.0),
            one_minus_cos: 0.5 * (u - v).norm_squared(),
        }
    }

    pub fn angle(&self) -> f64 {
        // 2 asin(|u-v|/2) stays accurate near zero where acos does not.
        2.0 * (0.5 * (2.0 * self.one_minus_cos).sqrt()).min(1.0).asin()
    }
}

fn check_distinct(points: &[&Point3]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if !p.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::DegenerateInput(format!("point {} is not finite", i + 1)));
        }
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let scale = points[i].coords.norm().max(points[j].coords.norm());
            let d = (points[i] - points[j]).norm();
            if d <= COINCIDENT_FLOOR * scale || d == 0.0 {
                return Err(Error::DegenerateInput(format!("points {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

/// The circle (or line) through three ordered points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleTriple {
    pub points: [Point3; 3],
    pub x12: f64,
    pub x13: f64,
    pub x23: f64,
}

impl CircleTriple {
    pub fn new(p1: Point3, p2: Point3, p3: Point3) -> Result<Self> {
        check_distinct(&[&p1, &p2, &p3])?;
        Ok(CircleTriple {
            points: [p1, p2, p3],
            x12: (p1 - p2).norm(),
            x13: (p1 - p3).norm(),
            x23: (p2 - p3).norm(),
        })
    }

    /// Unit tangent at point `at ∈ {1, 2, 3}`, oriented along `p1 → p2 → p3`.
    /// Collinear triples give the line direction.
    pub fn tangent(&self, at: usize) -> Vector3 {
        let [x1, x2, x3] = &self.points;
        let (x12, x13, x23) = (self.x12, self.x13, self.x23);
        match at {
            1 => ((x2 - x1) * (x13 / x12) + (x1 - x3) * (x12 / x13)) / x23,
            2 => ((x3 - x2) * (x12 / x23) + (x2 - x1) * (x23 / x12)) / x13,
            3 => ((x1 - x3) * (x23 / x13) + (x3 - x2) * (x13 / x23)) / x12,
            _ => panic!("circle tangent index must be 1, 2 or 3, got {at}"),
        }
    }

    /// Tangent at one of the defining points, located by exact equality.
    pub fn tangent_at(&self, p: &Point3) -> Option<Vector3> {
        self.points.iter().position(|q| q == p).map(|i| self.tangent(i + 1))
    }

    /// Center of the circle; `None` for collinear triples.
    pub fn center(&self) -> Option<Point3> {
        let [p1, p2, p3] = &self.points;
        let a = p1 - p3;
        let b = p2 - p3;
        let axb = a.cross(&b);
        if axb.norm() <= 1e-13 * a.norm() * b.norm() {
            return None;
        }
        let offset = (b * a.norm_squared() - a * b.norm_squared()).cross(&axb) / (2.0 * axb.norm_squared());
        Some(p3 + offset)
    }

    pub fn radius(&self) -> Option<f64> {
        self.center().map(|c| (c - self.points[0]).norm())
    }
}

/// Unit tangent of the circle through `(p1, p2, p3)` at the point with index
/// `at`.
pub fn circle_tangent(c: &CircleTriple, at: usize) -> Vector3 {
    c.tangent(at)
}

/// A crossing angle between two circles evaluated twice: by a closed
/// distance-ratio formula and by the dot product of circle tangents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleAngle {
    /// Closed-form value, clamped to `[-1, 1]`.
    pub cos: f64,
    /// Dot product of the two unit tangents.
    pub tangent_cos: f64,
    /// `1 - cos` from the tangents, stable for small angles.
    pub one_minus_cos: f64,
    /// `|cos - tangent_cos|`.
    pub cross_check: f64,
}

impl CircleAngle {
    fn new(closed_form: f64, u: &Vector3, v: &Vector3) -> Self {
        let tangents = AngleCos::from_unit_vectors(u, v);
        let cos = closed_form.clamp(-1.0, 1.0);
        CircleAngle {
            cos,
            tangent_cos: tangents.cos,
            one_minus_cos: tangents.one_minus_cos,
            cross_check: (cos - tangents.cos).abs(),
        }
    }
}

fn dist(a: &Point3, b: &Point3) -> f64 {
    (a - b).norm()
}

/// Cusp angle at `x3` between the circle through `(x1, x2, x3)` and the
/// circle through `(x2, x3, x4)`.
pub fn cusp_angle(x: [&Point3; 4]) -> Result<CircleAngle> {
    let [x1, x2, x3, x4] = x;
    check_distinct(&[x1, x2, x3, x4])?;
    let (x12, x13, x14) = (dist(x1, x2), dist(x1, x3), dist(x1, x4));
    let (x23, x24, x34) = (dist(x2, x3), dist(x2, x4), dist(x3, x4));
    let num = (x13 * x24).powi(2) + (x34 * x12).powi(2) - (x23 * x14).powi(2);
    let closed = num / (2.0 * x12 * x24 * x13 * x34);
    let c123 = CircleTriple::new(*x1, *x2, *x3)?;
    let c234 = CircleTriple::new(*x2, *x3, *x4)?;
    Ok(CircleAngle::new(closed, &c123.tangent(3), &c234.tangent(2)))
}

pub fn cusp_angle_cos(x: [&Point3; 4]) -> Result<f64> {
    Ok(cusp_angle(x)?.cos)
}

/// Torsion angle at `x3` between the circle through `(x1, x2, x3)` and the
/// circle through `(x3, x4, x5)`.
pub fn torsion_angle(x: [&Point3; 5]) -> Result<CircleAngle> {
    let [x1, x2, x3, x4, x5] = x;
    check_distinct(&[x1, x2, x3, x4, x5])?;
    let d = |a, b| dist(a, b);
    let (x12, x13, x14, x15) = (d(x1, x2), d(x1, x3), d(x1, x4), d(x1, x5));
    let (x23, x24, x25) = (d(x2, x3), d(x2, x4), d(x2, x5));
    let (x34, x35, x45) = (d(x3, x4), d(x3, x5), d(x4, x5));
    let num = (x13 * x24 * x35).powi(2) + (x15 * x23 * x34).powi(2)
        - (x13 * x25 * x34).powi(2)
        - (x14 * x23 * x35).powi(2);
    let closed = num / (2.0 * x12 * x13 * x23 * x34 * x35 * x45);
    let c123 = CircleTriple::new(*x1, *x2, *x3)?;
    let c345 = CircleTriple::new(*x3, *x4, *x5)?;
    Ok(CircleAngle::new(closed, &c123.tangent(3), &c345.tangent(1)))
}

pub fn torsion_angle_cos(x: [&Point3; 5]) -> Result<f64> {
    Ok(torsion_angle(x)?.cos)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    Matrix3::from_fn(|i, j| m[i][j]).determinant()
}

/// Cramer coefficients `(A1, A2, A3)` and Gram determinant `D` for the
/// sphere through `z1, z2, z3` and the origin.
fn gram_coefficients(z1: &Vector3, z2: &Vector3, z3: &Vector3) -> ([f64; 3], f64) {
    let g = |a: &Vector3, b: &Vector3| a.dot(b);
    let (g11, g12, g13) = (g(z1, z1), g(z1, z2), g(z1, z3));
    let (g22, g23, g33) = (g(z2, z2), g(z2, z3), g(z3, z3));
    let a1 = det3([[g11, g12, g13], [g22, g22, g23], [g33, g23, g33]]);
    let a2 = det3([[g11, g11, g13], [g12, g22, g23], [g13, g33, g33]]);
    let a3 = det3([[g11, g12, g11], [g12, g22, g22], [g13, g23, g33]]);
    let d = det3([[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]]);
    ([a1, a2, a3], d)
}

fn check_not_coplanar(q: [&Point3; 4]) -> Result<()> {
    let z: Vec<Vector3> = q[..3].iter().map(|p| *p - q[3]).collect();
    let mut diam: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            diam = diam.max(dist(q[i], q[j]));
        }
    }
    let volume = z[0].dot(&z[1].cross(&z[2]));
    if !(volume.abs() > COPLANAR_FLOOR * diam.powi(3)) {
        return Err(Error::DegenerateSphere);
    }
    Ok(())
}

/// The sphere through four points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereQuad {
    pub points: [Point3; 4],
    /// Cramer numerators `A1, A2, A3` on the Gram matrix of `z_j = q_j - q4`.
    pub a: [f64; 3],
    /// Gram determinant.
    pub d: f64,
    pub center: Point3,
    pub radius: f64,
}

impl SphereQuad {
    /// `A1 z1 + A2 z2 + A3 z3`, pointing from `q4` towards the center.
    pub fn normal_at_q4(&self) -> Vector3 {
        let q4 = self.points[3];
        (0..3).fold(Vector3::zeros(), |acc, j| acc + (self.points[j] - q4) * self.a[j])
    }
}

/// Sphere through `q1..q4`, center `q4 + (A1 z1 + A2 z2 + A3 z3) / (2D)`.
pub fn circumsphere(q: [&Point3; 4]) -> Result<SphereQuad> {
    check_distinct(&q)?;
    check_not_coplanar(q)?;
    let z: Vec<Vector3> = q[..3].iter().map(|p| *p - q[3]).collect();
    let (a, d) = gram_coefficients(&z[0], &z[1], &z[2]);
    let offset = (z[0] * a[0] + z[1] * a[1] + z[2] * a[2]) / (2.0 * d);
    let center = q[3] + offset;
    Ok(SphereQuad {
        points: [*q[0], *q[1], *q[2], *q[3]],
        a,
        d,
        center,
        radius: offset.norm(),
    })
}

/// Circumcenter from cross products, independent of the Gram route.
pub fn circumcenter_by_cross_products(q: [&Point3; 4]) -> Result<Point3> {
    check_distinct(&q)?;
    check_not_coplanar(q)?;
    let z: Vec<Vector3> = q[..3].iter().map(|p| *p - q[3]).collect();
    let volume = z[0].dot(&z[1].cross(&z[2]));
    let num = z[1].cross(&z[2]) * z[0].norm_squared()
        + z[2].cross(&z[0]) * z[1].norm_squared()
        + z[0].cross(&z[1]) * z[2].norm_squared();
    Ok(q[3] + num / (2.0 * volume))
}

/// Angle at `x4` between the spheres through `(x1..x4)` and `(x2..x5)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereAngle {
    /// From the Gram normals `A1 z1 + A2 z2 + A3 z3` and `B2 z2 + B3 z3 + B5 z5`.
    pub cos: f64,
    pub one_minus_cos: f64,
    /// The same angle from normals `x_c - x4` with both centers computed by
    /// cross products. The Gram route squares the conditioning of the
    /// point configuration; this one does not.
    pub center_cos: f64,
    pub center_one_minus_cos: f64,
    /// `|n̂ - ĉ|` between the Gram normal `A1 z1 + A2 z2 + A3 z3` and the
    /// direction to the independently computed center of the first sphere.
    pub normal_alignment: f64,
}

pub fn sphere_angle(x: [&Point3; 5]) -> Result<SphereAngle> {
    let [x1, x2, x3, x4, x5] = x;
    check_distinct(&[x1, x2, x3, x4, x5])?;
    check_not_coplanar([x1, x2, x3, x4])?;
    check_not_coplanar([x2, x3, x4, x5])?;
    let (z1, z2, z3, z5) = (x1 - x4, x2 - x4, x3 - x4, x5 - x4);
    let ([a1, a2, a3], _) = gram_coefficients(&z1, &z2, &z3);
    let ([b5, b2, b3], _) = gram_coefficients(&z5, &z2, &z3);
    let n1 = z1 * a1 + z2 * a2 + z3 * a3;
    let n2 = z2 * b2 + z3 * b3 + z5 * b5;
    if !(n1.norm() > 0.0 && n2.norm() > 0.0) {
        return Err(Error::DegenerateSphere);
    }
    let angle = AngleCos::from_unit_vectors(&n1, &n2);
    let c1 = circumcenter_by_cross_products([x1, x2, x3, x4])?;
    let c2 = circumcenter_by_cross_products([x2, x3, x4, x5])?;
    let by_centers = AngleCos::from_unit_vectors(&(c1 - x4), &(c2 - x4));
    let normal_alignment = (n1.normalize() - (c1 - x4).normalize()).norm();
    Ok(SphereAngle {
        cos: angle.cos,
        one_minus_cos: angle.one_minus_cos,
        center_cos: by_centers.cos,
        center_one_minus_cos: by_centers.one_minus_cos,
        normal_alignment,
    })
}

pub fn sphere_angle_cos(x: [&Point3; 5]) -> Result<f64> {
    Ok(sphere_angle(x)?.cos)
}

/// One elementary conformal map of 3-space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MobiusOp {
    Translate([f64; 3]),
    /// Rotation matrix, row-major.
    Rotate([[f64; 3]; 3]),
    Dilate(f64),
    Invert { center: [f64; 3], radius: f64 },
}

impl MobiusOp {
    pub fn rotation(axis: Vector3, angle: f64) -> Self {
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        let m = r.matrix();
        MobiusOp::Rotate([
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ])
    }

    fn apply(&self, p: &Point3) -> Result<Point3> {
        Ok(match self {
            MobiusOp::Translate(v) => p + Vector3::from(*v),
            MobiusOp::Rotate(m) => {
                let m = Matrix3::from_fn(|i, j| m[i][j]);
                Point3::from(m * p.coords)
            }
            MobiusOp::Dilate(l) => Point3::from(p.coords * *l),
            MobiusOp::Invert { center, radius } => {
                let c = Point3::from(*center);
                let d = p - c;
                let d2 = d.norm_squared();
                if d2.sqrt() <= 1e-12 * radius {
                    return Err(Error::Pole([p.x, p.y, p.z]));
                }
                c + d * (radius * radius / d2)
            }
        })
    }

    fn inverse(&self) -> MobiusOp {
        match self {
            MobiusOp::Translate(v) => MobiusOp::Translate([-v[0], -v[1], -v[2]]),
            MobiusOp::Rotate(m) => MobiusOp::Rotate([
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ]),
            MobiusOp::Dilate(l) => MobiusOp::Dilate(1.0 / l),
            inv @ MobiusOp::Invert { .. } => inv.clone(),
        }
    }
}

/// A composition of translations, rotations, dilations and sphere
/// inversions, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub ops: Vec<MobiusOp>,
}

impl MobiusMap {
    pub fn identity() -> Self {
        MobiusMap::default()
    }

    pub fn then(mut self, op: MobiusOp) -> Self {
        self.ops.push(op);
        self
    }

    pub fn apply(&self, p: &Point3) -> Result<Point3> {
        self.ops.iter().try_fold(*p, |q, op| op.apply(&q))
    }

    pub fn apply_all(&self, points: &[Point3]) -> Result<Vec<Point3>> {
        points.iter().map(|p| self.apply(p)).collect()
    }

    pub fn inverse(&self) -> Self {
        MobiusMap { ops: self.ops.iter().rev().map(MobiusOp::inverse).collect() }
    }

    pub fn has_inversion(&self) -> bool {
        self.ops.iter().any(|op| matches!(op, MobiusOp::Invert { .. }))
    }

    /// Whether the ball bounded by the sphere through `q` is carried onto
    /// the ball bounded by the image sphere. An inversion centred inside the
    /// current sphere turns it inside out, which reverses the direction from
    /// a point on the sphere to its center.
    pub fn preserves_interior(&self, q: [&Point3; 4]) -> Result<bool> {
        let mut pts = [*q[0], *q[1], *q[2], *q[3]];
        let mut preserved = true;
        for op in &self.ops {
            if let MobiusOp::Invert { center, .. } = op {
                let s = circumsphere([&pts[0], &pts[1], &pts[2], &pts[3]])?;
                if (Point3::from(*center) - s.center).norm() < s.radius {
                    preserved = !preserved;
                }
            }
            for p in pts.iter_mut() {
                *p = op.apply(p)?;
            }
        }
        Ok(preserved)
    }

    /// A random similarity–inversion–similarity composition whose inversion
    /// center stays well away from the images of `keep_away`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, keep_away: &[Point3]) -> Self {
        let unit_vec = |rng: &mut R| loop {
            let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if v.norm() > 0.1 && v.norm() <= 1.0 {
                return v.normalize();
            }
        };
        let mut map = MobiusMap::identity()
            .then(MobiusOp::rotation(unit_vec(rng), rng.random_range(0.0..std::f64::consts::TAU)))
            .then(MobiusOp::Translate([
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]))
            .then(MobiusOp::Dilate(rng.random_range(0.5..2.0)));
        let images: Vec<Point3> = keep_away.iter().filter_map(|p| map.apply(p).ok()).collect();
        let centroid = if images.is_empty() {
            Point3::origin()
        } else {
            Point3::from(images.iter().fold(Vector3::zeros(), |a, p| a + p.coords) / images.len() as f64)
        };
        let spread = images.iter().map(|p| (p - centroid).norm()).fold(1.0f64, f64::max);
        let center = centroid + unit_vec(rng) * spread * rng.random_range(1.5..3.0);
        map = map
            .then(MobiusOp::Invert { center: center.coords.into(), radius: spread * rng.random_range(0.5..2.0) })
            .then(MobiusOp::rotation(unit_vec(rng), rng.random_range(0.0..std::f64::consts::TAU)));
        map
    }
}

pub fn mobius_apply(m: &MobiusMap, p: &Point3) -> Result<Point3> {
    m.apply(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn collinear_tangent_is_line_direction() {
        let c = CircleTriple::new(p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(3.0, 0.0, 0.0)).unwrap();
        for at in 1..=3 {
            let t = c.tangent(at);
            assert_relative_eq!(t, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        }
        assert!(c.center().is_none());
    }

    #[test]
    fn unit_circle_tangent_is_perpendicular_to_radius() {
        let c = CircleTriple::new(p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(-1.0, 0.0, 0.0)).unwrap();
        let t = c.tangent(2);
        assert!(t.dot(&Vector3::new(0.0, 1.0, 0.0)).abs() < 1e-12);
        assert_relative_eq!(t.norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(t, Vector3::new(-1.0, 0.0, 0.0), epsilon = 1e-12);
        assert_relative_eq!(c.center().unwrap(), Point3::origin(), epsilon = 1e-15);
        assert_relative_eq!(c.radius().unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn coincident_points_rejected() {
        let a = p(1.0, 2.0, 3.0);
        assert!(matches!(CircleTriple::new(a, a, p(0.0, 0.0, 0.0)), Err(Error::DegenerateInput(_))));
        assert!(matches!(cusp_angle([&a, &p(0.0, 1.0, 0.0), &a, &p(0.0, 0.0, 1.0)]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn concyclic_cusp_is_one() {
        let x = [p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(-1.0, 0.0, 0.0), p(0.0, -1.0, 0.0)];
        let a = cusp_angle([&x[0], &x[1], &x[2], &x[3]]).unwrap();
        assert_relative_eq!(a.cos, 1.0, epsilon = 1e-15);
        assert!(a.one_minus_cos < 1e-15);
    }

    #[test]
    fn concyclic_torsion_is_one() {
        let x: Vec<Point3> = (0..5).map(|k| {
            let t = 0.9 * k as f64;
            p(2.0 * t.cos(), 2.0 * t.sin(), 1.0)
        }).collect();
        let a = torsion_angle([&x[0], &x[1], &x[2], &x[3], &x[4]]).unwrap();
        assert_relative_eq!(a.cos, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn circumsphere_examples() {
        let s = circumsphere([&p(1.0, 0.0, 0.0), &p(-1.0, 0.0, 0.0), &p(0.0, 1.0, 0.0), &p(0.0, 0.0, 1.0)]).unwrap();
        assert_relative_eq!(s.center, Point3::origin(), epsilon = 1e-15);
        assert_relative_eq!(s.radius, 1.0, epsilon = 1e-15);

        let v = [p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(0.0, 0.0, 1.0), p(1.0, 1.0, 1.0)];
        let s = circumsphere([&v[0], &v[1], &v[2], &v[3]]).unwrap();
        assert_relative_eq!(s.center, p(0.5, 0.5, 0.5), epsilon = 1e-15);

        let shift = Vector3::new(5.0, 5.0, 5.0);
        let s = circumsphere([
            &(p(1.0, 0.0, 0.0) + shift),
            &(p(-1.0, 0.0, 0.0) + shift),
            &(p(0.0, 1.0, 0.0) + shift),
            &(p(0.0, 0.0, 1.0) + shift),
        ])
        .unwrap();
        assert_relative_eq!(s.center, p(5.0, 5.0, 5.0), epsilon = 1e-14);
    }

    #[test]
    fn coplanar_quadruple_is_degenerate() {
        let q = [p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0), p(1.0, 1.0, 0.0)];
        assert!(matches!(circumsphere([&q[0], &q[1], &q[2], &q[3]]), Err(Error::DegenerateSphere)));
    }

    #[test]
    fn five_cospherical_points_have_parallel_normals() {
        let dirs = [(0.3, 0.1), (1.2, 0.7), (2.0, -0.4), (2.9, 1.1), (4.4, 0.2)];
        let x: Vec<Point3> = dirs.iter().map(|&(a, b): &(f64, f64)| p(b.cos() * a.cos(), b.cos() * a.sin(), b.sin()) * 3.0).collect();
        let a = sphere_angle([&x[0], &x[1], &x[2], &x[3], &x[4]]).unwrap();
        assert_relative_eq!(a.cos.abs(), 1.0, epsilon = 1e-12);
        // mirror image: same cosine
        let m: Vec<Point3> = x.iter().map(|q| p(-q.x, q.y, q.z)).collect();
        let b = sphere_angle([&m[0], &m[1], &m[2], &m[3], &m[4]]).unwrap();
        assert_relative_eq!(a.cos, b.cos, epsilon = 1e-12);
    }

    #[test]
    fn inversion_examples() {
        let inv = MobiusMap::identity().then(MobiusOp::Invert { center: [0.0; 3], radius: 1.0 });
        assert_relative_eq!(inv.apply(&p(2.0, 0.0, 0.0)).unwrap(), p(0.5, 0.0, 0.0));
        let q = p(0.3, -1.2, 2.5);
        let twice = inv.clone().then(MobiusOp::Invert { center: [0.0; 3], radius: 1.0 });
        assert_relative_eq!(twice.apply(&q).unwrap(), q, epsilon = 1e-14);
        assert_eq!(MobiusMap::identity().apply(&q).unwrap(), q);
        assert!(matches!(inv.apply(&Point3::origin()), Err(Error::Pole(_))));
    }

    #[test]
    fn random_map_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = [p(1.0, 2.0, 0.5), p(-0.3, 0.1, 0.9)];
        for _ in 0..10 {
            let m = MobiusMap::random(&mut rng, &pts);
            assert!(m.has_inversion());
            let inv = m.inverse();
            for q in &pts {
                let back = inv.apply(&m.apply(q).unwrap()).unwrap();
                assert!((back - q).norm() <= 1e-10 * q.coords.norm());
            }
        }
    }

    #[test]
    fn stable_one_minus_cos_for_tiny_angles() {
        let u = Vector3::new(1.0, 0.0, 0.0);
        let v = Vector3::new(1.0, 1e-9, 0.0);
        let a = AngleCos::from_unit_vectors(&u, &v);
        assert_relative_eq!(a.one_minus_cos, 0.5e-18, max_relative = 1e-6);
        assert_relative_eq!(a.angle(), 1e-9, max_relative = 1e-9);
    }
}
