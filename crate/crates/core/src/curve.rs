//! Parametric curves in 3-space with derivative access, the catalog of
//! analytic test curves, sampled polylines, and arc-length reparametrization.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric;

pub type Point3 = nalgebra::Point3<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;

/// Default lower bound on `|x'(t)|`.
pub const SPEED_FLOOR: f64 = 1e-12;

/// Highest derivative order available through finite differences.
pub const FD_MAX_ORDER: usize = 5;

/// Cap on analytic derivative orders requested from catalog curves.
pub const ANALYTIC_MAX_ORDER: usize = 16;

/// A smooth map from a real parameter into 3-space.
pub trait ParametricCurve: Send + Sync + fmt::Debug {
    fn eval(&self, t: f64) -> Point3;

    /// Parameter derivatives `[x'(t), ..., x^(order)(t)]`, if the curve knows
    /// them in closed form. Returns `None` when the curve only supports
    /// evaluation (derivatives then come from finite differences).
    fn analytic_derivatives(&self, t: f64, order: usize) -> Option<Vec<Vector3>>;

    /// Derivatives from an exact finite-difference rule native to the curve
    /// (sampled curves). `None` means the generic stencil is used.
    fn native_differences(&self, _t: f64, _order: usize) -> Option<Vec<Vector3>> {
        None
    }
}

/// Where derivatives of a [`CurveSpec`] come from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeSource {
    Analytic,
    /// Central differences with step `scale · eps^(1/(k+6))` for order `k`.
    FiniteDifference { scale: f64 },
}

/// A named parametric curve together with its parameter domain and the
/// source of its derivatives.
#[derive(Clone, Debug)]
pub struct CurveSpec {
    name: String,
    params: Vec<f64>,
    curve: Arc<dyn ParametricCurve>,
    domain: (f64, f64),
    source: DerivativeSource,
    sampled: bool,
}

impl CurveSpec {
    pub fn new(name: impl Into<String>, curve: Arc<dyn ParametricCurve>, domain: (f64, f64)) -> Result<Self> {
        let name = name.into();
        let source = if curve.analytic_derivatives(domain.0, 1).is_some() {
            DerivativeSource::Analytic
        } else {
            DerivativeSource::FiniteDifference { scale: 1.0 }
        };
        let spec = CurveSpec { name, params: Vec::new(), curve, domain, source, sampled: false };
        spec.check_domain(domain)?;
        Ok(spec)
    }

    fn check_domain(&self, (lo, hi): (f64, f64)) -> Result<()> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParams {
                curve: self.name.clone(),
                reason: format!("empty or non-finite domain [{lo}, {hi}]"),
            });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn source(&self) -> DerivativeSource {
        self.source
    }

    /// True for curves built from sample points; these have no analytic
    /// truth to report estimators against.
    pub fn is_sampled(&self) -> bool {
        self.sampled
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        self.check_domain((lo, hi))?;
        self.domain = (lo, hi);
        Ok(self)
    }

    /// Switches to finite-difference derivatives (orders up to
    /// [`FD_MAX_ORDER`]), keeping the same point map.
    pub fn with_finite_differences(mut self, scale: f64) -> Self {
        self.source = DerivativeSource::FiniteDifference { scale };
        self
    }

    pub fn max_order(&self) -> usize {
        match self.source {
            DerivativeSource::Analytic => ANALYTIC_MAX_ORDER,
            DerivativeSource::FiniteDifference { .. } => FD_MAX_ORDER,
        }
    }

    pub fn eval(&self, t: f64) -> Point3 {
        self.curve.eval(t)
    }

    /// `k`-th parameter derivative, `k ≥ 1`.
    pub fn deriv(&self, t: f64, k: usize) -> Result<Vector3> {
        if k == 0 {
            return Ok(self.eval(t).coords);
        }
        Ok(self.derivatives(t, k)?[k - 1])
    }

    /// Parameter derivatives `[x'(t), ..., x^(order)(t)]`.
    pub fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vector3>> {
        if order > self.max_order() {
            return Err(Error::Capability { requested: order, available: self.max_order() });
        }
        match self.source {
            DerivativeSource::Analytic => self
                .curve
                .analytic_derivatives(t, order)
                .ok_or(Error::Capability { requested: order, available: 0 }),
            DerivativeSource::FiniteDifference { scale } => {
                if let Some(d) = self.curve.native_differences(t, order) {
                    return Ok(d);
                }
                Ok((1..=order).map(|k| self.central_difference(t, k, scale)).collect())
            }
        }
    }

    fn central_difference(&self, t: f64, k: usize, scale: f64) -> Vector3 {
        // Sixth-order accurate stencil for every k; the step balances
        // truncation h^6 against roundoff eps/h^k.
        let half = k.div_ceil(2) + 2;
        let h = scale * f64::EPSILON.powf(1.0 / (k + 6) as f64);
        let weights = numeric::central_weights(k, half);
        let mut acc = Vector3::zeros();
        for (j, w) in weights.iter().enumerate() {
            if *w != 0.0 {
                let offset = j as f64 - half as f64;
                acc += self.curve.eval(t + offset * h).coords * *w;
            }
        }
        acc / h.powi(k as i32)
    }

    pub fn speed(&self, t: f64) -> Result<f64> {
        Ok(self.deriv(t, 1)?.norm())
    }
}

/// `a cos(ωt) + b sin(ωt)`.
#[derive(Clone, Copy, Debug)]
struct Harmonic {
    a: f64,
    b: f64,
    freq: f64,
}

impl Harmonic {
    fn derivative(&self, t: f64, k: usize) -> f64 {
        let (s, c) = (self.freq * t).sin_cos();
        let (dc, ds) = match k % 4 {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        };
        self.freq.powi(k as i32) * (self.a * dc + self.b * ds)
    }
}

/// Curves whose coordinates are finite trigonometric sums plus a linear
/// drift; every catalog curve is of this form, so derivatives of any order
/// are exact.
#[derive(Clone, Debug, Default)]
pub struct TrigCurve {
    offset: Vector3,
    drift: Vector3,
    terms: [Vec<Harmonic>; 3],
}

impl TrigCurve {
    fn push(&mut self, axis: usize, a: f64, b: f64, freq: f64) {
        self.terms[axis].push(Harmonic { a, b, freq });
    }

    fn coordinate(&self, axis: usize, t: f64, k: usize) -> f64 {
        let base = match k {
            0 => self.offset[axis] + self.drift[axis] * t,
            1 => self.drift[axis],
            _ => 0.0,
        };
        base + self.terms[axis].iter().map(|h| h.derivative(t, k)).sum::<f64>()
    }
}

impl ParametricCurve for TrigCurve {
    fn eval(&self, t: f64) -> Point3 {
        Point3::new(self.coordinate(0, t, 0), self.coordinate(1, t, 0), self.coordinate(2, t, 0))
    }

    fn analytic_derivatives(&self, t: f64, order: usize) -> Option<Vec<Vector3>> {
        Some(
            (1..=order)
                .map(|k| Vector3::new(self.coordinate(0, t, k), self.coordinate(1, t, k), self.coordinate(2, t, k)))
                .collect(),
        )
    }
}

fn invalid(curve: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParams { curve: curve.into(), reason: reason.into() }
}

fn expect_params(name: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(invalid(name, format!("expected {n} parameters, got {}", params.len())));
    }
    if let Some(p) = params.iter().find(|p| !p.is_finite()) {
        return Err(invalid(name, format!("non-finite parameter {p}")));
    }
    Ok(())
}

/// Names accepted by [`catalog_curve`] with their parameter lists.
pub const CATALOG: &[(&str, &str)] = &[
    ("helix", "a,b: (a cos t, a sin t, b t), a > 0, t in [0, 4pi]"),
    ("torus_knot", "p,q,R,r: integers p,q >= 1, R > r > 0, t in [0, 2pi]"),
    ("trig_poly", "seed,degree: seeded random Fourier curve, degree >= 2, t in [0, 2pi]"),
    ("circle", "r: planar circle of radius r > 0"),
    ("ellipse", "a,b: planar ellipse, a > 0, b > 0, a != b"),
    ("line", "dx,dy,dz: straight line through the origin, nonzero direction"),
];

/// Builds one of the analytic catalog curves.
pub fn catalog_curve(name: &str, params: &[f64]) -> Result<CurveSpec> {
    let mut curve = TrigCurve::default();
    let domain = match name {
        "helix" => {
            expect_params(name, params, 2)?;
            let (a, b) = (params[0], params[1]);
            if a <= 0.0 {
                return Err(invalid(name, "radius a must be positive"));
            }
            curve.push(0, a, 0.0, 1.0);
            curve.push(1, 0.0, a, 1.0);
            curve.drift = Vector3::new(0.0, 0.0, b);
            (0.0, 4.0 * PI)
        }
        "torus_knot" => {
            expect_params(name, params, 4)?;
            let (p, q, big_r, r) = (params[0], params[1], params[2], params[3]);
            if p < 1.0 || q < 1.0 || p.fract() != 0.0 || q.fract() != 0.0 {
                return Err(invalid(name, "p and q must be positive integers"));
            }
            if !(big_r > r && r > 0.0) {
                return Err(invalid(name, "need R > r > 0"));
            }
            // (R + r cos qt) cos pt, (R + r cos qt) sin pt, r sin qt
            curve.push(0, big_r, 0.0, p);
            curve.push(0, 0.5 * r, 0.0, p + q);
            curve.push(0, 0.5 * r, 0.0, p - q);
            curve.push(1, 0.0, big_r, p);
            curve.push(1, 0.0, 0.5 * r, p + q);
            curve.push(1, 0.0, 0.5 * r, p - q);
            curve.push(2, 0.0, r, q);
            (0.0, TAU)
        }
        "trig_poly" => {
            expect_params(name, params, 2)?;
            let (seed, degree) = (params[0], params[1]);
            if seed < 0.0 || seed.fract() != 0.0 {
                return Err(invalid(name, "seed must be a non-negative integer"));
            }
            if degree < 2.0 || degree.fract() != 0.0 {
                return Err(invalid(name, "degree must be an integer >= 2"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
            for axis in 0..3 {
                for k in 1..=degree as usize {
                    let a = rng.random_range(-1.0..1.0) / k as f64;
                    let b = rng.random_range(-1.0..1.0) / k as f64;
                    curve.push(axis, a, b, k as f64);
                }
            }
            (0.0, TAU)
        }
        "circle" => {
            expect_params(name, params, 1)?;
            if params[0] <= 0.0 {
                return Err(invalid(name, "radius must be positive"));
            }
            curve.push(0, params[0], 0.0, 1.0);
            curve.push(1, 0.0, params[0], 1.0);
            (0.0, TAU)
        }
        "ellipse" => {
            expect_params(name, params, 2)?;
            let (a, b) = (params[0], params[1]);
            if a <= 0.0 || b <= 0.0 || a == b {
                return Err(invalid(name, "need a > 0, b > 0, a != b"));
            }
            curve.push(0, a, 0.0, 1.0);
            curve.push(1, 0.0, b, 1.0);
            (0.0, TAU)
        }
        "line" => {
            expect_params(name, params, 3)?;
            let d = Vector3::new(params[0], params[1], params[2]);
            if d.norm() == 0.0 {
                return Err(invalid(name, "direction must be nonzero"));
            }
            curve.drift = d;
            (0.0, 10.0)
        }
        other => return Err(Error::UnknownCurve(other.to_string())),
    };
    let mut spec = CurveSpec::new(name, Arc::new(curve), domain)?;
    spec.params = params.to_vec();
    Ok(spec)
}

/// A curve through sample points, parametrized by sample index. Points and
/// derivatives come from the interpolating polynomial through the nearest
/// [`PolylineCurve::WINDOW`] samples, i.e. from finite-difference weights on
/// the samples themselves.
#[derive(Clone, Debug)]
pub struct PolylineCurve {
    points: Vec<Point3>,
}

impl PolylineCurve {
    pub const WINDOW: usize = 8;

    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if points.len() < Self::WINDOW {
            return Err(Error::Polyline(format!(
                "need at least {} points, got {}",
                Self::WINDOW,
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.coords.iter().all(|c| c.is_finite())) {
            return Err(Error::Polyline(format!("row {i} has a non-finite coordinate")));
        }
        Ok(PolylineCurve { points })
    }

    fn window(&self, t: f64) -> usize {
        let n = self.points.len();
        let start = (t.round() as i64) - (Self::WINDOW as i64 / 2) + 1;
        start.clamp(0, (n - Self::WINDOW) as i64) as usize
    }

    fn apply(&self, t: f64, m: usize) -> Vector3 {
        let start = self.window(t);
        let nodes: Vec<f64> = (start..start + Self::WINDOW).map(|i| i as f64).collect();
        let w = numeric::fornberg(t, &nodes, m);
        w.iter()
            .zip(&self.points[start..start + Self::WINDOW])
            .fold(Vector3::zeros(), |acc, (w, p)| acc + p.coords * *w)
    }
}

impl ParametricCurve for PolylineCurve {
    fn eval(&self, t: f64) -> Point3 {
        Point3::from(self.apply(t, 0))
    }

    fn analytic_derivatives(&self, _t: f64, _order: usize) -> Option<Vec<Vector3>> {
        None
    }

    fn native_differences(&self, t: f64, order: usize) -> Option<Vec<Vector3>> {
        Some((1..=order).map(|k| self.apply(t, k)).collect())
    }
}

/// A sampled curve with finite-difference derivatives.
pub fn polyline_curve(name: impl Into<String>, points: Vec<Point3>) -> Result<CurveSpec> {
    let n = points.len();
    let curve = PolylineCurve::new(points)?;
    let mut spec = CurveSpec::new(name, Arc::new(curve), (0.0, (n - 1) as f64))?;
    spec.sampled = true;
    Ok(spec)
}

/// Loads a polyline from CSV: one point per row, three numeric columns. A
/// header row is allowed if it is not numeric.
pub fn load_polyline_csv(path: impl AsRef<Path>) -> Result<CurveSpec> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 3 {
            return Err(Error::Polyline(format!("row {i}: expected 3 columns, got {}", record.len())));
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(c) => points.push(Point3::new(c[0], c[1], c[2])),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Polyline(format!("row {i}: {e}"))),
        }
    }
    polyline_curve(path.display().to_string(), points)
}

/// Arc length `s(t)` of a curve, anchored at `s(t_min) = 0`, with its inverse.
#[derive(Clone, Debug)]
pub struct ArcLengthMap {
    curve: CurveSpec,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
    tol: f64,
    speed_floor: f64,
}

impl ArcLengthMap {
    pub fn new(curve: &CurveSpec, tol: f64) -> Result<Self> {
        Self::with_floor(curve, tol, SPEED_FLOOR)
    }

    pub fn with_floor(curve: &CurveSpec, tol: f64, speed_floor: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(invalid(curve.name(), format!("quadrature tolerance must be positive, got {tol}")));
        }
        let (lo, hi) = curve.domain();
        let panels = (((hi - lo) / 0.25).ceil() as usize).clamp(8, 4096);
        let knots: Vec<f64> = (0..=panels).map(|i| lo + (hi - lo) * i as f64 / panels as f64).collect();
        let mut map = ArcLengthMap {
            curve: curve.clone(),
            knots: knots.clone(),
            cumulative: vec![0.0; panels + 1],
            tol,
            speed_floor,
        };
        for &t in &knots {
            map.checked_speed(t)?;
        }
        let panel_tol = tol / panels as f64;
        for i in 0..panels {
            let piece = numeric::integrate(|t| map.checked_speed(t), knots[i], knots[i + 1], panel_tol)?;
            map.cumulative[i + 1] = map.cumulative[i] + piece.value;
        }
        Ok(map)
    }

    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn total_length(&self) -> f64 {
        *self.cumulative.last().expect("at least one panel")
    }

    pub fn checked_speed(&self, t: f64) -> Result<f64> {
        let speed = self.curve.speed(t)?;
        if !(speed > self.speed_floor) {
            return Err(Error::DegenerateCurve { t, speed });
        }
        Ok(speed)
    }

    fn panel_of_t(&self, t: f64) -> usize {
        let i = self.knots.partition_point(|&k| k <= t);
        i.saturating_sub(1).min(self.knots.len() - 2)
    }

    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.curve.domain();
        let slack = 1e-12 * (hi - lo);
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::Domain { what: "t", value: t, lo, hi });
        }
        let i = self.panel_of_t(t);
        let piece = numeric::integrate(|x| self.checked_speed(x), self.knots[i], t, self.tol / self.knots.len() as f64)?;
        Ok(self.cumulative[i] + piece.value)
    }

    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        let total = self.total_length();
        let slack = 1e-12 * total.max(1.0);
        if !(s >= -slack && s <= total + slack) {
            return Err(Error::Domain { what: "s", value: s, lo: 0.0, hi: total });
        }
        let s = s.clamp(0.0, total);
        let i = self.cumulative.partition_point(|&c| c <= s).saturating_sub(1).min(self.knots.len() - 2);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        let span = self.cumulative[i + 1] - self.cumulative[i];
        let guess = a + (b - a) * (s - self.cumulative[i]) / span;
        let local_tol = self.tol / self.knots.len() as f64;
        numeric::solve_increasing(
            |t| {
                let piece = numeric::integrate(|x| self.checked_speed(x), a, t, local_tol)?;
                Ok((self.cumulative[i] + piece.value - s, self.checked_speed(t)?))
            },
            a,
            b,
            guess,
            1e-15,
        )
    }
}

/// Builds the arc-length map of `curve` with quadrature tolerance `tol`.
pub fn arclength_map(curve: &CurveSpec, tol: f64) -> Result<ArcLengthMap> {
    ArcLengthMap::new(curve, tol)
}

/// The point at arc length `s`.
pub fn point_at_s(curve: &CurveSpec, map: &ArcLengthMap, s: f64) -> Result<Point3> {
    Ok(curve.eval(map.t_of_s(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn helix_point_and_tangent_at_zero() {
        let h = catalog_curve("helix", &[2.0, 1.0]).unwrap();
        assert_relative_eq!(h.eval(0.0), Point3::new(2.0, 0.0, 0.0));
        assert_relative_eq!(h.deriv(0.0, 1).unwrap(), Vector3::new(0.0, 2.0, 1.0));
    }

    #[test]
    fn trig_poly_is_deterministic() {
        let a = catalog_curve("trig_poly", &[42.0, 3.0]).unwrap();
        let b = catalog_curve("trig_poly", &[42.0, 3.0]).unwrap();
        assert_eq!(a.eval(0.3), b.eval(0.3));
        assert_eq!(a.eval(0.3), a.eval(0.3));
        let c = catalog_curve("trig_poly", &[43.0, 3.0]).unwrap();
        assert_ne!(a.eval(0.3), c.eval(0.3));
    }

    #[test]
    fn catalog_rejects_bad_input() {
        assert!(matches!(catalog_curve("spiral", &[1.0]), Err(Error::UnknownCurve(_))));
        assert!(matches!(catalog_curve("helix", &[0.0, 1.0]), Err(Error::InvalidParams { .. })));
        assert!(matches!(catalog_curve("helix", &[1.0]), Err(Error::InvalidParams { .. })));
        assert!(matches!(catalog_curve("torus_knot", &[2.0, 3.0, 1.0, 2.0]), Err(Error::InvalidParams { .. })));
        assert!(matches!(catalog_curve("torus_knot", &[2.5, 3.0, 2.0, 1.0]), Err(Error::InvalidParams { .. })));
        assert!(matches!(catalog_curve("trig_poly", &[42.0, 1.0]), Err(Error::InvalidParams { .. })));
        assert!(matches!(catalog_curve("helix", &[f64::NAN, 1.0]), Err(Error::InvalidParams { .. })));
    }

    #[test]
    fn torus_knot_matches_closed_form() {
        let k = catalog_curve("torus_knot", &[2.0, 3.0, 2.0, 0.5]).unwrap();
        let t: f64 = 0.7;
        let rho = 2.0 + 0.5 * (3.0 * t).cos();
        let expect = Point3::new(rho * (2.0 * t).cos(), rho * (2.0 * t).sin(), 0.5 * (3.0 * t).sin());
        assert_relative_eq!(k.eval(t), expect, epsilon = 1e-14);
    }

    #[test]
    fn analytic_derivatives_match_high_order_differences() {
        let k = catalog_curve("torus_knot", &[2.0, 3.0, 2.0, 0.5]).unwrap();
        let fd = k.clone().with_finite_differences(1.0);
        for &t in &[0.1, 1.3, 4.0] {
            for order in 1..=3 {
                let a = k.deriv(t, order).unwrap();
                let d = fd.deriv(t, order).unwrap();
                assert!((a - d).norm() <= 1e-6 * a.norm(), "order {order}: {a} vs {d}");
            }
        }
    }

    #[test]
    fn finite_differences_cap_at_order_five() {
        let h = catalog_curve("helix", &[2.0, 1.0]).unwrap().with_finite_differences(1.0);
        assert!(h.deriv(0.5, 5).is_ok());
        assert!(matches!(h.deriv(0.5, 6), Err(Error::Capability { requested: 6, available: 5 })));
    }

    #[test]
    fn helix_length_and_inverse() {
        let h = catalog_curve("helix", &[2.0, 1.0]).unwrap().with_domain(0.0, 1.0).unwrap();
        let map = arclength_map(&h, 1e-12).unwrap();
        assert_relative_eq!(map.total_length(), 5f64.sqrt(), epsilon = 1e-12);
        assert_eq!(map.s_of_t(0.0).unwrap(), 0.0);
        let p = point_at_s(&h, &map, 5f64.sqrt()).unwrap();
        assert_relative_eq!(p, Point3::new(2.0 * 1f64.cos(), 2.0 * 1f64.sin(), 1.0), epsilon = 1e-12);
        assert_relative_eq!(point_at_s(&h, &map, 0.0).unwrap(), Point3::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn unit_circle_circumference() {
        let c = catalog_curve("circle", &[1.0]).unwrap();
        let map = arclength_map(&c, 1e-12).unwrap();
        assert_relative_eq!(map.total_length(), TAU, epsilon = 1e-12);
    }

    #[test]
    fn s_out_of_range_is_domain_error() {
        let h = catalog_curve("helix", &[2.0, 1.0]).unwrap().with_domain(0.0, 1.0).unwrap();
        let map = arclength_map(&h, 1e-12).unwrap();
        let err = point_at_s(&h, &map, map.total_length() + 1.0).unwrap_err();
        assert!(matches!(err, Error::Domain { what: "s", .. }));
    }

    #[derive(Debug)]
    struct Cusp;
    impl ParametricCurve for Cusp {
        fn eval(&self, t: f64) -> Point3 {
            Point3::new(t * t, t * t * t, 0.0)
        }
        fn analytic_derivatives(&self, t: f64, order: usize) -> Option<Vec<Vector3>> {
            let all = [
                Vector3::new(2.0 * t, 3.0 * t * t, 0.0),
                Vector3::new(2.0, 6.0 * t, 0.0),
                Vector3::new(0.0, 6.0, 0.0),
            ];
            Some((0..order).map(|k| all.get(k).copied().unwrap_or_else(Vector3::zeros)).collect())
        }
    }

    #[test]
    fn zero_speed_is_degenerate_curve() {
        let c = CurveSpec::new("cusp", Arc::new(Cusp), (-1.0, 1.0)).unwrap();
        assert!(matches!(arclength_map(&c, 1e-10), Err(Error::DegenerateCurve { .. })));
    }

    #[test]
    fn polyline_reproduces_polynomials_exactly() {
        // the interpolant through 8 samples reproduces cubics and their derivatives
        let pts: Vec<Point3> = (0..20)
            .map(|i| {
                let t = i as f64;
                Point3::new(t, 0.1 * t * t, 0.01 * t * t * t)
            })
            .collect();
        let c = polyline_curve("poly", pts).unwrap();
        assert!(c.is_sampled());
        let t = 7.3;
        assert_relative_eq!(c.eval(t), Point3::new(t, 0.1 * t * t, 0.01 * t * t * t), epsilon = 1e-10);
        let d2 = c.deriv(t, 2).unwrap();
        assert_relative_eq!(d2, Vector3::new(0.0, 0.2, 0.06 * t), epsilon = 1e-9);
        assert!(c.deriv(t, 5).is_ok());
        assert!(c.deriv(t, 6).is_err());
    }

    #[test]
    fn polyline_needs_enough_points() {
        let pts = vec![Point3::origin(); 3];
        assert!(matches!(polyline_curve("short", pts), Err(Error::Polyline(_))));
    }
}
