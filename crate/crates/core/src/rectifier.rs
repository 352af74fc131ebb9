//! Inscribed polygons with circular edges and the angle estimators built on
//! them.
//!
//! Each estimator turns the angles of a sampled window into an estimate of
//! one invariant at a fixed point, repeats this over a geometric schedule of
//! step sizes, extrapolates to zero step, and fits the observed convergence
//! order against the analytic value.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::{conformal_state_at, omega_equidistant, ConformalState};
use crate::curve::{ArcLengthMap, CurveSpec, Point3};
use crate::error::{Error, Result};
use crate::frenet::{frenet_state, metric_cusp_angle, metric_plane_angle};
use crate::inversive::{cusp_angle, sphere_angle, torsion_angle, CircleAngle, CircleTriple, MobiusMap};
use crate::numeric::{self, fit_slope};

/// Conformal steps outside this range are flagged in reports.
pub const OMEGA_STABILITY_WINDOW: (f64, f64) = (1e-3, 2e-1);

/// Sphere-normal misalignment above which a step is flagged as
/// roundoff-contaminated.
pub const NORMAL_ALIGNMENT_LIMIT: f64 = 1e-6;

/// Contiguous sample offsets `first, first+1, ..., first+count-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub first: i64,
    pub count: usize,
}

impl Window {
    pub fn new(first: i64, count: usize) -> Self {
        Window { first, count }
    }

    /// Centered on zero; for even counts the extra point goes left.
    pub fn symmetric(count: usize) -> Self {
        Window { first: -(count as i64 / 2), count }
    }

    /// Ends one step past zero, e.g. `-3..=1` for five points.
    pub fn left_shifted(count: usize) -> Self {
        Window { first: 2 - count as i64, count }
    }

    pub fn offsets(&self) -> impl Iterator<Item = i64> {
        self.first..self.first + self.count as i64
    }
}

/// Points at `s0 + kε` for the offsets of `window`.
pub fn sample_metric(curve: &CurveSpec, map: &ArcLengthMap, s0: f64, eps: f64, window: Window) -> Result<Vec<Point3>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::DegenerateInput(format!("metric step must be positive, got {eps}")));
    }
    window
        .offsets()
        .map(|k| Ok(curve.eval(map.t_of_s(s0 + k as f64 * eps)?)))
        .collect()
}

/// Points at conformal distance `kω` from `s0` for the offsets of `window`.
pub fn sample_conformal(curve: &CurveSpec, map: &ArcLengthMap, s0: f64, omega: f64, window: Window) -> Result<Vec<Point3>> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::DegenerateInput(format!("conformal step must be positive, got {omega}")));
    }
    window
        .offsets()
        .map(|k| {
            let s = omega_equidistant(curve, map, s0, omega, k)?;
            Ok(curve.eval(map.t_of_s(s)?))
        })
        .collect()
}

/// Which arcs of the generating circles form the polygon edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Arc of `cc_j` from `x_j` to `x_{j+1}`.
    Plus,
    /// Arc of `cc_j` from `x_{j-1}` to `x_j`.
    Minus,
}

/// A polygon whose edges are arcs of the circles through consecutive point
/// triples.
#[derive(Clone, Debug)]
pub struct CircularPolygon {
    pub corners: Vec<Point3>,
    pub side: Side,
    /// `circles[i]` passes through corners `i, i+1, i+2`.
    pub circles: Vec<CircleTriple>,
}

/// One circular edge: an arc of `circle` from `from` to `to`.
#[derive(Clone, Copy, Debug)]
pub struct CircularArc {
    pub circle: CircleTriple,
    pub from: Point3,
    pub to: Point3,
}

pub fn inscribe(points: &[Point3], side: Side) -> Result<CircularPolygon> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!("need at least 3 points, got {}", points.len())));
    }
    let circles = points
        .windows(3)
        .map(|w| CircleTriple::new(w[0], w[1], w[2]))
        .collect::<Result<Vec<_>>>()?;
    Ok(CircularPolygon { corners: points.to_vec(), side, circles })
}

impl CircularPolygon {
    pub fn arcs(&self) -> Vec<CircularArc> {
        self.circles
            .iter()
            .map(|c| {
                let [a, b, d] = c.points;
                match self.side {
                    Side::Plus => CircularArc { circle: *c, from: b, to: d },
                    Side::Minus => CircularArc { circle: *c, from: a, to: b },
                }
            })
            .collect()
    }

    /// Angles at the corners where consecutive arcs meet. Consecutive
    /// circles cross at the same angle at both of their common points, so
    /// the values do not depend on the side.
    pub fn corner_angles(&self) -> Vec<CircleAngle> {
        self.circles
            .windows(2)
            .map(|w| {
                // Both circles contain corners i+1 and i+2.
                let corner = match self.side {
                    Side::Plus => w[0].points[2],
                    Side::Minus => w[0].points[1],
                };
                let u = w[0].tangent_at(&corner).expect("shared corner");
                let v = w[1].tangent_at(&corner).expect("shared corner");
                let a = crate::inversive::AngleCos::from_unit_vectors(&u, &v);
                CircleAngle { cos: a.cos, tangent_cos: a.cos, one_minus_cos: a.one_minus_cos, cross_check: 0.0 }
            })
            .collect()
    }
}

/// Strictly decreasing positive step sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    steps: Vec<f64>,
}

impl Schedule {
    /// `start, start/ratio, start/ratio², ...` with `count` entries.
    pub fn geometric(start: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(start > 0.0 && start.is_finite()) {
            return Err(Error::Schedule(format!("start must be positive, got {start}")));
        }
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::Schedule(format!("ratio must exceed 1, got {ratio}")));
        }
        Schedule::from_steps((0..count).map(|k| start / ratio.powi(k as i32)).collect())
    }

    pub fn from_steps(steps: Vec<f64>) -> Result<Self> {
        if steps.len() < 2 {
            return Err(Error::Schedule(format!("need at least 2 steps, got {}", steps.len())));
        }
        if steps.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::Schedule("steps must be positive and finite".into()));
        }
        if steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Schedule("steps must be strictly decreasing".into()));
        }
        Ok(Schedule { steps })
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }
}

/// The quantities the rectifier can estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// `√(8(1 - cos α)) / ε²` on metric samples.
    Nu,
    /// `(ω⁴/8 - (1 - cos α)) / ω⁶` on conformal samples.
    P,
    /// `8(1 - cos β) / ω⁶` on conformal samples.
    T2Beta,
    /// `2(1 - cos γ) / (ν ε²)` on metric samples.
    T2Gamma,
    /// `24 P̂ - ¾ T̂²` with `T̂²` from the torsion angle.
    Q,
    /// `√(2(1 - cos ᾱ) / ε²)` from straight edges.
    Kappa,
    /// `√((1 - cos γ̄) / (2ε²))` from planes through straight edges.
    Tau,
    /// `8(1 - cos α) / ω⁴`, whose limit is 1 on every curve.
    CuspLeading,
}

/// Step variable of an estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    /// Arc length `ε`.
    Metric,
    /// Conformal length `ω`.
    Conformal,
}

impl Estimator {
    pub const ALL: [Estimator; 8] = [
        Estimator::Nu,
        Estimator::P,
        Estimator::T2Beta,
        Estimator::T2Gamma,
        Estimator::Q,
        Estimator::Kappa,
        Estimator::Tau,
        Estimator::CuspLeading,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Nu => "nu",
            Estimator::P => "P",
            Estimator::T2Beta => "T2_beta",
            Estimator::T2Gamma => "T2_gamma",
            Estimator::Q => "Q",
            Estimator::Kappa => "kappa",
            Estimator::Tau => "tau",
            Estimator::CuspLeading => "cusp_leading",
        }
    }

    pub fn from_name(name: &str) -> Option<Estimator> {
        Estimator::ALL.iter().copied().find(|e| e.name().eq_ignore_ascii_case(name))
    }

    pub fn step_kind(&self) -> StepKind {
        match self {
            Estimator::Nu | Estimator::T2Gamma | Estimator::Kappa | Estimator::Tau => StepKind::Metric,
            Estimator::P | Estimator::T2Beta | Estimator::Q | Estimator::CuspLeading => StepKind::Conformal,
        }
    }

    /// Leading power of the step in the relative error of the raw estimate.
    pub fn nominal_order(&self) -> f64 {
        match self {
            Estimator::Kappa | Estimator::Tau | Estimator::CuspLeading => 2.0,
            _ => 1.0,
        }
    }

    fn window(&self) -> Window {
        match self {
            Estimator::Nu | Estimator::P | Estimator::CuspLeading => Window::new(-2, 4),
            Estimator::T2Beta | Estimator::Q | Estimator::Tau => Window::symmetric(5),
            Estimator::T2Gamma => Window::left_shifted(5),
            Estimator::Kappa => Window::symmetric(3),
        }
    }

    pub fn default_schedule(&self) -> Schedule {
        let (start, count) = match self {
            Estimator::Nu | Estimator::Kappa | Estimator::Tau => (0.1, 5),
            Estimator::P | Estimator::T2Beta | Estimator::Q => (0.2, 5),
            // The ω² correction is small next to the leading 1, so higher
            // terms still matter at ω = 0.2 on strongly curved curves.
            Estimator::CuspLeading => (0.1, 5),
            // Tuned to unit-scale curves such as helix(2,1); see
            // `Rectifier::default_schedule` for the curve-adapted version.
            Estimator::T2Gamma => (0.32, 4),
        };
        Schedule::geometric(start, 2.0, count).expect("valid default schedule")
    }
}

/// One evaluated step of a schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: f64,
    pub estimate: f64,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedStep {
    pub step: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub estimator: Estimator,
    pub curve: String,
    pub s0: f64,
    pub step_kind: StepKind,
    pub steps: Vec<StepRecord>,
    pub skipped: Vec<SkippedStep>,
    /// Analytic value; absent for sampled curves.
    pub reference: Option<f64>,
    /// Second analytic value where one exists (`(Q + ¾T²)/24` for `P`).
    pub alternate_reference: Option<f64>,
    pub nominal_order: f64,
    /// Richardson extrapolation over the two finest steps.
    pub extrapolated: Option<f64>,
    pub extrapolated_abs_error: Option<f64>,
    pub extrapolated_rel_error: Option<f64>,
    /// `|extrapolated - finest estimate|`; propagated from the components
    /// for `Q`.
    pub error_estimate: Option<f64>,
    /// Least-squares slope of `log|error|` against `log step` over the
    /// leading run of decreasing errors.
    pub fitted_order: Option<f64>,
    pub warnings: Vec<String>,
}

impl EstimatorReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per step, then `#`-prefixed footer lines.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "estimate", "abs_error", "rel_error"])?;
        for r in &self.steps {
            w.write_record([
                numeric::format_real(Some(r.step)),
                numeric::format_real(Some(r.estimate)),
                numeric::format_real(r.abs_error),
                numeric::format_real(r.rel_error),
            ])?;
        }
        w.flush()?;
        let mut out = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        writeln!(out, "# estimator,{}", self.estimator.name())?;
        writeln!(out, "# reference,{}", numeric::format_real(self.reference))?;
        writeln!(out, "# extrapolated,{}", numeric::format_real(self.extrapolated))?;
        writeln!(out, "# extrapolated_rel_error,{}", numeric::format_real(self.extrapolated_rel_error))?;
        writeln!(out, "# fitted_order,{}", numeric::format_real(self.fitted_order))?;
        writeln!(out, "# nominal_order,{}", numeric::format_real(Some(self.nominal_order)))?;
        for s in &self.skipped {
            writeln!(out, "# skipped,{},{}", numeric::format_real(Some(s.step)), s.reason.replace(',', ";"))?;
        }
        for warning in &self.warnings {
            writeln!(out, "# warning,{}", warning.replace(',', ";"))?;
        }
        Ok(())
    }
}

/// `E_fine + (E_fine - E_coarse) / (r^p - 1)`.
pub fn richardson(coarse: (f64, f64), fine: (f64, f64), order: f64) -> f64 {
    let r = coarse.0 / fine.0;
    fine.1 + (fine.1 - coarse.1) / (r.powf(order) - 1.0)
}

/// Slope of `log err` against `log step` over the leading strictly
/// decreasing run of errors. Returns the slope and the run length.
pub fn fitted_order(steps: &[f64], errors: &[f64]) -> (Option<f64>, usize) {
    let mut n = 0;
    for (i, e) in errors.iter().enumerate() {
        if !(*e > 0.0 && e.is_finite()) || (i > 0 && *e >= errors[i - 1]) {
            break;
        }
        n = i + 1;
    }
    if n < 2 {
        return (None, n);
    }
    let xs: Vec<f64> = steps[..n].iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors[..n].iter().map(|e| e.ln()).collect();
    (fit_slope(&xs, &ys), n)
}

/// Angle data of one step.
struct StepValue {
    estimate: f64,
    /// Components `(P̂, T̂²)` for the combined estimator.
    components: Option<(f64, f64)>,
    warning: Option<String>,
}

/// Runs estimators on one curve.
#[derive(Clone, Debug)]
pub struct Rectifier<'a> {
    curve: &'a CurveSpec,
    map: &'a ArcLengthMap,
    mobius: Option<MobiusMap>,
    sphere_normals: SphereNormals,
}

/// How the sphere-angle estimator evaluates sphere normals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereNormals {
    /// Cramer numerators on the Gram matrix; loses digits below ω ≈ 0.01.
    #[default]
    Gram,
    /// Directions to circumcenters computed by cross products.
    Centers,
}

impl<'a> Rectifier<'a> {
    pub fn new(curve: &'a CurveSpec, map: &'a ArcLengthMap) -> Self {
        Rectifier { curve, map, mobius: None, sphere_normals: SphereNormals::Gram }
    }

    pub fn with_sphere_normals(mut self, normals: SphereNormals) -> Self {
        self.sphere_normals = normals;
        self
    }

    /// Applies `m` to every sampled window before measuring angles.
    pub fn with_mobius(mut self, m: MobiusMap) -> Self {
        self.mobius = Some(m);
        self
    }

    fn sample(&self, est: Estimator, s0: f64, h: f64) -> Result<Vec<Point3>> {
        let window = est.window();
        let pts = match est.step_kind() {
            StepKind::Metric => sample_metric(self.curve, self.map, s0, h, window)?,
            StepKind::Conformal => sample_conformal(self.curve, self.map, s0, h, window)?,
        };
        match &self.mobius {
            Some(m) => m.apply_all(&pts),
            None => Ok(pts),
        }
    }

    fn evaluate(&self, est: Estimator, s0: f64, h: f64, nu: Option<f64>) -> Result<StepValue> {
        let x = self.sample(est, s0, h)?;
        let plain = |estimate| StepValue { estimate, components: None, warning: None };
        Ok(match est {
            Estimator::Nu => {
                // 1 - cos α ≈ ν² ε⁴ / 8.
                let a = cusp_angle([&x[0], &x[1], &x[2], &x[3]])?;
                plain((8.0 * a.one_minus_cos).sqrt() / (h * h))
            }
            Estimator::CuspLeading => {
                let a = cusp_angle([&x[0], &x[1], &x[2], &x[3]])?;
                plain(8.0 * a.one_minus_cos / h.powi(4))
            }
            Estimator::P => {
                let a = cusp_angle([&x[0], &x[1], &x[2], &x[3]])?;
                plain((h.powi(4) / 8.0 - a.one_minus_cos) / h.powi(6))
            }
            Estimator::T2Beta => {
                let b = torsion_angle([&x[0], &x[1], &x[2], &x[3], &x[4]])?;
                plain(8.0 * b.one_minus_cos / h.powi(6))
            }
            Estimator::Q => {
                // Cusp angle at x(s0) from offsets -2..=1 of the same window.
                let a = cusp_angle([&x[0], &x[1], &x[2], &x[3]])?;
                let b = torsion_angle([&x[0], &x[1], &x[2], &x[3], &x[4]])?;
                let p = (h.powi(4) / 8.0 - a.one_minus_cos) / h.powi(6);
                let t2 = 8.0 * b.one_minus_cos / h.powi(6);
                StepValue { estimate: 24.0 * p - 0.75 * t2, components: Some((p, t2)), warning: None }
            }
            Estimator::T2Gamma => {
                let nu = nu.expect("nu computed before the schedule runs");
                let g = sphere_angle([&x[0], &x[1], &x[2], &x[3], &x[4]])?;
                let one_minus_cos = match self.sphere_normals {
                    SphereNormals::Gram => g.one_minus_cos,
                    SphereNormals::Centers => g.center_one_minus_cos,
                };
                let gram = self.sphere_normals == SphereNormals::Gram;
                let warning = (gram && g.normal_alignment > NORMAL_ALIGNMENT_LIMIT).then(|| {
                    format!(
                        "step {h:e}: sphere normal deviates from center direction by {:.1e}; step is below the Gram-route stability window",
                        g.normal_alignment
                    )
                });
                StepValue { estimate: 2.0 * one_minus_cos / (nu * h * h), components: None, warning }
            }
            Estimator::Kappa => {
                let a = metric_cusp_angle(&x[0], &x[1], &x[2])?;
                plain((2.0 * a.one_minus_cos).sqrt() / h)
            }
            Estimator::Tau => {
                let a = metric_plane_angle([&x[0], &x[1], &x[2], &x[3], &x[4]])?;
                plain((a.one_minus_cos / 2.0).sqrt() / h)
            }
        })
    }

    /// The estimator's default schedule, except for the sphere angle whose
    /// arc-length steps are scaled to conformal steps `ω = 0.09, 0.045, ...`
    /// at `s0`; the Gram route stops at `ω ≈ 0.011`, the center route goes
    /// four times finer.
    pub fn default_schedule(&self, est: Estimator, s0: f64) -> Result<Schedule> {
        if est != Estimator::T2Gamma {
            return Ok(est.default_schedule());
        }
        let f = self.conformal_at(s0)?.f;
        let count = match self.sphere_normals {
            SphereNormals::Gram => 4,
            SphereNormals::Centers => 6,
        };
        Schedule::geometric(0.09 / f, 2.0, count)
    }

    fn conformal_at(&self, s0: f64) -> Result<ConformalState> {
        conformal_state_at(self.curve, self.map, s0)
    }

    /// Analytic value(s) at `s0`, plus `ν` where the estimator needs it.
    fn references(&self, est: Estimator, s0: f64) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
        let sampled = self.curve.is_sampled();
        let known = |v: f64| if sampled { None } else { Some(v) };
        Ok(match est {
            Estimator::Kappa | Estimator::Tau => {
                let fr = frenet_state(self.curve, self.map, s0)?;
                let v = if est == Estimator::Kappa { fr.kappa } else { fr.tau.abs() };
                (known(v), None, None)
            }
            Estimator::CuspLeading => {
                self.conformal_at(s0)?;
                (Some(1.0), None, None)
            }
            _ => {
                let c = self.conformal_at(s0)?;
                match est {
                    Estimator::Nu => (known(c.nu), None, None),
                    Estimator::P => (known(c.p), if sampled { None } else { Some(c.p_identity) }, None),
                    Estimator::T2Beta => (known(c.t * c.t), None, None),
                    Estimator::T2Gamma => (known(c.t * c.t), None, Some(c.nu)),
                    Estimator::Q => (known(c.q), None, None),
                    _ => unreachable!(),
                }
            }
        })
    }

    pub fn estimate(&self, est: Estimator, s0: f64, schedule: &Schedule) -> Result<EstimatorReport> {
        let (reference, alternate_reference, nu) = self.references(est, s0)?;

        // Steps are independent; collect keeps schedule order.
        let results: Vec<(f64, Result<StepValue>)> = schedule
            .steps()
            .par_iter()
            .map(|&h| (h, self.evaluate(est, s0, h, nu)))
            .collect();

        let mut steps = Vec::new();
        let mut skipped = Vec::new();
        let mut warnings = Vec::new();
        let mut components = Vec::new();
        for (h, r) in results {
            match r {
                Ok(v) if v.estimate.is_finite() => {
                    let abs_error = reference.map(|r| (v.estimate - r).abs());
                    let rel_error = reference.filter(|r| *r != 0.0).map(|r| (v.estimate - r).abs() / r.abs());
                    steps.push(StepRecord { step: h, estimate: v.estimate, abs_error, rel_error });
                    if let Some(c) = v.components {
                        components.push(c);
                    }
                    warnings.extend(v.warning);
                }
                Ok(v) => skipped.push(SkippedStep { step: h, reason: format!("non-finite estimate {}", v.estimate) }),
                Err(e) => skipped.push(SkippedStep { step: h, reason: e.to_string() }),
            }
        }
        if steps.is_empty() {
            warnings.push("no step produced an estimate".into());
        }

        if est.step_kind() == StepKind::Conformal {
            let (lo, hi) = OMEGA_STABILITY_WINDOW;
            for s in &steps {
                if s.step < lo || s.step > hi {
                    warnings.push(format!("step {:e} outside the conformal stability window [{lo:e}, {hi:e}]", s.step));
                }
            }
        }

        let order = est.nominal_order();
        let n = steps.len();
        let (extrapolated, error_estimate) = if n >= 2 {
            let (c, f) = (&steps[n - 2], &steps[n - 1]);
            let x = richardson((c.step, c.estimate), (f.step, f.estimate), order);
            let err = if components.len() == n {
                let (cp, ct) = components[n - 2];
                let (fp, ft) = components[n - 1];
                let p = richardson((c.step, cp), (f.step, fp), order);
                let t = richardson((c.step, ct), (f.step, ft), order);
                24.0 * (p - fp).abs() + 0.75 * (t - ft).abs()
            } else {
                (x - f.estimate).abs()
            };
            (Some(x), Some(err))
        } else {
            (None, None)
        };

        // Observed order against the reference, or from successive
        // differences when there is none.
        let hs: Vec<f64> = steps.iter().map(|s| s.step).collect();
        let (fitted, run) = match reference {
            Some(r) => {
                let errs: Vec<f64> = steps.iter().map(|s| (s.estimate - r).abs()).collect();
                fitted_order(&hs, &errs)
            }
            None => {
                let diffs: Vec<f64> = steps.windows(2).map(|w| (w[0].estimate - w[1].estimate).abs()).collect();
                let (o, run) = fitted_order(&hs[..hs.len().saturating_sub(1)], &diffs);
                (o, run + 1)
            }
        };
        if n >= 2 && run < n {
            warnings.push(format!(
                "error stops decreasing after {run} of {n} steps (roundoff dominance); order fitted on the first {run}"
            ));
        }

        let extrapolated_abs_error = extrapolated.zip(reference).map(|(x, r)| (x - r).abs());
        let extrapolated_rel_error = extrapolated_abs_error.zip(reference).filter(|(_, r)| *r != 0.0).map(|(e, r)| e / r.abs());

        Ok(EstimatorReport {
            estimator: est,
            curve: self.curve.name().to_string(),
            s0,
            step_kind: est.step_kind(),
            steps,
            skipped,
            reference,
            alternate_reference,
            nominal_order: order,
            extrapolated,
            extrapolated_abs_error,
            extrapolated_rel_error,
            error_estimate,
            fitted_order: fitted,
            warnings,
        })
    }

    pub fn estimate_nu(&self, s0: f64, schedule: &Schedule) -> Result<EstimatorReport> {
        self.estimate(Estimator::Nu, s0, schedule)
    }

    pub fn estimate_p(&self, s0: f64, schedule: &Schedule) -> Result<EstimatorReport> {
        self.estimate(Estimator::P, s0, schedule)
    }

    pub fn estimate_t2_beta(&self, s0: f64, schedule: &Schedule) -> Result<EstimatorReport> {
        self.estimate(Estimator::T2Beta, s0, schedule)
    }

    pub fn estimate_t2_gamma(&self, s0: f64, schedule: &Schedule) -> Result<EstimatorReport> {
        self.estimate(Estimator::T2Gamma, s0, schedule)
    }

    pub fn estimate_q(&self, s0: f64, schedule: &Schedule) -> Result<EstimatorReport> {
        self.estimate(Estimator::Q, s0, schedule)
    }
}
