use std::fs::File;
use std::io::{self, BufWriter, Write};

use confinv::conformal::conformal_state_with_floor;
use confinv::crossratio::{pqr_from_circles, tetrahedron_surface, write_surface_csv, CrossRatioReport};
use confinv::frenet::frenet_state;
use confinv::inversive::MobiusMap;
use confinv::numeric::format_real;
use confinv::rectifier::{Estimator, EstimatorReport, Rectifier, StepKind};
use confinv::{arclength_map, catalog_curve, curve::load_polyline_csv, ArcLengthMap, CurveSpec, Error, Point3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{CurveSource, Format, RunConfig};
use crate::CliError;

/// Tolerance under which a crossing cosine counts as `±1`.
const UNIT_COS_TOL: f64 = 1e-9;

fn open_output(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut out: Box<dyn Write>) -> Result<(), CliError> {
    out.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn load_curve(cfg: &RunConfig) -> Result<(CurveSpec, ArcLengthMap), CliError> {
    let curve = match &cfg.curve {
        Some(CurveSource::Catalog { name, params }) => catalog_curve(name, params).map_err(CliError::config)?,
        Some(CurveSource::Polyline(path)) => load_polyline_csv(path).map_err(CliError::config)?,
        None => return Err(CliError::Config("no curve given (use --curve, --polyline or [curve] in the config)".into())),
    };
    let map = arclength_map(&curve, cfg.quadrature_tol)?;
    Ok((curve, map))
}

#[derive(Debug, Serialize)]
struct InvariantRow {
    s: f64,
    kappa: Option<f64>,
    tau: Option<f64>,
    dkappa: Option<f64>,
    nu: Option<f64>,
    sqrt_nu: Option<f64>,
    #[serde(rename = "Q")]
    q: Option<f64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    #[serde(rename = "P")]
    p: Option<f64>,
    #[serde(rename = "P_identity")]
    p_identity: Option<f64>,
    status: &'static str,
    message: String,
}

fn status_of(e: &Error) -> &'static str {
    match e {
        Error::ConformalDegeneracy { .. } => "conformal_degeneracy",
        Error::Inflection { .. } => "inflection",
        Error::DegenerateCurve { .. } => "degenerate_curve",
        Error::Domain { .. } => "domain",
        _ => "error",
    }
}

fn invariant_row(curve: &CurveSpec, map: &ArcLengthMap, s: f64, nu_floor: f64) -> InvariantRow {
    let mut row = InvariantRow {
        s,
        kappa: None,
        tau: None,
        dkappa: None,
        nu: None,
        sqrt_nu: None,
        q: None,
        t: None,
        p: None,
        p_identity: None,
        status: "ok",
        message: String::new(),
    };
    let fr = match frenet_state(curve, map, s) {
        Ok(fr) => fr,
        Err(e) => {
            row.status = status_of(&e);
            row.message = e.to_string();
            return row;
        }
    };
    row.kappa = Some(fr.kappa);
    row.tau = Some(fr.tau);
    row.dkappa = Some(fr.dkappa);
    match conformal_state_with_floor(&fr, nu_floor) {
        Ok(c) => {
            row.nu = Some(c.nu);
            row.sqrt_nu = Some(c.f);
            row.q = Some(c.q);
            row.t = Some(c.t);
            row.p = Some(c.p);
            row.p_identity = Some(c.p_identity);
        }
        Err(e) => {
            // ν itself is still meaningful at a degeneracy; the ratios are not.
            let nu = (fr.dkappa * fr.dkappa + fr.kappa * fr.kappa * fr.tau * fr.tau).sqrt();
            row.nu = Some(nu);
            row.sqrt_nu = Some(nu.sqrt());
            row.status = status_of(&e);
            row.message = e.to_string();
        }
    }
    row
}

pub fn invariants(cfg: &RunConfig) -> Result<(), CliError> {
    let (curve, map) = load_curve(cfg)?;
    let total = map.total_length();
    let (lo, hi, rows) = match (cfg.s_min, cfg.s_max, cfg.s0) {
        (None, None, Some(s0)) => (s0, s0, 1),
        (lo, hi, _) => (lo.unwrap_or(0.0), hi.unwrap_or(total), cfg.rows),
    };
    if !(lo <= hi) {
        return Err(CliError::Config(format!("empty s-range [{lo}, {hi}]")));
    }
    for s in [lo, hi] {
        if !(0.0..=total).contains(&s) {
            return Err(CliError::Config(format!("s = {s} outside [0, {total}]")));
        }
    }
    let ss: Vec<f64> = if rows == 1 {
        vec![lo]
    } else {
        (0..rows).map(|i| lo + (hi - lo) * i as f64 / (rows - 1) as f64).collect()
    };
    let table: Vec<InvariantRow> = ss.iter().map(|&s| invariant_row(&curve, &map, s, cfg.nu_floor)).collect();

    let mut out = open_output(cfg)?;
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &table).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            let header = ["s", "kappa", "tau", "dkappa", "nu", "sqrt_nu", "Q", "T", "P", "P_identity", "status", "message"];
            w.write_record(header).map_err(CliError::csv)?;
            for r in &table {
                let mut rec: Vec<String> = [Some(r.s), r.kappa, r.tau, r.dkappa, r.nu, r.sqrt_nu, r.q, r.t, r.p, r.p_identity]
                    .into_iter()
                    .map(format_real)
                    .collect();
                rec.push(r.status.to_string());
                rec.push(r.message.clone());
                w.write_record(&rec).map_err(CliError::csv)?;
            }
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    let degenerate = table.iter().filter(|r| r.status != "ok").count();
    if degenerate > 0 {
        eprintln!("{degenerate} of {} rows flagged", table.len());
    }
    finish(out)
}

/// Accepts the report names (`T2_beta`) as well as the underscore-free
/// spellings (`T2beta`), case-insensitively.
pub fn parse_estimators(which: Option<&str>) -> Result<Vec<Estimator>, CliError> {
    let Some(which) = which else {
        return Ok(Estimator::ALL.to_vec());
    };
    let squash = |s: &str| s.replace(['_', '-'], "").to_ascii_lowercase();
    which
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            Estimator::ALL.iter().copied().find(|e| squash(e.name()) == squash(name)).ok_or_else(|| {
                let known: Vec<&str> = Estimator::ALL.iter().map(|e| e.name()).collect();
                CliError::Config(format!("unknown estimator `{name}` (known: {})", known.join(", ")))
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| if v.is_empty() { Err(CliError::Config("--which is empty".into())) } else { Ok(v) })
}

pub fn converge(cfg: &RunConfig) -> Result<(), CliError> {
    let estimators = parse_estimators(cfg.which.as_deref())?;
    let (curve, map) = load_curve(cfg)?;
    let s0 = cfg.s0.unwrap_or(0.45 * map.total_length());
    let rect = Rectifier::new(&curve, &map).with_sphere_normals(cfg.sphere_normals);

    let mut reports: Vec<EstimatorReport> = Vec::with_capacity(estimators.len());
    for est in &estimators {
        let default = rect.default_schedule(*est, s0)?;
        let spec = match est.step_kind() {
            StepKind::Metric => &cfg.epsilon,
            StepKind::Conformal => &cfg.omega,
        };
        let schedule = spec.resolve(&default)?;
        reports.push(rect.estimate(*est, s0, &schedule)?);
    }

    let mut out = open_output(cfg)?;
    match cfg.format {
        Format::Json => {
            let res = if reports.len() == 1 {
                serde_json::to_writer_pretty(&mut out, &reports[0])
            } else {
                serde_json::to_writer_pretty(&mut out, &reports)
            };
            res.map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Format::Csv => {
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    writeln!(out).map_err(|e| CliError::Io(e.to_string()))?;
                }
                r.write_csv(&mut out)?;
            }
        }
    }
    finish(out)?;

    for r in &reports {
        eprintln!(
            "{}: extrapolated {} reference {} rel_error {} fitted_order {} ({} steps, {} skipped)",
            r.estimator.name(),
            show(r.extrapolated),
            show(r.reference),
            show(r.extrapolated_rel_error),
            show(r.fitted_order),
            r.steps.len(),
            r.skipped.len(),
        );
    }
    let failed: Vec<&str> = reports.iter().filter(|r| r.steps.is_empty()).map(|r| r.estimator.name()).collect();
    if !failed.is_empty() {
        let reasons: Vec<String> = reports
            .iter()
            .filter(|r| r.steps.is_empty())
            .filter_map(|r| r.skipped.first().map(|s| format!("{}: {}", r.estimator.name(), s.reason)))
            .collect();
        return Err(CliError::Failed(format!("no step succeeded for {}; {}", failed.join(", "), reasons.join("; "))));
    }
    Ok(())
}

fn show(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.10e}"))
}

#[derive(Debug, Serialize)]
struct MobiusCheck {
    maps: usize,
    seed: u64,
    max_deviation_uv: f64,
    max_deviation_crossings: f64,
}

#[derive(Debug, Serialize)]
struct CrossRatioOutput {
    points: [[f64; 3]; 4],
    #[serde(flatten)]
    report: CrossRatioReport,
    /// Whether every crossing cosine is `±1`, i.e. every angle is 0 or π.
    all_angles_0_or_pi: bool,
    mobius: MobiusCheck,
}

fn crossing_cosines(r: &CrossRatioReport) -> Vec<f64> {
    r.crossings.iter().flat_map(|c| c.cos_at).collect()
}

pub fn crossratio(cfg: &RunConfig) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coords: [[f64; 3]; 4] = match &cfg.points {
        Some(p) => [p[0], p[1], p[2], p[3]],
        None => std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))),
    };
    let points: [Point3; 4] = coords.map(|c| Point3::new(c[0], c[1], c[2]));
    let report = pqr_from_circles(&points)?;

    let base = crossing_cosines(&report);
    let mut dev_uv = 0.0f64;
    let mut dev_cross = 0.0f64;
    for _ in 0..cfg.mobius_maps {
        let m = MobiusMap::random(&mut rng, &points);
        let images = m.apply_all(&points)?;
        let image: [Point3; 4] = [images[0], images[1], images[2], images[3]];
        let r = pqr_from_circles(&image)?;
        dev_uv = dev_uv.max((r.u - report.u).abs()).max((r.v - report.v).abs());
        for (a, b) in base.iter().zip(crossing_cosines(&r)) {
            dev_cross = dev_cross.max((a - b).abs());
        }
    }
    let all_angles_0_or_pi = base.iter().all(|c| (c.abs() - 1.0).abs() <= UNIT_COS_TOL);
    let output = CrossRatioOutput {
        points: coords,
        report,
        all_angles_0_or_pi,
        mobius: MobiusCheck { maps: cfg.mobius_maps, seed: cfg.seed, max_deviation_uv: dev_uv, max_deviation_crossings: dev_cross },
    };

    let mut out = open_output(cfg)?;
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &output).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out).map_err(|e| CliError::Io(e.to_string()))?;
        }
        Format::Csv => write_crossratio_csv(&output, &mut out)?,
    }
    finish(out)
}

fn write_crossratio_csv<W: Write>(o: &CrossRatioOutput, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut put = |k: String, v: String| w.write_record([k, v]).map_err(CliError::csv);
    put("key".into(), "value".into())?;
    for (i, p) in o.points.iter().enumerate() {
        for (axis, c) in ["x", "y", "z"].iter().zip(p) {
            put(format!("point{}_{axis}", i + 1), format_real(Some(*c)))?;
        }
    }
    let r = &o.report;
    let reals = [
        ("u", r.u),
        ("v", r.v),
        ("p", r.p),
        ("q", r.q),
        ("r", r.r),
        ("phi", r.phi),
        ("psi", r.psi),
        ("chi", r.chi),
        ("residual_cubic", r.residual_cubic),
        ("residual_branch", r.residual_branch),
    ];
    for (k, v) in reals {
        put(k.into(), format_real(Some(v)))?;
    }
    for c in &r.crossings {
        for (n, at) in c.at.iter().enumerate() {
            put(format!("cos_c{}_c{}_at{}", c.i, c.j, at), format_real(Some(c.cos_at[n])))?;
        }
        put(format!("formula_c{}_c{}", c.i, c.j), c.formula.to_string())?;
    }
    let checks = [
        ("pairing_check", r.pairing_check),
        ("intersection_check", r.intersection_check),
        ("magnitude_agreement", r.magnitude_agreement),
        ("signed_agreement", r.signed_agreement),
    ];
    for (k, v) in checks {
        put(k.into(), format_real(Some(v)))?;
    }
    put("signs_agree".into(), r.signs_agree.to_string())?;
    put("all_angles_0_or_pi".into(), o.all_angles_0_or_pi.to_string())?;
    put("mobius_maps".into(), o.mobius.maps.to_string())?;
    put("mobius_seed".into(), o.mobius.seed.to_string())?;
    put("mobius_max_deviation_uv".into(), format_real(Some(o.mobius.max_deviation_uv)))?;
    put("mobius_max_deviation_crossings".into(), format_real(Some(o.mobius.max_deviation_crossings)))?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn tetrahedron(cfg: &RunConfig) -> Result<(), CliError> {
    let surface = tetrahedron_surface(cfg.grid_n).map_err(CliError::config)?;
    let mut out = open_output(cfg)?;
    match cfg.format {
        Format::Csv => write_surface_csv(&surface, &mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &surface).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out).map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    finish(out)
}
