//! Run configuration: a TOML file with sections, overridden field by field
//! by command-line flags.

use std::path::{Path, PathBuf};

use confinv::rectifier::{Schedule, SphereNormals};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CurveSource {
    Catalog { name: String, params: Vec<f64> },
    Polyline(PathBuf),
}

/// Geometric `{start, ratio, count}` or an explicit step list. Missing
/// fields fall back to the estimator's default schedule.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub start: Option<f64>,
    pub ratio: Option<f64>,
    pub count: Option<usize>,
    pub steps: Option<Vec<f64>>,
}

impl ScheduleSpec {
    fn is_empty(&self) -> bool {
        self.start.is_none() && self.ratio.is_none() && self.count.is_none() && self.steps.is_none()
    }

    fn overlay(&mut self, other: &ScheduleSpec) {
        if other.steps.is_some() {
            self.steps = other.steps.clone();
        }
        if other.start.is_some() || other.ratio.is_some() || other.count.is_some() {
            // Flags describe a geometric schedule; drop any file step list.
            self.steps = None;
        }
        self.start = other.start.or(self.start);
        self.ratio = other.ratio.or(self.ratio);
        self.count = other.count.or(self.count);
    }

    pub fn resolve(&self, default: &Schedule) -> Result<Schedule, CliError> {
        let sched = if let Some(steps) = &self.steps {
            Schedule::from_steps(steps.clone())
        } else {
            let d = default.steps();
            let start = self.start.unwrap_or(d[0]);
            let ratio = self.ratio.unwrap_or(d[0] / d[1]);
            let count = self.count.unwrap_or(d.len());
            Schedule::geometric(start, ratio, count)
        };
        sched.map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveSection {
    name: Option<String>,
    params: Option<Vec<f64>>,
    polyline: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplingSection {
    s0: Option<f64>,
    s_min: Option<f64>,
    s_max: Option<f64>,
    rows: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleSection {
    omega: Option<ScheduleSpec>,
    epsilon: Option<ScheduleSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    format: Option<Format>,
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    seed: Option<u64>,
    which: Option<String>,
    points: Option<Vec<[f64; 3]>>,
    grid_n: Option<usize>,
    mobius_maps: Option<usize>,
    sphere_normals: Option<SphereNormals>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToleranceSection {
    quadrature: Option<f64>,
    nu_floor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    curve: CurveSection,
    #[serde(default)]
    sampling: SamplingSection,
    #[serde(default)]
    schedule: ScheduleSection,
    #[serde(default)]
    output: OutputSection,
    #[serde(default)]
    run: RunSection,
    #[serde(default)]
    tolerances: ToleranceSection,
}

/// Flag values; `None` means "not given on the command line".
#[derive(Debug, Default)]
pub struct Overrides {
    pub curve: Option<String>,
    pub params: Option<Vec<f64>>,
    pub polyline: Option<PathBuf>,
    pub s0: Option<f64>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub rows: Option<usize>,
    pub omega: ScheduleSpec,
    pub epsilon: ScheduleSpec,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub which: Option<String>,
    pub points: Option<Vec<[f64; 3]>>,
    pub grid_n: Option<usize>,
    pub sphere_normals: Option<SphereNormals>,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_ROWS: usize = 11;
pub const DEFAULT_GRID_N: usize = 50;
pub const DEFAULT_MOBIUS_MAPS: usize = 10;
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub curve: Option<CurveSource>,
    pub s0: Option<f64>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub rows: usize,
    pub omega: ScheduleSpec,
    pub epsilon: ScheduleSpec,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub which: Option<String>,
    pub points: Option<Vec<[f64; 3]>>,
    pub grid_n: usize,
    pub mobius_maps: usize,
    pub sphere_normals: SphereNormals,
    pub quadrature_tol: f64,
    pub nu_floor: f64,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn load(path: Option<&Path>, flags: Overrides) -> Result<Self, CliError> {
        let file = match path {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };

        // A polyline on either side replaces a catalog curve on the other.
        let polyline = flags.polyline.or(if flags.curve.is_some() { None } else { file.curve.polyline });
        let name = flags.curve.or(if polyline.is_some() { None } else { file.curve.name });
        let curve = match (name, polyline) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either a catalog curve or a polyline, not both".into())),
            (Some(name), None) => Some(CurveSource::Catalog {
                name,
                params: flags.params.or(file.curve.params).unwrap_or_default(),
            }),
            (None, Some(p)) => Some(CurveSource::Polyline(p)),
            (None, None) => None,
        };

        let mut omega = file.schedule.omega.unwrap_or_default();
        omega.overlay(&flags.omega);
        let mut epsilon = file.schedule.epsilon.unwrap_or_default();
        epsilon.overlay(&flags.epsilon);

        let cfg = RunConfig {
            curve,
            s0: flags.s0.or(file.sampling.s0),
            s_min: flags.s_min.or(file.sampling.s_min),
            s_max: flags.s_max.or(file.sampling.s_max),
            rows: flags.rows.or(file.sampling.rows).unwrap_or(DEFAULT_ROWS),
            omega,
            epsilon,
            format: flags.format.or(file.output.format).unwrap_or_default(),
            out: flags.out.or(file.output.out),
            seed: flags.seed.or(file.run.seed).unwrap_or(DEFAULT_SEED),
            which: flags.which.or(file.run.which),
            points: flags.points.or(file.run.points),
            grid_n: flags.grid_n.or(file.run.grid_n).unwrap_or(DEFAULT_GRID_N),
            mobius_maps: file.run.mobius_maps.unwrap_or(DEFAULT_MOBIUS_MAPS),
            sphere_normals: flags.sphere_normals.or(file.run.sphere_normals).unwrap_or_default(),
            quadrature_tol: file.tolerances.quadrature.unwrap_or(DEFAULT_QUADRATURE_TOL),
            nu_floor: file.tolerances.nu_floor.unwrap_or(confinv::conformal::NU_FLOOR),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.quadrature_tol > 0.0) {
            return Err(CliError::Config(format!("tolerances.quadrature must be positive, got {}", self.quadrature_tol)));
        }
        if !(self.nu_floor >= 0.0) {
            return Err(CliError::Config(format!("tolerances.nu_floor must be non-negative, got {}", self.nu_floor)));
        }
        if self.rows == 0 {
            return Err(CliError::Config("sampling.rows must be at least 1".into()));
        }
        if self.grid_n < 2 {
            return Err(CliError::Config(format!("run.grid_n must be at least 2, got {}", self.grid_n)));
        }
        for (label, spec) in [("omega", &self.omega), ("epsilon", &self.epsilon)] {
            if let Some(steps) = &spec.steps {
                Schedule::from_steps(steps.clone()).map_err(|e| CliError::Config(format!("schedule.{label}: {e}")))?;
            }
            if !spec.is_empty() && spec.count == Some(0) {
                return Err(CliError::Config(format!("schedule.{label}.count must be positive")));
            }
        }
        if let Some(pts) = &self.points {
            if pts.len() != 4 {
                return Err(CliError::Config(format!("expected 4 points, got {}", pts.len())));
            }
        }
        Ok(())
    }
}
