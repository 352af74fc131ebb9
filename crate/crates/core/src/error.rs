use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),

    #[error("invalid parameters for {curve}: {reason}")]
    InvalidParams { curve: String, reason: String },

    #[error("degenerate curve: speed {speed:e} below regularity floor at t = {t}")]
    DegenerateCurve { t: f64, speed: f64 },

    #[error("{what} = {value} outside domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("inflection point at s = {s}: curvature {kappa:e} below floor")]
    Inflection { s: f64, kappa: f64 },

    #[error("derivative of order {requested} unavailable (curve provides up to {available})")]
    Capability { requested: usize, available: usize },

    #[error("conformal degeneracy at s = {s}: nu = {nu:e} at or below floor")]
    ConformalDegeneracy { s: f64, nu: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degenerate plane: triple is collinear")]
    DegeneratePlane,

    #[error("degenerate sphere: quadruple is coplanar")]
    DegenerateSphere,

    #[error("point {0:?} lies at an inversion center")]
    Pole([f64; 3]),

    #[error("cross ratios (u, v) = ({u}, {v}) violate {bound}")]
    OutOfRegion { u: f64, v: f64, bound: &'static str },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("polyline: {0}")]
    Polyline(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that stem from the geometry or numerics rather than from the
    /// caller's configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateCurve { .. }
                | Error::Inflection { .. }
                | Error::ConformalDegeneracy { .. }
                | Error::DegenerateInput(_)
                | Error::DegeneratePlane
                | Error::DegenerateSphere
                | Error::Pole(_)
                | Error::OutOfRegion { .. }
                | Error::Numerical(_)
                | Error::Capability { .. }
                | Error::Domain { .. }
        )
    }
}
