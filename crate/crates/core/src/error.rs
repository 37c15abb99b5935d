use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("input has zero energy")]
    ZeroEnergy,

    #[error("profile has no half-maximum crossing inside the grid")]
    FlatProfile,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("wavelength {wavelength_nm:.3} nm outside valid range [{min_nm:.3}, {max_nm:.3}] nm")]
    OutOfRange {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),

    #[error("no matched wavelength in [{lo_nm:.3}, {hi_nm:.3}] nm: group-delay difference does not change sign")]
    NoMatchedWavelength { lo_nm: f64, hi_nm: f64 },

    #[error(
        "z step {dz:.4e} m exceeds a quarter nonlinear length ({limit:.4e} m); use at least {min_steps} z steps"
    )]
    StepTooCoarse { dz: f64, limit: f64, min_steps: usize },

    #[error(
        "target shift {target_thz:.4} THz is unreachable: the largest shift is {reached_thz:.4} THz at {max_power_w:.4e} W"
    )]
    Saturated {
        target_thz: f64,
        reached_thz: f64,
        max_power_w: f64,
    },

    #[error("numerical consistency failure: {0}")]
    Numerical(String),

    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("csv error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn config(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: msg.into(),
        }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Json(_) | Error::StepTooCoarse { .. } => 2,
            Error::Numerical(_) => 3,
            Error::Saturated { .. } => 4,
            _ => 1,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
