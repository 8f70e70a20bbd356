use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("population size n={n} is below the minimum of 4")]
    PopulationTooSmall { n: u32 },
    #[error("population size n={n} exceeds the supported maximum of 2^20")]
    PopulationTooLarge { n: u32 },
    #[error("rho={rho} outside [1, ceil(sqrt({n}))={max}]")]
    RhoOutOfRange { rho: u32, n: u32, max: u32 },
    #[error("constant {name}={value} is below its minimum {min}")]
    ConstantTooSmall {
        name: &'static str,
        value: u32,
        min: u32,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown target finder `{0}`")]
    UnknownTargetFinder(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
