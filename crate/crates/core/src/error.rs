use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid channel plan: {0}")]
    InvalidPlan(String),

    #[error("channel index {index} out of range for a plan of {count} channels")]
    ChannelOutOfRange { index: usize, count: usize },

    #[error("channel {0} has zero launch power")]
    ZeroPower(usize),

    #[error("spans use differing fibre parameters; the NLI estimators need a homogeneous link")]
    MixedFiber,

    #[error("Raman solver failed to converge: {0}")]
    OdeStep(String),

    #[error("non-positive power in channel {channel} at z = {z} m (span {span})")]
    NonPositivePower { span: usize, channel: usize, z: f64 },

    #[error(
        "effective attenuation not bracketed for channel {channel}: L_eff = {l_eff} m is not below the span length {length} m"
    )]
    NoBracket { channel: usize, l_eff: f64, length: f64 },

    #[error("the ISRS power transfer needs at least two channels")]
    SingleChannel,

    #[error("quadrature tolerance not met: value {value:e}, achieved error {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { value: f64, achieved: f64, requested: f64 },

    #[error("zero dispersion at channel {0}")]
    ZeroDispersion(usize),

    #[error("step size too coarse: nonlinear phase of {phase} rad per step exceeds {limit} rad")]
    StepTooCoarse { phase: f64, limit: f64 },

    #[error("{what} = {value} must be a power of two")]
    NotPowerOfTwo { what: &'static str, value: usize },

    #[error("simulation setup: {0}")]
    Simulation(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
