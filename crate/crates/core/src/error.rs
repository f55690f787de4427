use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("momentum is off the mass shell: |p² - m²|/m² = {deviation:e}")]
    OffShell { deviation: f64 },

    #[error("propagator too close to the pole: q² - m² = {q2_minus_m2:e} MeV²")]
    PropagatorPole { q2_minus_m2: f64 },

    #[error("degenerate photon direction: energy closure denominator = {denominator:e}")]
    DegenerateDirection { denominator: f64 },

    #[error("phase-space point is unphysical")]
    Unphysical,

    #[error("all amplitudes vanish; density matrix undefined")]
    VanishingAmplitudes,

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error(
        "witness optimization did not converge after {iterations} iterations \
         (primal residual {primal:e}, dual residual {dual:e})"
    )]
    NonConvergence {
        iterations: usize,
        primal: f64,
        dual: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampling budget of {given} samples is too small (need at least {needed})")]
    Budget { given: u64, needed: u64 },

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("malformed data at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
