use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("bearing undefined: target coincides with the agent in the horizontal plane")]
    ZeroSeparation,

    #[error("{field} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        field: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("token {field} = {value} outside 0..=98")]
    TokenOutOfRange { field: &'static str, value: u8 },

    #[error("LAND has no kinematic decoding")]
    LandHasNoDecode,

    #[error("scene generation failed after {attempts} attempts: {constraint}")]
    Generation { attempts: usize, constraint: String },

    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),

    #[error("view resolution mismatch: front {front}x{front}, down {down}x{down}")]
    ResolutionMismatch { front: usize, down: usize },

    #[error("invalid view resolution {0}: must be even and >= 16")]
    InvalidResolution(usize),

    #[error("target description must not be empty")]
    EmptyDescription,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("unsupported format_version {found} in {what} (expected {expected})")]
    FormatVersion {
        what: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {source}")]
    Json {
        path: String,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Short stable identifier, used for machine-parseable CLI errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "non_finite",
            Error::ZeroSeparation => "zero_separation",
            Error::OutOfRange { .. } => "out_of_range",
            Error::TokenOutOfRange { .. } => "token_out_of_range",
            Error::LandHasNoDecode => "land_has_no_decode",
            Error::Generation { .. } => "generation",
            Error::InvalidParams(_) => "invalid_params",
            Error::ResolutionMismatch { .. } => "resolution_mismatch",
            Error::InvalidResolution(_) => "invalid_resolution",
            Error::EmptyDescription => "empty_description",
            Error::EmptyInput(_) => "empty_input",
            Error::InvalidConfig(_) => "invalid_config",
            Error::FormatVersion { .. } => "format_version",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
