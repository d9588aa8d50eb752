use std::fmt;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Synchronization(String),
    FormulaSingular(String),
    Overlap(String),
    /// The oracle ran but its paths disagree beyond the tolerance.
    Disagreement(f64),
    Io(std::io::Error),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Synchronization(_) => 3,
            CliError::FormulaSingular(_) => 4,
            CliError::Overlap(_) => 5,
            CliError::Disagreement(_) | CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Synchronization(m) => write!(f, "{m}"),
            CliError::FormulaSingular(m) => write!(f, "{m}"),
            CliError::Overlap(m) => write!(f, "{m}"),
            CliError::Disagreement(d) => write!(f, "oracle paths differ by {d:e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<relepr::Error> for CliError {
    fn from(e: relepr::Error) -> Self {
        use relepr::Error as E;
        let message = e.to_string();
        match e {
            E::SynchronizationSingularity { .. } => CliError::Synchronization(message),
            E::AntipodalDirections(_) | E::UndefinedDirection => CliError::FormulaSingular(message),
            E::RegionOverlap { .. } => CliError::Overlap(message),
            E::NonUnitVector { .. } | E::InvalidSpin(_) | E::DimensionMismatch { .. } | E::InvalidGrid(_) => {
                CliError::Parse(message)
            }
            _ => CliError::Other(message),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
