use std::path::PathBuf;

/// Lattice index of a cell or staggered node (node `k` sits at `k + 1/2`).
pub type CellIndex = (isize, isize);

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("nonpositive density {rho:e}{}", at(.cell))]
    NonpositiveDensity { rho: f64, cell: Option<CellIndex> },

    #[error("nonpositive pressure {p:e}{}", at(.cell))]
    NonpositivePressure { p: f64, cell: Option<CellIndex> },

    #[error("invalid state: {reason}{}", at(.cell))]
    InvalidState {
        reason: String,
        cell: Option<CellIndex>,
    },

    #[error("missing ghost layer: {0}")]
    MissingGhostLayer(String),

    #[error("zero magnetic field inside the piston window at column {i}")]
    ZeroFieldInPiston { i: isize },

    #[error("coordinate {coord} outside the domain [{lo}, {hi}]")]
    OutOfDomain { coord: f64, lo: f64, hi: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("step {step} at t = {time:.6e}: {source}")]
    Solver {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },
}

fn at(cell: &Option<CellIndex>) -> String {
    match cell {
        Some((i, j)) => format!(" at cell ({i}, {j})"),
        None => String::new(),
    }
}

impl Error {
    /// Attaches a cell index to state errors raised by pointwise physics.
    pub fn at_cell(self, i: isize, j: isize) -> Self {
        match self {
            Error::NonpositiveDensity { rho, .. } => Error::NonpositiveDensity {
                rho,
                cell: Some((i, j)),
            },
            Error::NonpositivePressure { p, .. } => Error::NonpositivePressure {
                p,
                cell: Some((i, j)),
            },
            Error::InvalidState { reason, .. } => Error::InvalidState {
                reason,
                cell: Some((i, j)),
            },
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) | Error::OutOfDomain { .. } => 2,
            Error::Io { .. } => 4,
            Error::Solver { source, .. } => source.exit_code(),
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
