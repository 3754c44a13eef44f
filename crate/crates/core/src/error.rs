use thiserror::Error;

/// Errors produced by simulation, analysis, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: u32, n_qubits: u32 },

    #[error("gaussian packet under-resolved: momentum width {sigma} leaves 99% of the probability on fewer than 3 grid points")]
    UnderResolvedPacket { sigma: f64 },

    #[error("signal of length {len} too short for box ladder up to L={max_l} (need at least {need})")]
    SignalTooShort { len: usize, max_l: usize, need: usize },

    #[error("empty box-size ladder")]
    EmptyLadder,

    #[error("fewer than 4 usable ladder points inside the fit window")]
    InsufficientFitPoints,

    #[error("degenerate fit window: no scaling region (L_max <= 4 L_min)")]
    DegenerateWindow,

    #[error("no saturation detected within the series")]
    NoSaturation,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
