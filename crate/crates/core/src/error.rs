use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..=12")]
    QubitCount(usize),

    #[error("qubit index {index} invalid for a {n_qubits}-qubit state")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("control and target must differ (both {0})")]
    ControlIsTarget(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("training diverged at step {step} (loss {loss})")]
    Diverged { step: usize, loss: f64 },

    #[error("design matrix ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("underdetermined system: {rows} samples for {columns} columns")]
    Underdetermined { rows: usize, columns: usize },

    #[error("rank-deficient design matrix (condition estimate {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("degenerate region: zero extent on axis {axis}")]
    DegenerateRegion { axis: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("R² undefined: target values are constant")]
    UndefinedR2,

    #[error("labels must contain both classes")]
    SingleClass,

    #[error("invalid label {0}; expected -1 or +1")]
    InvalidLabel(f64),

    #[error("Platt scaling has not been fitted")]
    PlattNotFitted,

    #[error("column {column} has zero {what}")]
    DegenerateColumn { column: usize, what: &'static str },

    #[error("requested {requested} components, at most {max} available")]
    ComponentCount { requested: usize, max: usize },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{source_name} line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
