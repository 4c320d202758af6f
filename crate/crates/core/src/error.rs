use thiserror::Error;

/// Errors raised by the simulation and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("all amplitudes are zero")]
    ZeroNorm,
    #[error("dimension mismatch: expected {expected} amplitudes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("subsystem label `{0}` appears in both operands")]
    LabelCollision(String),
    #[error("label order differs: {left:?} vs {right:?}")]
    LabelMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },
    #[error("unknown subsystem `{0}`")]
    UnknownSubsystem(String),
    #[error("measurements overlap on subsystem `{0}`")]
    OverlappingSubsystems(String),
    #[error("measurement on {0:?} is incomplete")]
    IncompleteMeasurement(Vec<String>),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("unknown outcome label `{0}`")]
    UnknownOutcome(String),
    #[error("outcome `{label}` has probability {probability:e}")]
    ZeroProbabilityOutcome { label: String, probability: f64 },
    #[error("choice amplitudes are not normalized: |alpha|^2 + |beta|^2 = {0}")]
    InvalidAmplitudes(f64),
    #[error("degenerate choice: |alpha| = {0} leaves no room for a decoding basis")]
    DegenerateChoice(f64),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid empirical model: {0}")]
    InvalidModel(String),
    #[error("unknown party `{0}`")]
    UnknownParty(String),
    #[error("unknown setting `{setting}` for party `{party}`")]
    UnknownSetting { party: String, setting: String },
    #[error("conditioning event has probability {0:e}")]
    ZeroConditioningEvent(f64),
    #[error("epsilon {epsilon:e} is too large: {reason}")]
    EpsilonTooLarge { epsilon: f64, reason: String },
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("{count} global assignments exceed the limit of {limit}")]
    SizeLimit { count: u128, limit: u64 },
    #[error("party `{party}` setting `{setting}` does not have exactly two outcomes")]
    NonBinaryOutcomes { party: String, setting: String },
    #[error("model signals: marginal discrepancy {0:e} exceeds tolerance")]
    Signalling(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
