use thiserror::Error;

use crate::measurements::CompletenessReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{measurement} is undefined at initial step 0")]
    InitialStep { measurement: &'static str },

    #[error("no prior steps: decay weights need at least one prior dataset")]
    NoPriorSteps,

    #[error("step {step} is out of range for a matrix with {num_steps} steps")]
    StepOutOfRange { step: usize, num_steps: usize },

    #[error("repetition {repetition} is out of range ({num_repetitions} repetitions)")]
    RepetitionOutOfRange { repetition: usize, num_repetitions: usize },

    #[error("incomplete score matrix:\n{0}")]
    Incomplete(CompletenessReport),

    #[error(
        "score {score} for (model {model_step}, dataset {dataset_step}, repetition {repetition}) \
         lies outside metric range [{low}, {high}]"
    )]
    ScoreOutOfRange {
        model_step: usize,
        dataset_step: usize,
        repetition: usize,
        score: f64,
        low: f64,
        high: f64,
    },

    #[error("duplicate cell (model {model_step}, dataset {dataset_step}, repetition {repetition})")]
    DuplicateCell {
        model_step: usize,
        dataset_step: usize,
        repetition: usize,
    },

    #[error("AUROC undefined for single-class labels")]
    SingleClass,

    #[error("cannot summarize an empty sample")]
    EmptySamples,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown scenario '{name}' (valid: {})", valid.join(", "))]
    UnknownScenario { name: String, valid: Vec<String> },

    #[error("non-finite training loss at epoch {epoch}: loss={loss}, max |weight|={max_weight}, bias={bias}")]
    NonFiniteLoss {
        epoch: usize,
        loss: f64,
        max_weight: f64,
        bias: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
