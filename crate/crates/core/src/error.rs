use thiserror::Error;

/// Errors raised by the metric, entropy and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("task `{task}`: {reason}")]
    InvalidTask { task: String, reason: String },

    #[error("duplicate task id `{0}`")]
    DuplicateTask(String),

    #[error("sub-Landauer overhead: F = {0} < 1")]
    SubLandauerOverhead(f64),

    #[error("Φ undefined at zero intelligence")]
    ZeroIntelligence,

    #[error("comparison requires fixed algorithm: {0}")]
    ComparisonMismatch(String),

    #[error("state `{0}` is not in the measure's domain")]
    NotInDomain(String),

    #[error("enumeration budget exceeded: no program of length <= {max_len} outputs `{target}`")]
    EnumerationBudgetExceeded { target: String, max_len: u32 },

    #[error("kernel is not ergodic: {0}")]
    NonErgodic(String),

    #[error("invalid model: {}", join_issues(.0))]
    InvalidModel(Vec<Issue>),

    #[error("impossible transition {from} -> {to}: P(y|x) = 0")]
    ImpossibleTransition { from: String, to: String },

    #[error("adaptation energy must be positive (got {0})")]
    NonPositiveAdaptationEnergy(f64),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// One validation finding, located by a JSON-pointer-style path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl Issue {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Issue {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Issue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", if self.path.is_empty() { "/" } else { &self.path }, self.message)
    }
}

fn join_issues(issues: &[Issue]) -> String {
    issues.iter().map(Issue::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
