use std::fmt;

use wpi_core::Issue;

/// Failures the CLI maps onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Config could not be parsed at all.
    #[error("{0}")]
    Parse(String),

    /// Every semantic problem found in the inputs.
    #[error("{}", IssueList(.0))]
    Validation(Vec<Issue>),

    #[error(transparent)]
    Core(#[from] wpi_core::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn issue(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation(vec![Issue::new(path, message)])
    }
}

struct IssueList<'a>(&'a [Issue]);

impl fmt::Display for IssueList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for issue in self.0 {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
