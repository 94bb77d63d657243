use thiserror::Error;

/// A named check failure. `clause` identifies the first violated condition
/// (e.g. `"involution"`, `"vertex injectivity"`, `"(ii)"`), `detail` says what
/// went wrong on which element.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{clause}: {detail}")]
pub struct Violation {
    pub clause: String,
    pub detail: String,
}

impl Violation {
    pub fn new(clause: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation {
            clause: clause.into(),
            detail: detail.into(),
        }
    }
}

/// Shorthand for `Err(Violation::new(..))`.
pub fn violation<T>(clause: impl Into<String>, detail: impl Into<String>) -> Result<T, Violation> {
    Err(Violation::new(clause, detail))
}
