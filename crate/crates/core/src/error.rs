use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("budget of {budget} exhausted: {what}")]
    BudgetExhausted { budget: u64, what: String },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dead end: {0}")]
    DeadEnd(String),
}

impl LabError {
    pub fn exhausted(budget: u64, what: impl Into<String>) -> Self {
        LabError::BudgetExhausted {
            budget,
            what: what.into(),
        }
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        LabError::Contract(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        LabError::Invalid(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, LabError::BudgetExhausted { .. })
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
