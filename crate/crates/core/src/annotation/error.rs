use super::WorkflowState;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("unknown session {0}")]
    UnknownSession(String),

    #[error("unknown item {0}")]
    UnknownItem(String),

    #[error("item {item_id} is not assigned to annotator {annotator}")]
    NotAssigned { item_id: String, annotator: String },

    #[error("cannot {action} item {item_id} in state {state}")]
    StateViolation {
        item_id: String,
        state: WorkflowState,
        action: &'static str,
    },

    #[error("annotator {annotator} must finish item {item_id} first")]
    InFlight { annotator: String, item_id: String },

    #[error("invalid submission: {0}")]
    Validation(String),

    #[error("annotators {a} and {b} share no scored items")]
    EmptyOverlap { a: String, b: String },

    #[error("invalid item pool: {0}")]
    Pool(String),

    #[error("event log {path}: {message}")]
    Log { path: String, message: String },
}
