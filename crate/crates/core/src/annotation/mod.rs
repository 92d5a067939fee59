//! Human post-editing and scoring workflow: item pool, per-step views, an
//! append-only event log and the HTTP API over it.

mod error;
mod export;
pub mod http;
mod log;
mod model;
mod pool;
mod service;

pub use error::AnnotationError;
pub use export::{
    agreement_report, parse_export, read_export, render_export, AgreementCell, AgreementReport, AgreementRow,
    ExportFilter, EXPORT_HEADER,
};
pub use log::EventLog;
pub use model::{AnnotationItem, Event, EventRecord, ItemProgress, NextItem, RatingRecord, StepView, WorkflowState};
pub use pool::{build_pool, load_pool, SystemOutput};
pub use service::AnnotationService;
