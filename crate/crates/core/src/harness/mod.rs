//! Verification harness: instance generation, bound checks, reports and the
//! algorithm pipelines.

pub mod family;
pub mod parse;
pub mod pipelines;
pub mod report;
pub mod verify;

pub use family::{generate, Instance, InstanceFamily, Mode, Problem};
pub use pipelines::{run_graeffe, run_qr, GraeffeReport, QrReport};
pub use report::{emit_report, ReportFormat, ReportWriter};
pub use verify::{verify, verify_collect, verify_instance, Status, Summary, VerificationRecord, VerifyOptions};
