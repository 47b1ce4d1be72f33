//! Model ingestion, diagrams and reports.

pub mod dot;
pub mod expr;
pub mod model;
pub mod report;

pub use dot::{emit_closed_dot, emit_dot};
pub use expr::{parse_expression, Expr, Var};
pub use model::{parse_model, serialize_model, ModelDocument};
pub use report::{mode_report_json, report_json, report_text, ReportDocument};
