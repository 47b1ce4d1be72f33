//! Analysis of asynchronous Boolean systems under the unbounded gate delay
//! model: reachability, fairness, delay-insensitivity, hazards,
//! semi-modularity and the condition of good running, with witnesses and a
//! brute-force oracle for cross-checking.

pub mod cli;
pub mod error;
pub mod field;
pub mod io;
pub mod nonautonomous;
pub mod oracle;
pub mod properties;
pub mod relations;
pub mod selftest;
pub mod state;

pub use error::{Error, Result};
pub use field::{OrbitSummary, ParamVectorField, VectorField};
pub use nonautonomous::{classify_param, close_field, ClosedField, ModeQualifiedReport};
pub use properties::{classify, Defect, Law, PropertyReport, Verdict, Witness};
pub use state::{CoordSet, InputVector, State, TotalState};
