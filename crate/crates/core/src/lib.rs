//! Numerical checks of Heinz-type norm inequalities and their
//! Hermite-Hadamard refinements, built around
//! `2|||A^(1/2) X B^(1/2)||| <= |||A^nu X B^(1-nu) + A^(1-nu) X B^nu||| <= |||AX + XB|||`
//! for positive definite `A`, `B` and unitarily invariant norms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chains;
pub mod error;
pub mod heinz;
pub mod hermite_hadamard;
pub mod linalg;
pub mod norms;
pub mod quadrature;
pub mod report;
pub mod suite;

pub use chains::{evaluate_chain, ChainParams, ChainReport, EvalConfig, TheoremId, Verdict};
pub use error::{Error, Result};
pub use heinz::{HeinzInstance, HeinzProfile};
pub use hermite_hadamard::ConvexFn;
pub use linalg::{DenseMatrix, PdMatrix, C64};
pub use norms::NormKind;
pub use quadrature::QuadratureConfig;
pub use report::{emit_report, write_report, ReportFormat};
pub use suite::{run_suite, SuiteConfig, SuiteResult};
