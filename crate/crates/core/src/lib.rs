//! Numerical laboratory for the extended pair correlation of Riemann zeros
//! and the prime-side quantities it is tied to.
// Guards are written `!(x > 0.0)` so that NaN is rejected too; constants keep
// their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod arith;
pub mod asympt;
pub mod error;
pub mod explicit;
pub mod paircorr;
pub mod quad;
pub mod report;
pub mod shortint;
pub mod special;
pub mod sum;
pub mod zerodata;

pub use arith::LambdaTable;
pub use error::{LabError, Result};
pub use paircorr::{FValue, PairCorrParams};
pub use quad::{Integral, QuadratureSpec};
pub use report::{ReportRow, RunConfig, Status};
pub use sum::Execution;
pub use zerodata::{Origin, SignedZeroWindow, ZeroOrdinates};
