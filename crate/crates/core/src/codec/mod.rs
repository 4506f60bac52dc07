//! Concatenated constant-weight array codes.

mod concat;
pub mod gf;
mod inner;
pub mod rs;
pub mod stream;

pub use concat::{plan_params, CodeDescription, ColumnDiagnostic, ConcatenatedCode, DecodeOutcome, DecodeStatus, Plan};
pub use gf::Field;
pub use inner::{build_inner_lexicode, InnerCode, InnerDecision};
pub use rs::{RsCode, RsDecoded};
