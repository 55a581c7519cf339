//! Exact-arithmetic engine for blow-up calculus on weighted trees.
//!
//! A [`WeightedForest`] carries integer self-intersection weights; the
//! associated symmetric matrix has determinant, signature, and per-vertex
//! labels maintained incrementally by [`BlowupState`]. All arithmetic is
//! exact (`BigInt` / `BigRational`); nothing here floats.

pub mod checks;
pub mod engine;
pub mod enumerate;
pub mod error;
pub mod forest;
pub mod io;
pub mod linalg;
mod serde_support;

pub use engine::{BlowupOp, BlowupState, HistoryEntry, LabelReport, VertexLabels};
pub use error::{Error, Result};
pub use forest::{GramMatrix, Signature, VertexId, WeightedForest};
