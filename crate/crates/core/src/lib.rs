//! Scalar differential invariants of conformal metric structures.
//!
//! The crate computes curvature from metric jets (truncated Taylor data at a
//! point), builds the Weyl/Cotton based scalar invariants of a conformal class
//! together with a canonical frame, and independently verifies the counts of
//! independent invariants per jet order by exact rank computations.

pub mod cli;
pub mod error;
pub mod invariants;
pub mod jet;
pub mod metric_io;
pub mod orbit;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use jet::{AnyJet, Jet, MultiIndex};
pub use scalar::{Backend, Scalar, Q};
pub use tensor::{DiffeoJet, MetricJet, Slot, Symmetry, TensorJet};
