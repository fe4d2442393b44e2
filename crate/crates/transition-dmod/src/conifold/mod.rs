//! Sandbox for small transitions: J-functions of Calabi-Yau threefolds
//! assembled from finite curve-count tables, the split into a part with
//! nonvanishing pushforward and an exceptional multiple-cover part, and the
//! restriction onto the contracted side with fiberwise summed counts.
//!
//! The homology bookkeeping is synthetic input data; this module verifies
//! the structural identities between the series built from it, not any
//! geometry. Curve classes and the point class live in a formal ring whose
//! generators multiply to zero, so every series coefficient is a linear
//! combination of class slots.

mod data;
mod jfun;

pub use data::{cy_ring, TransitionData};
pub use jfun::{
    cy_j_series, decompose, expected_y_series, multiple_cover_series, restrict_to_locus,
    total_j_series, CYJSeries,
};

use crate::cohring::RingError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConifoldError {
    #[error("transition data parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("inconsistent transition data: {0}")]
    Data(String),
    #[error("series shape violation: {0}")]
    Shape(String),
    #[error("class {0} pushes forward to zero, so its fiber over the contracted side is infinite")]
    LambdaInfinite(String),
    #[error("cannot read transition data: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Ring(#[from] RingError),
}
