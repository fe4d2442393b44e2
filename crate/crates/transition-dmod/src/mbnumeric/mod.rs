//! Numerical side of the Mellin-Barnes continuation.
//!
//! The exact layers build series with coefficients in a nilpotent quotient
//! ring. This module evaluates the same objects in floating point: ring
//! elements become jets (truncated Taylor expansions along the nilpotent
//! generators), the Barnes integrand becomes a jet-valued function of the
//! integration variable, and contour integrals, residue sums, and branch
//! continuations become honest numerics with stated tolerances.
//!
//! The headline check is [`verify_reduction`]: the residue bookkeeping on
//! one side, the exact Pochhammer closed form on the other, compared
//! coordinate-by-coordinate after all stiff Gamma and sine factors cancel.
//! The polylogarithm transport in [`polylog`] backs the multiple-cover
//! checks of the conifold layer.

use crate::logseries::Family;
use thiserror::Error;

mod factored;
mod gammafn;
mod jets;
mod polylog;
mod reduction;
mod residues;

pub use factored::{divide_by_w, Factored};
pub use gammafn::{gamma, near_gamma_pole, polygamma};
pub use jets::{
    jet_exp, jet_gamma, jet_power, jet_recip, jet_recip_gamma, jet_sin, unit_expm1, unit_sinc,
    Jet,
};
pub use polylog::{polylog, polylog_monodromy_jump, polylog_on_path};
pub use reduction::{
    continuation_coefficient, verify_reduction, verify_reduction_with_flip, ReductionReport,
    ReductionRow,
};
pub use residues::{
    contour_integral, contour_integral_with_panels, eval_g, group_residue, residue_sum,
    ContourSpec, Side,
};

#[derive(Debug, Error)]
pub enum MbError {
    #[error("pole encountered: {what}")]
    Pole { what: String },
    #[error("contour integration failed: {0}")]
    Contour(String),
    #[error("reduction mismatch for {family} at (l, d2) = {index:?}: relative deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    ReductionMismatch {
        family: Family,
        index: (u32, u32),
        deviation: f64,
        tolerance: f64,
    },
    #[error("branch point too close: {0}")]
    BranchPoint(String),
    #[error("malformed numeric object: {0}")]
    Shape(String),
}
