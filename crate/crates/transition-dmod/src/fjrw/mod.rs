//! Landau-Ginzburg side of the transition: the narrow-sector I-functions
//! of the cubic singularity x^3 + y^3 + z^3 + w^3 with its diagonal
//! order-three symmetry, the coefficient-level comparison against the
//! fractional-exponent continued solutions, and the monodromy rank
//! accounting that isolates a two-dimensional quotient.
//!
//! All coefficients are exact rationals; the per-sector transcendental
//! factor, a product of Gamma values at thirds, is carried symbolically
//! as a [`GammaConst`] so every assertion stays in exact arithmetic.

mod compare;
mod ranks;
mod series;

pub use compare::{
    compare_limit, comparison_table, continued_scalars, sector_comparison, Comparison,
    ComparisonRow, SectorComparison,
};
pub use ranks::{rank_accounting, solution_components, RankAccounting};
pub use series::{fjrw_formal, fjrw_regularized, FJRWSeries, GammaConst, Sector};

use crate::cohring::Rat;
use crate::logseries::SeriesError;
use crate::pfops::PfError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FjrwError {
    #[error("comparison ratio is not constant: {sector} at l = {l} gives {found}, previous terms give {expected}")]
    ComparisonFailed {
        sector: Sector,
        l: u32,
        found: Rat,
        expected: Rat,
    },
    #[error("rank accounting mismatch: {0}")]
    Accounting(String),
    #[error("series value at l = {l} is not a plain scalar: {msg}")]
    Shape { l: u32, msg: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Pf(#[from] PfError),
}
