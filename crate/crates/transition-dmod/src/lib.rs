//! Exact and numerical verification engine for the quantum D-modules of a
//! cubic extremal transition.
//!
//! The crate is organized bottom-up:
//!
//! - [`cohring`]: exact arithmetic in nilpotent cohomology rings, Laurent
//!   polynomials in z over them, and Pochhammer-style ratio products.
//! - [`logseries`]: cohomology-valued hypergeometric series with log
//!   prefactors, the concrete series of both geometries, and component
//!   expansion over the basis.
//! - [`pfops`]: the z-difference-differential operator algebra, annihilator
//!   verification, variable substitution, and monodromy-based rank
//!   accounting of solution spaces.
//! - [`mbnumeric`]: complex Gamma and polygamma jets, Mellin-Barnes residue
//!   evaluation, contour quadrature, continuation coefficients, and the
//!   dilogarithm/trilogarithm with monodromy transport.
//! - [`conifold`]: small-resolution transition bookkeeping for Gromov-Witten
//!   series and the multiple-cover decomposition.
//! - [`fjrw`]: comparison of the continued series with the Landau-Ginzburg
//!   side coefficients.
//! - [`report`] and [`suites`]: machine-readable verification reports and
//!   the named check suites behind the command line interface.

pub mod cohring;
pub mod conifold;
pub mod fjrw;
pub mod logseries;
pub mod mbnumeric;
pub mod pfops;
