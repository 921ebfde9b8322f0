//! Convex-duality toolkit for complex geometry at desk scale.
//!
//! The crate ties together five strands of machinery:
//!
//! - [`transforms`]: discrete Legendre-Fenchel conjugates, the partial
//!   transforms `sup_a {v_a + a t}` / `inf_t {u_t - t a}`, and gradient
//!   image bodies;
//! - [`rwn`]: test curves and subgeodesic rays, their critical values, the
//!   round-trip between them, and the explicit sharp family on the round
//!   sphere with its `4 pi` density constant;
//! - [`valuations`] and [`okounkov`]: weighted monomial orders, valuation
//!   vectors, homogenization, and the convex bodies and positivity
//!   certificates built from them;
//! - [`toric`] and [`chebyshev`]: toric weights over lattice polytopes,
//!   normalized section bases, kernel fixed-point identities, and the
//!   rotation-invariant domain analogues (Azukawa indicators, Chebyshev
//!   bodies, kernel lower bounds);
//! - [`filtration`]: the finite-dimensional calculus of decreasing
//!   Hermitian norm families (jumping numbers, quotient monotonicity, flat
//!   reduction, jet norms, extension estimates).
//!
//! Start from the runnable examples under `examples/` for one tour per
//! capability, or the `okrwn` binary for a subcommand front end.

pub mod body;
pub mod chebyshev;
pub mod cli;
pub mod error;
pub mod ext_real;
pub mod filtration;
pub mod grid;
pub mod okounkov;
pub mod quadrature;
pub mod report;
pub mod rwn;
pub mod toric;
pub mod transforms;
pub mod valuations;

pub use error::{Error, Result};
