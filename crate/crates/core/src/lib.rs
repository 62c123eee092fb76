//! Numerical toolkit for the `r`-summability of Carleson embeddings
//! `F^p_{alpha,w} -> L^p_alpha(mu)` on weighted Fock spaces.
//!
//! The decision quantity is the averaging function
//! `mu_hat_w(z) = mu(D(z,1)) / w(D(z,1))`; whether it lies in the right
//! `L^s(dA)` decides summability, and its lattice discretization
//! `mu(Q_1(nu)) / w(Q_1(nu))` quantifies the summing norm.
//!
//! Module map:
//! - [`lattice`]: unit cells, windows and grid choices.
//! - [`weights`]: weights, restricted `A_p` constants, dual and averaged weights.
//! - [`measures`]: atoms + densities, pull-back and Volterra measures.
//! - [`fock`]: kernels, test functions, the Gaussian pairing, Berezin transform.
//! - [`summing`]: regimes, lattice sequences and the embedding verdict.
//! - [`operators`]: composition, Volterra and differentiation classifiers.
//! - [`oracle`]: cross-verification reports against pinned calibration bands.
//! - [`cli`]: the batch command line.

// Negated float comparisons reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod error;
pub mod fock;
pub mod grammar;
pub mod lattice;
pub mod measures;
pub mod operators;
pub mod oracle;
pub mod quadrature;
pub mod summing;
pub mod weights;

pub use error::{FockError, Result};
pub use lattice::{cell_of, covering_cells, Cell, GridSpec, LatticePoint, Window};
pub use measures::{AffineSymbol, Atom, Envelope, Measure, PolynomialSymbol};
pub use num_complex::Complex64;
pub use summing::{classify_embedding, target_exponent, Classification, Regime, SummingVerdict};
pub use weights::Weight;
