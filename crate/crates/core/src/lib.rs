//! Spectral analysis of unbounded symmetric tridiagonal (Jacobi) operators.
//!
//! The operator acts on an orthonormal basis as
//! `T e_n = a_n e_{n+1} + b_n e_n + a_{n-1} e_{n-1}` with `a_n > 0` and real
//! `b_n`. This crate provides:
//!
//! * [`coeffseq`]: declarative coefficient sequences with exact rational
//!   exponents, sparse overrides and multiplicative recursions.
//! * [`multiindex`]: the walk sets `I_m`, `Î_m`, `I_m⁺`, `Î_m⁺` that index the
//!   recursive ratio sums.
//! * [`conditions`]: the ratio sums `G⁺_{m,n}`, `G_{m,n}`, `G̃_{m,n}` and the
//!   battery of sufficient self-adjointness criteria, evaluated exactly on
//!   exponents when the coefficients are power laws and as numeric
//!   diagnostics otherwise.
//! * [`spectra`]: finite truncations, Sturm bisection, eigenvectors, the
//!   last-coordinate identities and the limit-point estimator.
//! * [`orthopoly`]: the orthonormal polynomial recurrence and the
//!   Christoffel–Darboux diagnostics at `z = i`.
//! * [`cfrac`]: Jacobi continued fraction approximants and truncated
//!   resolvents.
//! * [`cli`]: the `jacobi` command line front end, presets and reports.
//!
//! Each capability has a runnable program under `examples/`.

// NaN-rejecting checks are written as `!(x > 0.0)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cfrac;
pub mod cli;
pub mod coeffseq;
pub mod conditions;
mod dd;
mod error;
pub mod multiindex;
pub mod orthopoly;
pub mod presets;
pub mod report;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};

/// Exact rational exponent of a power law.
pub type Exponent = num_rational::Rational64;
