//! Exact-arithmetic library for the complex-multiplication arithmetic of
//! rank-2 Drinfeld F_q[t]-modules.
//!
//! The pipeline: imaginary quadratic orders of F_q(t) are described by
//! discriminants δ = 4·f0²·δ0; the reduced forms T_δ enumerate the Galois
//! orbit of the singular modulus; each form gives a CM point z(a,b,c) in a
//! truncated Laurent-series model of C_∞; the lattice A·z + A produces the
//! Drinfeld coefficients (g, Δ) and the j-invariant analytically; conjugates
//! assemble into exact class polynomials over F_q[t], Weil/graded heights,
//! algebraic-unit flags, and height-bound comparisons.
//!
//! All absolute values are exact rational powers of q; heights are exact
//! rationals in base-q logarithmic units.

pub mod algebra;
pub mod error;
pub mod series;

pub mod analytic;
pub mod forms;
pub mod heights;
pub mod quadorder;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
