//! Numerical toolkit for the complex q-exponential, the q-deformed Dirac
//! delta in `d` dimensions, the d-dimensional q-Fourier transform with its
//! inversion, and truncated q-series approximations of densities.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod qcore;
pub mod quadrature;
pub mod series;
pub mod transform;
