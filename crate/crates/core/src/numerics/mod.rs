//! Special functions, root finding, quadrature, spectral grids and dense
//! generalized eigensolves.

pub mod bessel;
pub mod cheb;
pub mod gll;
pub mod linalg;
pub mod quad;
pub mod roots;

pub use bessel::{bessel_j, bessel_j_prime, bessel_zero};
pub use cheb::ChebGrid;
pub use linalg::{sym_generalized_eigs, EigenPair};
pub use quad::{adaptive_quad, EndpointHint};
pub use roots::bracketed_root;
