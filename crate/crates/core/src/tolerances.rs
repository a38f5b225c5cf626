//! Default tolerances. Every numerical routine takes its tolerance as an
//! explicit argument; these constants are the documented defaults.

/// Accepted eigenpair residual, scaled by `1 + |λ|`.
pub const EIGEN_RESIDUAL: f64 = 1e-8;
/// Two eigenvalues closer than this (scaled by `1 + λ`) count as one level.
pub const MULTIPLICITY: f64 = 1e-6;
/// Minimum shared length for two subdomains to be adjacent.
pub const ADJACENCY_LENGTH: f64 = 1e-12;
/// Geometric coincidence of points, relative to the domain diameter.
pub const POINT_MATCH: f64 = 1e-9;
/// Root brackets are shrunk below this width unless stated otherwise.
pub const ROOT_WIDTH: f64 = 1e-13;
/// Relative zero threshold when counting the index of a form matrix.
pub const FORM_ZERO: f64 = 1e-6;
/// Criticality residual above which a partition is reported as not critical.
pub const NOT_CRITICAL: f64 = 0.1;
/// Finite-difference steps used by the shape-derivative oracle.
pub const FD_STEPS: [f64; 2] = [1e-3, 5e-4];
/// Fraction of vanishing samples that marks an eigenvector as degenerate.
pub const DEGENERATE_FRACTION: f64 = 0.5;
