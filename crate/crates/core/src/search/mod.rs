//! Parameter searches for candidate minimal partitions.

pub mod disk;
pub mod rect;

use std::collections::BTreeMap;

use serde::Serialize;

pub use disk::{disk_cut_search, global_reference_note, DiskSearchOptions};
pub use rect::{rect_cut_search, RectSearchOptions};

/// One point of a residual scan.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LandscapePoint {
    pub parameters: Vec<f64>,
    /// Signed for one-parameter scans, a norm otherwise.
    pub residual: f64,
    pub energy: f64,
}

/// The accepted configuration recomputed on a finer grid.
#[derive(Clone, Debug, Serialize)]
pub struct RefinementData {
    pub n: usize,
    pub parameters: Vec<f64>,
    pub energy: f64,
    pub residual: f64,
}

/// Outcome of a cut search.
#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub geometry: String,
    pub parameters: BTreeMap<String, f64>,
    /// Matching residual at the accepted configuration.
    pub residual: f64,
    pub tolerance: f64,
    pub energy: f64,
    /// Energy of the comparison partition on the same grid.
    pub reference_energy: f64,
    pub reference_label: String,
    /// Spectral position ℓ of the energy in the partition Laplacian.
    pub position: usize,
    pub multiplicity: usize,
    pub domains: usize,
    /// `ℓ − domains`.
    pub deficiency: i64,
    /// `(max − min) / mean` of the per-domain Rayleigh quotients.
    pub equipartition_defect: f64,
    pub domain_lambdas: Vec<f64>,
    pub grid: usize,
    pub dof: usize,
    pub evaluations: usize,
    pub refined: Option<RefinementData>,
    pub notes: Vec<String>,
    pub landscape: Vec<LandscapePoint>,
    pub cuts: Vec<[[f64; 2]; 2]>,
    pub nodal_lines: Vec<Vec<[f64; 2]>>,
}
