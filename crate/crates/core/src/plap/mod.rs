//! Discrete partition Laplacian: spectral-element assembly, eigenpairs,
//! nodal extraction and the mixed sector problem.

pub mod assemble;
pub mod eig;
pub mod mesh;
pub mod nodal;
pub mod sector;

pub use assemble::{BoundaryMode, DiscreteOperator, Slot};
pub use eig::{assemble_plap, assemble_plap_gauged, discrete_position, position_in, solve_eigs, EigenResult};
pub use mesh::{Block, BlockGeometry, BlockLink, EdgeCondition, Mesh};
pub use nodal::{extract_nodal_partition, NodalPartitionResult};
pub use sector::{sector_mixed_solve, SectorSolution};
