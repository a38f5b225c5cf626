//! Spectra of partition Laplacians on rectangles and disks.
//!
//! The crate covers the combinatorics of partitions with corners, closed-form
//! rectangle and disk data, a spectral-element discretization of the partition
//! Laplacian with sign-flip interface conditions, the two-sided
//! Dirichlet-to-Neumann form and Hessian of the partition energy, and the
//! parameter searches that locate candidate minimal partitions.
//!
//! ```
//! use spectral_partitions::rect::{rect_spectral_position, AspectRatio};
//! let pos = rect_spectral_position(2, 2, AspectRatio::rational(3, 2)).unwrap();
//! assert_eq!(pos.position, 5);
//! ```

pub mod cli;
pub mod disk;
pub mod error;
pub mod io;
pub mod numerics;
pub mod partition;
pub mod plap;
pub mod rect;
pub mod search;
pub mod tolerances;
pub mod variation;

pub use error::{Error, Result};
