//! Shape derivatives of Dirichlet eigenvalues and the Hessian of the
//! partition energy via the two-sided Dirichlet-to-Neumann form.

pub mod boundary;
pub mod criticality;
pub mod dtn;
pub mod field;
pub mod groundstate;
pub mod hadamard;
pub mod oracle;
pub mod second;
pub mod tangent;

pub use boundary::BoundaryField;
pub use criticality::{criticality, CriticalityData};
pub use dtn::{arc_polynomial_basis, dtn_form_matrix, dtn_form_matrix_with, hessian_form, moments, DtnContext, DtnFormReport};
pub use field::{AnalyticField, DeformationField, FieldTerm};
pub use groundstate::{groundstate_data, GroundState, GroundStateData};
pub use hadamard::{hadamard_first, hadamard_on_pieces, normal_trace, subdomain_boundary, BoundaryPiece};
pub use oracle::{hadamard_check, DerivativeCheck, Family, HadamardCheckReport};
pub use second::{fd_oracle, second_variation_c3, Acceleration, FdEstimate, SecondVariation};
pub use tangent::{project_equipartition_tangent, TangentProjection};
