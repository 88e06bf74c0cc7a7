//! Discrete deformation operators of flat associatives.
//!
//! Closed T³ uses Fourier blocks per frequency. The strip `[0, ½] × T²` is
//! spectral in `x₂, x₃` and uses second-order differences in `x₁`; boundary
//! conditions eliminate the components orthogonal to a line at both ends.
//! Kernels are counted from block singular values relative to the largest.

pub mod dvee;
pub mod grid;
pub mod identities;
pub mod nonlinear;
pub mod operator;
pub mod spectral;

pub use dvee::{assemble_dvee, dvee_square_residual, dvee_symbol, perturbed_dvee, special_lagrangian_frame};
pub use grid::{DomainKind, GridDomain, GridSection};
pub use identities::{bochner_terms, boundary_pairing, random_section, rough_laplacian, selfadjoint_residual, weitzenbock_residual, BochnerTerms};
pub use nonlinear::nonlinear_residual;
pub use operator::{assemble_dirac, constrain, BoundaryCondition, DiscreteDiracOperator, FiberFrame, LineTag, Scheme};
pub use spectral::{kernel_dims, kernel_sections, SpectralReport, KERNEL_TOLERANCE, MIN_GAP};
