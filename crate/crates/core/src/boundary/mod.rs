//! Boundary geometry on triangulated surfaces `∂Y`: the 0-order operator
//! `D_L`, `n×`-complex line bundles, Chern numbers and the index formula.
//!
//! Surfaces lie in a flat associative 3-space, so `∇⊥` is the componentwise
//! derivative followed by projection off that 3-space.

pub mod bundle;
pub mod io;
pub mod marching;
pub mod mesh;
pub mod operator;
pub mod topology;

pub use bundle::{normal_basis, BundleSpec, ComplexLineBundle, LineField};
pub use io::{mesh_from_triangles, parse_obj, parse_off, read_mesh, to_off};
pub use mesh::{EllipsoidSurface, FlatSurface, ImplicitSurface, SurfaceGeometry, SurfaceMesh};
pub use operator::{
    assemble_dl, check_trace_symmetry, epsilon_probe, mean_curvature_field, principal_curvature_field, spectrum,
    NormalDerivative, ProbeSample, TraceSymmetry,
};
pub use topology::{chern_number, chern_value, index_of, tensor_relation_check, IndexData, TensorRelation};
