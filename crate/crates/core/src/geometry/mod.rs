//! Parametrised submanifold patches in flat ℝ⁷ / T⁷.
//!
//! Frames are adapted so that `e₃ = e₁×e₂` on associative 3-patches; the
//! second fundamental form uses the convention `A(s)(u) = −∇ᵀ_u s`, so the
//! sphere of radius ρ has principal curvatures `1/ρ` with respect to the
//! inward normal.

pub mod curvature;
pub mod frame;
pub mod patch;

pub use curvature::{
    rigidity_check, second_fundamental, simons_operators, simons_operators_in_frame, AmbientCurvature,
    ConstantCurvature, CurvatureOperators, FlatAmbient, RigidityReport, SecondFundamental, Verdict,
};
pub use frame::{adapted_frame, adapted_frames, AdaptedFrame};
pub use patch::{Chart, ChartSpec, EllipsoidChart, FlatChart, FnChart, ImmersedPatch, SphereChart};

use crate::g2::G2Structure;

pub type V7 = nalgebra::SVector<f64, 7>;

pub fn to_v7(a: &[f64; 7]) -> V7 {
    V7::from(*a)
}

pub fn to_arr(v: &V7) -> [f64; 7] {
    std::array::from_fn(|i| v[i])
}

pub fn cross(st: &G2Structure<f64>, a: &V7, b: &V7) -> V7 {
    to_v7(&st.cross(&to_arr(a), &to_arr(b)))
}

pub fn chi(st: &G2Structure<f64>, a: &V7, b: &V7, c: &V7) -> V7 {
    to_v7(&st.chi(&to_arr(a), &to_arr(b), &to_arr(c)))
}

/// Coordinate unit vector `e_{i+1}`.
pub fn axis(i: usize) -> V7 {
    let mut v = V7::zeros();
    v[i] = 1.0;
    v
}
