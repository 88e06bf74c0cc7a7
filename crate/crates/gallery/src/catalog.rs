//! The example catalog and per-example parameters.

use crate::GalleryError;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleName {
    Torus3Closed,
    StripCoassoc,
    BallConstantE,
    SphereRho,
    Ellipsoid,
    CyTorusS1,
    CyTorusPerturbed,
    JoyceInvolutions,
}

impl ExampleName {
    pub const ALL: [ExampleName; 8] = [
        ExampleName::Torus3Closed,
        ExampleName::StripCoassoc,
        ExampleName::BallConstantE,
        ExampleName::SphereRho,
        ExampleName::Ellipsoid,
        ExampleName::CyTorusS1,
        ExampleName::CyTorusPerturbed,
        ExampleName::JoyceInvolutions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::Torus3Closed => "torus3-closed",
            ExampleName::StripCoassoc => "strip-coassoc",
            ExampleName::BallConstantE => "ball-constant-e",
            ExampleName::SphereRho => "sphere-rho",
            ExampleName::Ellipsoid => "ellipsoid",
            ExampleName::CyTorusS1 => "cy-torus-s1",
            ExampleName::CyTorusPerturbed => "cy-torus-perturbed",
            ExampleName::JoyceInvolutions => "joyce-involutions",
        }
    }

    pub fn parse(s: &str) -> Result<Self, GalleryError> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| GalleryError::Config(format!("unknown example '{s}'; known: {}", Self::ALL.map(|n| n.as_str()).join(", "))))
    }

    /// What the example is and what it checks.
    pub fn description(self) -> &'static str {
        match self {
            ExampleName::Torus3Closed => {
                "flat T³ × {t} in T⁷: the twisted Dirac operator has the constants as kernel (dim 4, index 0)"
            }
            ExampleName::StripCoassoc => {
                "[0,½] × T² with boundary on coassociative T⁴ slices: kernel and cokernel 2, index 0, ODE oracle, \
                 Weitzenböck, self-adjointness and Bochner checks"
            }
            ExampleName::BallConstantE => {
                "unit ball with constant e: ν_X = span(e, n×e) has c₁ = 0 and the boundary problem has index 1"
            }
            ExampleName::SphereRho => "round sphere of radius ρ: D_{μ_X} has spectrum {1/ρ, 1/ρ}",
            ExampleName::Ellipsoid => {
                "ellipsoid: D_{μ_X} is symmetric with trace 2H and spectrum equal to the principal curvatures"
            }
            ExampleName::CyTorusS1 => {
                "T³ × S¹ in a Calabi–Yau product: D^∨ = (−*dα − dτ, *d*α), (D^∨)² = −Δ, kernel 4 = b¹(T³) + 1"
            }
            ExampleName::CyTorusPerturbed => {
                "perturbed D^∨ with a zero-order term aλ on τ: the kernel drops to 3 and loses the constant τ"
            }
            ExampleName::JoyceInvolutions => {
                "involutions of T⁷: σ₀, α, β, γ preserve φ₀ and τ₀ reverses it, in exact arithmetic"
            }
        }
    }
}

impl std::fmt::Display for ExampleName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-example parameters; `None` selects the example default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleParams {
    /// Grid nodes per period (T³ and the periodic strip directions).
    pub resolution: Option<usize>,
    pub rho: Option<f64>,
    pub lambda: Option<f64>,
    pub a: Option<f64>,
    /// Constant normal vector `e`; normalised before use.
    pub e: Option<[f64; 7]>,
    pub axes: Option<[f64; 3]>,
    /// Icosphere subdivision level for single-mesh checks.
    pub level: Option<usize>,
    /// Relative kernel threshold.
    pub tol: Option<f64>,
    /// Refinement levels: strip `n₁` values or mesh subdivision levels.
    pub refine: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub name: ExampleName,
    #[serde(default)]
    pub params: ExampleParams,
}

fn bad(msg: String) -> GalleryError {
    GalleryError::Config(msg)
}

impl ExampleSpec {
    pub fn new(name: ExampleName) -> Self {
        Self { name, params: ExampleParams::default() }
    }

    pub fn resolution(&self) -> usize {
        self.params.resolution.unwrap_or(16)
    }

    pub fn rho(&self) -> f64 {
        self.params.rho.unwrap_or(0.5)
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda.unwrap_or(0.05)
    }

    pub fn a(&self) -> f64 {
        self.params.a.unwrap_or(1.0)
    }

    pub fn axes(&self) -> [f64; 3] {
        self.params.axes.unwrap_or([1.0, 0.8, 0.6])
    }

    pub fn level(&self) -> usize {
        self.params.level.unwrap_or(3)
    }

    pub fn tol(&self) -> f64 {
        self.params.tol.unwrap_or(assoc_core::dirac::KERNEL_TOLERANCE)
    }

    /// Unit normal vector, `e₄` by default.
    pub fn e(&self) -> [f64; 7] {
        let e = self.params.e.unwrap_or([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let n = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        e.map(|x| x / n)
    }

    pub fn refine(&self) -> Vec<usize> {
        self.params.refine.clone().unwrap_or_else(|| match self.name {
            ExampleName::StripCoassoc => vec![16, 32],
            ExampleName::SphereRho | ExampleName::Ellipsoid | ExampleName::BallConstantE => vec![2, 3, 4],
            _ => vec![self.resolution()],
        })
    }

    /// Range checks; violations are configuration errors.
    pub fn validate(&self) -> Result<(), GalleryError> {
        let p = &self.params;
        let grid = |n: usize, what: &str| {
            if n < 4 || n > 64 || n % 2 != 0 {
                Err(bad(format!("{what} {n} must be even and in [4, 64]")))
            } else {
                Ok(())
            }
        };
        if let Some(n) = p.resolution {
            grid(n, "resolution")?;
        }
        if let Some(r) = p.rho {
            if !(r > 0.0 && r <= 100.0) {
                return Err(bad(format!("rho {r} must be in (0, 100]")));
            }
        }
        if let Some(l) = p.lambda {
            if l == 0.0 || !l.is_finite() || l.abs() > 10.0 {
                return Err(bad(format!("lambda {l} must be nonzero with |lambda| ≤ 10")));
            }
        }
        if let Some(a) = p.a {
            if !(a > 0.0 && a <= 10.0) {
                return Err(bad(format!("a {a} must be in (0, 10]")));
            }
        }
        if let Some(e) = p.e {
            if e[..3].iter().any(|x| *x != 0.0) {
                return Err(bad("e must be normal to the boundary: its first three entries must vanish".into()));
            }
            if e.iter().all(|x| *x == 0.0) || e.iter().any(|x| !x.is_finite()) {
                return Err(bad("e must be a nonzero finite vector".into()));
            }
        }
        if let Some(ax) = p.axes {
            if ax.iter().any(|x| !(*x >= 0.1 && *x <= 10.0)) {
                return Err(bad(format!("ellipsoid axes {ax:?} must lie in [0.1, 10]")));
            }
        }
        if let Some(l) = p.level {
            if l > 5 {
                return Err(bad(format!("subdivision level {l} must be at most 5")));
            }
        }
        if let Some(t) = p.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(bad(format!("tol {t} must be in (0, 1)")));
            }
        }
        if let Some(r) = &p.refine {
            if r.len() < 2 && matches!(self.name, ExampleName::StripCoassoc | ExampleName::SphereRho | ExampleName::Ellipsoid | ExampleName::BallConstantE) {
                return Err(bad("refine needs at least two levels".into()));
            }
            match self.name {
                ExampleName::StripCoassoc | ExampleName::Torus3Closed => {
                    for n in r {
                        grid(*n, "refinement resolution")?;
                    }
                }
                _ => {
                    if let Some(l) = r.iter().find(|l| **l > 5) {
                        return Err(bad(format!("subdivision level {l} must be at most 5")));
                    }
                }
            }
            if r.windows(2).any(|w| w[1] <= w[0]) {
                return Err(bad("refinement levels must increase".into()));
            }
        }
        Ok(())
    }
}
