use thiserror::Error;

/// Errors raised by the operators in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("3-form is degenerate: derived bilinear form has smallest eigenvalue {min_eigenvalue:e}")]
    DegenerateForm { min_eigenvalue: f64 },
    #[error("plane is not associative (residual {residual:e})")]
    NotAssociative { residual: f64 },
    #[error("basis is not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("chart derivative drops rank at parameter {point:?}")]
    RankDeficient { point: Vec<f64> },
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("subspace is not an n×-complex line (defect {defect:e})")]
    NotComplexLine { defect: f64 },
    #[error("singular value solver failed to converge on block {block}")]
    SolverFailure { block: usize },
    #[error("deformed tangent frame degenerates (smallest Gram eigenvalue {min_eigenvalue:e})")]
    ImmersionLost { min_eigenvalue: f64 },
    #[error("Chern number {value} is not within 0.1 of an integer")]
    NonIntegral { value: f64 },
    #[error("bundle jumps across edge ({a}, {b}): fibre overlap {overlap}")]
    Discontinuous { a: usize, b: usize, overlap: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
