use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("point {point:?} lies outside chart `{chart}` (required margin {margin:e})")]
    OutOfChart {
        chart: String,
        point: Vec<f64>,
        margin: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires dimension {required}, chart has dimension {found}")]
    DimensionError { required: String, found: usize },

    #[error("degenerate eigenspace: {0}")]
    DegenerateEigenspace(String),

    #[error("frame is degenerate at {point:?} (Gram determinant {det:e})")]
    FrameDegenerate { point: Vec<f64>, det: f64 },

    #[error("3x3 map is not an algebra isomorphism (orthogonality defect {orth_defect:e}, det {det})")]
    NotAlgebraIso { orth_defect: f64, det: f64 },

    #[error("hyperelliptic type must be in 1..=7, got {0}")]
    BadType(u32),

    #[error("conformal factor is not positive on the chart (min sampled value {0})")]
    NonPositiveFactor(f64),

    #[error("residual {value:e} for `{quantity}` lies in the inconclusive band [{vanish:e}, {nonzero:e}]")]
    InconclusiveThresholds {
        quantity: String,
        value: f64,
        vanish: f64,
        nonzero: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),
}
