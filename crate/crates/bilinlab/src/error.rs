use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("component count mismatch: {0} vs {1}")]
    CountMismatch(usize, usize),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("Hölder condition 1/p+1/q=1/r violated: p={p}, q={q}, r={r} (defect {defect:.3e})")]
    HolderViolation { p: f64, q: f64, r: f64, defect: f64 },

    #[error("shift is not an integer multiple of the grid spacing: {0}")]
    OffGridShift(String),

    #[error("witness supports overlap or wrap: {0}")]
    SupportOverlap(String),

    #[error("phase is affine on the window: cannot pick distinct gradients")]
    AffinePhase,

    #[error("cannot separate {requested} gradients on the window (max feasible {feasible})")]
    DistinctGradients { requested: usize, feasible: usize },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("mollifier radius {delta} is below one frequency cell {cell}")]
    MollifierTooNarrow { delta: f64, cell: f64 },

    #[error("point out of the sampled domain: {0}")]
    OutOfDomain(String),

    #[error("sign-pattern retry cap {cap} exceeded (target norm bound {bound:.6})")]
    RetryCap { cap: usize, bound: f64 },

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("grid size {n} exceeds the cap {cap} for dense symbol operators (use with_size_override)")]
    TooLarge { n: usize, cap: usize },

    #[error("triple must lie inside the local L² range for this check")]
    NotLocalL2,

    #[error("triple must lie outside the local L² range for this construction")]
    NotOutsideLocalL2,

    #[error("quadrature grid too small: M={m} must be at least 4K={min}")]
    QuadratureTooSmall { m: usize, min: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
