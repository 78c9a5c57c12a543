use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoskError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoskError {
    #[error("dimension {n} unsupported (expected {min} <= n <= {max})")]
    UnsupportedDimension { n: usize, min: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index ({i},{j},{k},{l}) out of range for n = {n}")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        n: usize,
    },

    #[error("slot ({i},{j},{k},{l}) is not canonical (need i<j, k<l, (i,j) <= (k,l))")]
    NonCanonicalSlot { i: usize, j: usize, k: usize, l: usize },

    #[error("slot ({i},{j},{k},{l}) listed more than once")]
    DuplicateSlot { i: usize, j: usize, k: usize, l: usize },

    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("vectors span a degenerate plane")]
    DegeneratePlane,

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("alpha = {alpha} outside [1, {max}]")]
    AlphaOutOfRange { alpha: f64, max: usize },

    #[error("frame is not orthonormal (defect {defect:.3e})")]
    NonOrthonormalFrame { defect: f64 },

    #[error("not a complex structure: {reason} (defect {defect:.3e})")]
    InvalidComplexStructure { reason: &'static str, defect: f64 },

    #[error("tensor is not J-invariant (defect {defect:.3e}, allowed {allowed:.3e})")]
    NotKahler { defect: f64, allowed: f64 },

    #[error("expected a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("pair violates <X,Y> = <X,JY> = 0 (defect {defect:.3e})")]
    NotOrthogonalPair { defect: f64 },

    #[error("Bianchi defect {defect:.3e} exceeds tolerance {allowed:.3e}")]
    BianchiViolation { defect: f64, allowed: f64 },

    #[error("alternating projection stalled after {iterations} iterations (last step {last_step:.3e})")]
    ProjectionNotConverged { iterations: usize, last_step: f64 },

    #[error("no Kaehler shift direction with positive six-sum exists at complex dimension {m}")]
    ShiftUnavailable { m: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed CTJ document: {0}")]
    Format(String),
}
