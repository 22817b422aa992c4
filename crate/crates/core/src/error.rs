use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid orbit spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("tangent frame has rank {rank}, expected {expected}")]
    RankDeficiency { rank: usize, expected: usize },
    #[error("vector is not tangent to the orbit (residual {residual:e})")]
    NotTangent { residual: f64 },
    #[error("tensor kind mismatch: expected {expected}, got {got}")]
    KindMismatch { expected: &'static str, got: &'static str },
    #[error("hierarchy bivector is not antisymmetric (residual {residual:e})")]
    AsymmetryResidual { residual: f64 },
    #[error("N + t is singular (|det| = {det:e})")]
    SingularNt { det: f64 },
    #[error("eigenvalue cluster near {value} has odd multiplicity {multiplicity}")]
    OddMultiplicity { value: f64, multiplicity: usize },
    #[error("spectrum has imaginary part {imag:e}")]
    ComplexSpectrum { imag: f64 },
    #[error("two-form is degenerate (condition number {condition:e})")]
    DegenerateForm { condition: f64 },
    #[error("frame solve failed (residual {residual:e})")]
    FrameSolveFailure { residual: f64 },
    #[error("expected {expected} non-constant GT values, found {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("calibration failed: {0}")]
    CalibrationFailure(String),
    #[error("target lies outside the polytope")]
    TargetOutsidePolytope,
    #[error("elements are not composable (gap {gap:e})")]
    NotComposable { gap: f64 },
    #[error("log of lambda + t is singular ({value:e})")]
    SingularLog { value: f64 },
}
