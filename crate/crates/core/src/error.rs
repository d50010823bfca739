use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // numerics
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (‖A − A†‖_F = {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("columns are not orthonormal (‖V†V − I‖_F = {defect:.3e})")]
    NotIsometry { defect: f64 },
    #[error("matrix is not unitary (‖U†U − I‖_F = {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("{0} did not converge")]
    ConvergenceFailure(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("not a density matrix: {0}")]
    NotState(String),

    // channels and states
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("state vector is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("Bloch radius {0} outside [0, 1]")]
    RadiusOutOfRange(f64),
    #[error("reference radius R₀ + ΔR = {0} outside [0, 1]")]
    ReferenceOutOfBall(f64),
    #[error("reference state cannot define a recovery map: {0}")]
    DegenerateReference(String),

    // dilation
    #[error("Kraus rank {0} is not supported (at most 4)")]
    RankUnsupported(usize),
    #[error("expected Kraus rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    // synthesis
    #[error("qubit index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("CNOT budget exceeded: {used} > {budget}")]
    BudgetExceeded { used: usize, budget: usize },
    #[error("unsupported gate for this operation: {0}")]
    UnsupportedGate(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    // ion-trap noise
    #[error("detuning must be nonzero")]
    ZeroDetuning,
    #[error("gate error Δ = {0} is negative")]
    NegativeDelta(f64),
    #[error("Fock cutoff {cutoff} too small (tail mass {tail:.3e})")]
    CutoffTooSmall { cutoff: usize, tail: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}
