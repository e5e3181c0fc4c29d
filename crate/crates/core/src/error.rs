use thiserror::Error;

/// Errors shared across the crate. Variant names follow the failure they
/// guard, grouped roughly by the subsystem that raises them.
#[derive(Debug, Error)]
pub enum Error {
    // grids
    #[error("points per axis must be even, got {0}")]
    OddN(usize),
    #[error("dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
    #[error("half-width must be positive, got {0}")]
    NonpositiveL(f64),
    #[error("frequency symbol evaluates to a non-finite value at |xi| = {0}")]
    NonfiniteSymbol(f64),
    #[error("Hermite basis of order {order} lost orthonormality (Gram deviation {deviation:.3e})")]
    OverflowOrder { order: usize, deviation: f64 },

    // potentials
    #[error("potential amplitude must be nonnegative, got {0}")]
    NegativeAmplitude(f64),
    #[error("coupling must be nonnegative, got {0}")]
    NegativeCoupling(f64),
    #[error("dilation factor must be positive, got {0}")]
    NonpositiveR(f64),
    #[error("sample file has {got} values but the grid has {want}")]
    ShapeMismatch { got: usize, want: usize },
    #[error("sample file contains a negative value {value} at line {line}")]
    NegativeValue { value: f64, line: usize },
    #[error("failed to parse sample file at line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    // direct solver
    #[error("exponent s must be >= 1/2, got {0}")]
    UnsupportedExponent(f64),

    // Birman-Schwinger
    #[error("kernel assembly diverges at E = 0 for this window")]
    DivergentAtZero,
    #[error("high window at s = d/2 is Nyquist-truncated; pass the acknowledgment flag")]
    UnresolvedWindow,
    #[error("quadrature refinement levels differ by {0:.3e} relative")]
    QuadratureUnresolved(f64),

    // spectra
    #[error("matrix is not symmetric (defect {0:.3e} relative)")]
    NotSymmetric(f64),
    #[error("spectrum contains a negative entry {0}")]
    NegativeEntry(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("matrices have different shapes: {0}x{1} vs {2}x{3}")]
    MatrixShapeMismatch(usize, usize, usize, usize),

    // norms
    #[error("mixed lattice norms need an integer half-width, got {0}")]
    NonIntegerL(f64),
    #[error("Hermite truncation unresolved: relative residual {0:.3e}")]
    TruncationUnresolved(f64),

    // bounds
    #[error("theorem {theorem} does not apply to d = {d}, s = {s}")]
    TheoremNotApplicable { theorem: String, d: usize, s: f64 },
    #[error("right-hand side is infinite for this potential (decay beta = {0})")]
    RhsInfinite(f64),
    #[error("check requires d = {want_d}, s = {want_s}")]
    WrongRegime { want_d: usize, want_s: f64 },
    #[error("grid does not resolve the dilation R = {0}")]
    UnresolvedDilation(f64),
    #[error("lower-bound check requires a compactly supported potential")]
    NotCompactlySupported,
    #[error("report suite is empty")]
    EmptySuite,

    // cwikel
    #[error("lattice decomposition requires nonzero input")]
    ZeroInput,
    #[error("dense assembly over {0} nodes exceeds the configured cap {1}")]
    TooLarge(usize, usize),
    #[error("exponent p' = {0} is outside the supported open range")]
    ExponentOutOfRange(f64),
    #[error("no factorization supplied for the p-grid")]
    EmptyFactorizationFamily,

    // cli / io
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
