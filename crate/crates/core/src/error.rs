use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mass must be positive (got {0})")]
    NonPositiveMass(f64),
    #[error("angular number l must be nonzero: the Coulomb-type term vanishes for l = 0 and the frequency quantization is undefined")]
    ZeroAngularMomentum,
    #[error("coupling M*lambda vanishes; the Coulomb-type term is absent")]
    VanishingCoupling,
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("theta must be an odd positive integer (got {0})")]
    InvalidTheta(u32),
    #[error("polynomial degree must satisfy 1 <= n <= {max} (got {n})")]
    InvalidDegree { n: usize, max: usize },
    #[error("series coefficient c_{index} exceeded the overflow guard")]
    OverflowGuard { index: usize },
    #[error("frequency must be positive (got {0})")]
    NonPositiveFrequency(f64),
    #[error("cubic has no positive root")]
    NoPositiveRoot,
    #[error("no frequency root found in the scanned interval [{lo:e}, {hi:e}]")]
    NoRootInRange { lo: f64, hi: f64 },
    #[error("operation requires polynomial degree {expected}, solution has degree {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("quadrature did not converge after {levels} refinements")]
    QuadratureFailure { levels: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),
}
