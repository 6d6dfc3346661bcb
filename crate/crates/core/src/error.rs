use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cofactor {0} survives trial division up to the configured bound")]
    FactorBoundExceeded(String),
    #[error("vector is isotropic: phi[h] = 0")]
    IsotropicVector,
    #[error("h pairs to zero with every lattice vector")]
    ZeroPairing,
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),
    #[error("ideal {0} is not the square of an ideal")]
    NotASquare(String),
    #[error("lattice is not integral with respect to the form")]
    NotIntegral,
    #[error("element is not in the trace-zero part of the even algebra")]
    NotInOddPart,
    #[error("element has zero norm and is not invertible")]
    NotInvertible,
    #[error("order closure did not stabilise within {0} rounds")]
    ClosureDiverged(usize),
    #[error("degenerate form")]
    Degenerate,
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice does not have full rank")]
    NotFullRank,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("parse error: {0}")]
    Parse(String),
}
