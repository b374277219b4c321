use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is not prime")]
    NotPrime { name: &'static str, value: u64 },

    #[error("{name} = {value} is too small (need {name} >= {min})")]
    TooSmall {
        name: &'static str,
        value: u64,
        min: u64,
    },

    #[error("N = {n} is not congruent to 1 modulo p = {p}")]
    NotCongruent { n: u64, p: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mismatched ring parameters: {0}")]
    MismatchedRing(String),

    #[error("element is not in the augmentation ideal (augmentation {augmentation})")]
    NotInAugmentationIdeal { augmentation: u64 },

    #[error("p^K does not fit in 64 bits (p = {p}, K = {k})")]
    PrecisionTooLarge { p: u64, k: u32 },

    #[error("precision exhausted at K = {k}: {what}")]
    PrecisionExhausted { k: u32, what: String },

    #[error("dimension cap exceeded at level {level}: dimension {dim} > cap {cap}")]
    DimensionCap { level: u64, dim: usize, cap: usize },

    #[error(
        "Eisenstein eigenspace did not stabilize with primes {primes:?} (dimensions {dims:?})"
    )]
    NotStabilized { primes: Vec<u64>, dims: Vec<usize> },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("cache file {path}: {reason}")]
    CacheFormat { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse failure classes, each with its own process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    InvalidInput,
    PrecisionExhausted,
    DimensionCap,
    InvariantViolation,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::InvalidInput => 2,
            ErrorKind::PrecisionExhausted => 3,
            ErrorKind::DimensionCap => 4,
            ErrorKind::InvariantViolation => 5,
            ErrorKind::Io => 1,
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NotPrime { .. }
            | Error::TooSmall { .. }
            | Error::NotCongruent { .. }
            | Error::InvalidArgument(_)
            | Error::MismatchedRing(_)
            | Error::NotInAugmentationIdeal { .. } => ErrorKind::InvalidInput,
            Error::PrecisionTooLarge { .. } | Error::PrecisionExhausted { .. } => {
                ErrorKind::PrecisionExhausted
            }
            Error::DimensionCap { .. } => ErrorKind::DimensionCap,
            // an unstable eigenspace means the theory-backed budget failed
            Error::NotStabilized { .. } | Error::InvariantViolation(_) => {
                ErrorKind::InvariantViolation
            }
            Error::CacheFormat { .. } | Error::Io(_) => ErrorKind::Io,
        }
    }
}

/// Validates the standing hypotheses `N, p >= 5` prime with `N ≡ 1 (mod p)`.
pub fn check_level_and_prime(n: u64, p: u64) -> Result<()> {
    if p < 5 {
        return Err(Error::TooSmall {
            name: "p",
            value: p,
            min: 5,
        });
    }
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime {
            name: "p",
            value: p,
        });
    }
    if n < 5 {
        return Err(Error::TooSmall {
            name: "N",
            value: n,
            min: 5,
        });
    }
    if !crate::arith::is_prime(n) {
        return Err(Error::NotPrime {
            name: "N",
            value: n,
        });
    }
    if n % p != 1 {
        return Err(Error::NotCongruent { n, p });
    }
    Ok(())
}
