use thiserror::Error;

/// Errors raised by the library.
///
/// The variants are grouped so that a front end can map them onto
/// "bad input", "budget exceeded" and "internal invariant broken".
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space size must satisfy 1 <= n <= {max}, got {n}")]
    InvalidSpace { n: usize, max: usize },

    #[error("interval [{a},{b}] is not an interval of the {n}-point space")]
    IntervalOutOfRange { a: usize, b: usize, n: usize },

    #[error("tuple has {got} entries but the {n}-point space has {expected} intervals")]
    TupleLength { n: usize, expected: usize, got: usize },

    #[error("{0} is neither 0 nor a prime")]
    NotPrime(u64),

    #[error("{base}^{exponent} is not a prime power with exponent >= 1")]
    NotPrimePower { base: u64, exponent: u32 },

    #[error("prime {0} is not in the declared universe")]
    OutsideUniverse(u64),

    #[error("tuples live over different spaces or universes")]
    Mismatch,

    #[error("not a set partition of {{1..{k}}}: {reason}")]
    NotAPartition { k: usize, reason: String },

    #[error("partition is crossing: {a} ~ {c} and {b} ~ {d} in distinct blocks")]
    Crossing { a: usize, b: usize, c: usize, d: usize },

    #[error("partitions have different ground sets ({left} vs {right} points)")]
    GroundSetMismatch { left: usize, right: usize },

    #[error("tuple does not satisfy the support closure equation")]
    InvalidTuple,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} = {value} exceeds the configured limit {limit}")]
    LimitExceeded { what: &'static str, value: u64, limit: u64 },

    #[error("not a partial order: {0}")]
    NotPartialOrder(String),

    #[error("not a lattice: elements {0} and {1} have no {2}")]
    NotLattice(usize, usize, &'static str),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::LimitExceeded { .. })
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::InvariantViolation(_))
    }

    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpace { .. } => "invalid_space",
            Error::IntervalOutOfRange { .. } => "interval_out_of_range",
            Error::TupleLength { .. } => "tuple_length",
            Error::NotPrime(_) => "not_prime",
            Error::NotPrimePower { .. } => "not_prime_power",
            Error::OutsideUniverse(_) => "outside_universe",
            Error::Mismatch => "mismatch",
            Error::NotAPartition { .. } => "not_a_partition",
            Error::Crossing { .. } => "crossing",
            Error::GroundSetMismatch { .. } => "ground_set_mismatch",
            Error::InvalidTuple => "invalid_tuple",
            Error::Precondition(_) => "precondition",
            Error::LimitExceeded { .. } => "limit_exceeded",
            Error::NotPartialOrder(_) => "not_partial_order",
            Error::NotLattice(..) => "not_lattice",
            Error::InvariantViolation(_) => "invariant_violation",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
