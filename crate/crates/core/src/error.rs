use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("cyclic summand order must be a prime power greater than 1, got {0}")]
    BadCyclicOrder(u64),
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
    #[error("multiplication by 0 is not supported; use the trivial descriptor")]
    ZeroMultiplier,
    #[error("order {given} is not canonical for this group (canonical order is {canonical}); canonicalize first")]
    NonCanonicalOrder { given: u64, canonical: u64 },
    #[error("coordinate {coord} is outside the group (multiplicity {multiplicity})")]
    CoordinateOutOfRange { coord: String, multiplicity: String },
    #[error("malformed coordinate or value: {0}")]
    BadCoordinate(String),
    #[error("operands live in different groups")]
    MixedGroups,
    #[error("empty operand: the result is empty and callers must short-circuit")]
    EmptyOperand,
    #[error("transversal has {size} representatives, exceeding the cap of {cap}")]
    TransversalTooLarge { size: String, cap: usize },
    #[error("finite subgroup enumeration exceeded the cap of {0} elements")]
    SubgroupTooLarge(usize),
    #[error("no round set of order {order}: {reason}")]
    NoRoundSet { order: u64, reason: String },
    #[error("generator emits {element}, which is not in G[{order}]")]
    OutsideTorsion { element: String, order: u64 },
    #[error("round atom carries no valid certificate: {0}")]
    Uncertified(String),
    #[error("operation needs an infinite set")]
    FiniteSet,
    #[error("generator prefix is exhausted after {0} elements")]
    PrefixExhausted(usize),
    #[error("character construction failed after {attempts} attempts: {detail}")]
    RetriesExhausted { attempts: usize, detail: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
