use thiserror::Error;

/// Every failure the library reports.
///
/// Variants carry the first witness found so callers can print something
/// actionable instead of a bare "invalid input".
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // finite fields
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("extension degree {0} outside 1..=16")]
    BadDegree(u32),
    #[error("field {p}^{m} has more than 2^32 elements")]
    FieldTooLarge { p: u32, m: u32 },
    #[error("no irreducible modulus found for {p}^{m}")]
    NoModulusFound { p: u32, m: u32 },
    #[error("modulus is not monic irreducible of the stated degree")]
    NotIrreducible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {0} is not an element of the field")]
    NotInField(u64),
    #[error("operation requires characteristic 2")]
    OddCharacteristic,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("parse error: {0}")]
    Parse(String),

    // groups
    #[error("table is not square or is empty")]
    TableShape,
    #[error("table entry {0} out of range")]
    EntryOutOfRange(usize),
    #[error("index 0 is not a two-sided identity")]
    NoIdentity,
    #[error("row or column {0} is not a permutation")]
    NotLatin(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("element {0} is not a central involution")]
    NotCentralInvolution(usize),
    #[error("subgroup is not normal: conjugation by {0} leaves it")]
    NotNormal(usize),
    #[error("group of order {0} is not a p-group")]
    NotPGroup(usize),

    // catalog
    #[error("unknown catalog name {0:?}")]
    UnknownName(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),

    // group algebras
    #[error("operands belong to different algebras")]
    SpecMismatch,
    #[error("|G| = {order} is not a power of char(F) = {p}")]
    NotPGroupOverField { order: usize, p: u32 },
    #[error("element has augmentation 0 and is not a unit")]
    NotAUnit,
    #[error("Neumann series did not terminate within {0} terms")]
    NilpotencyCapExceeded(usize),
    #[error("map is not a permutation of the group")]
    NotPermutation,
    #[error("map is not an anti-automorphism: fails at ({0}, {1})")]
    NotAntiAutomorphism(usize, usize),
    #[error("map does not square to the identity at {0}")]
    NotOrderTwo(usize),
    #[error("coefficient vector has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },

    // unitary subgroups
    #[error("element is not a normalized unit")]
    NotNormalized,
    #[error("1 + x is not invertible")]
    NotInvertible,
    #[error("search space of {size} elements exceeds cap {cap} ({level})")]
    SearchSpaceTooLarge { size: String, cap: u64, level: String },
    #[error("group has no central involution")]
    NoCentralInvolution,
    #[error("T_c is not a commuting set")]
    TcNotCommutative,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("group order is ambiguous between {0:?}")]
    Ambiguous(Vec<u64>),
    #[error("no group order is consistent with {0}")]
    NotRecoverable(String),
    #[error("method unavailable: {0}")]
    MethodUnavailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
