use thiserror::Error;

/// Every failure the library can report.
///
/// The variants are shared across modules so that front ends (CLI, C ABI)
/// can map them onto one stable set of codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is even; only odd primes are supported")]
    EvenModulus(u64),
    #[error("modulus {0} exceeds the 61-bit limit")]
    ModulusTooLarge(u64),
    #[error("elements belong to different fields (p={0} vs p={1})")]
    FieldMismatch(u64, u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("duplicate abscissa {0} in interpolation points")]
    DuplicateAbscissa(u64),
    #[error("interpolation needs at least one point")]
    NoPoints,

    #[error("partition step must be nonzero")]
    ZeroStep,
    #[error("bucket width {t} out of range for p={p} (need 1 <= t < p)")]
    WidthOutOfRange { p: u64, t: u64 },
    #[error("bucket index {index} out of range (bucket count {count})")]
    IndexOutOfRange { index: u64, count: u64 },

    #[error("node index {ell} outside [0, {n}]")]
    BadIndex { ell: u64, n: u64 },
    #[error("code length {len} does not fit in F_{p}")]
    BadLength { len: u64, p: u64 },
    #[error("bit budget B={0} is below the minimum of 3")]
    BadBitBudget(u32),
    #[error("k + m = {sum} exceeds the admissible bound {bound:.6}")]
    InadmissibleDimension { sum: usize, bound: f64 },
    #[error("no dimension is admissible: bound {bound:.6} < m + 1 = {needed}")]
    NoAdmissibleDimension { bound: f64, needed: usize },
    #[error("missing node {0} listed twice or outside the field")]
    BadMissingSet(u64),
    #[error("polynomial degree {degree} is not below the code dimension {k}")]
    DegreeTooHigh { degree: usize, k: usize },

    #[error("transcript does not match the scheme: {0}")]
    TranscriptMismatch(String),
    #[error("no polynomial is consistent with the transcript")]
    InconsistentTranscript,
    #[error("consistent candidates disagree at the repaired node")]
    AmbiguousRepair,
    #[error("more than one polynomial is consistent with the transcript")]
    AmbiguousDecoding,

    #[error("search needs {needed} steps, budget is {budget}")]
    SearchBudgetExceeded { needed: u128, budget: u64 },
    #[error("no injective family found in {trials} trials")]
    NoInjectiveFamilyFound { trials: usize },
    #[error("need at least {needed} evaluation points, field has {available}")]
    TooFewPoints { needed: usize, available: u64 },

    #[error("polynomial is constant; the sum is trivial")]
    ConstantPolynomial,
    #[error("Kloosterman numerator is zero mod p")]
    ZeroNumerator,
    #[error("range length {len} must lie in [1, {max}]")]
    RangeTooLong { len: u64, max: u64 },
    #[error("value {value} lies outside the window [-{t}, {t}]")]
    WindowViolation { value: i64, t: u64 },

    #[error("instance failed verification; refusing to run")]
    UnverifiedInstance,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
