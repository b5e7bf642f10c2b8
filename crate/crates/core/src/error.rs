use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("zero has no inverse or multiplicative order")]
    ZeroElement,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
    #[error("polynomial has degree {degree} in X{var}, expected at most 1")]
    NotLinearIn { var: usize, degree: u32 },
    #[error("malformed polynomial text at byte {pos}: {msg}")]
    PolyParse { pos: usize, msg: String },
    #[error("invalid shape matrix: {0}")]
    InvalidShape(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("term cap of {cap} exceeded at iteration {k}")]
    TermCap { cap: usize, k: usize },
    #[error("size guard exceeded: {size} > {guard}")]
    GuardExceeded { size: u128, guard: u128 },
    #[error("schedule has no member for step {0}")]
    ScheduleExhausted(u64),
    #[error("period detection needs a constant or cyclic schedule")]
    UnsupportedSchedule,
    #[error("sequence has {available} terms, {requested} requested")]
    LengthShortfall { available: usize, requested: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bit string: {0}")]
    Bits(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}
