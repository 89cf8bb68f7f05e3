//! Laboratory for list decoding of product constructions of linear codes.
//!
//! The crate implements, at desk scale, the objects needed to study how list
//! decodability behaves under tensoring and interleaving of linear codes:
//!
//! * exact arithmetic in GF(q) for prime powers q <= 4096 ([`field`]),
//! * generator-matrix codes with brute-force distance and list-decoding
//!   oracles ([`code`]),
//! * standard families and product constructions ([`families`]),
//! * closed-form combinatorial bounds with machine-checkable reports
//!   ([`bounds`]),
//! * decoders for interleaved codes, including an instrumented execution
//!   tree for the erasure-propagation decoder ([`interleaved`]),
//! * the advice-based decoder for tensor products ([`tensor`]),
//! * specialized decoders for spaces of linear transformations, i.e.
//!   interleaved Hadamard codes ([`lintrans`]).
//!
//! Everything is exact where exactness matters: decoding radii, edge
//! weights, and distances are rational numbers, never floats. Floating
//! point appears only in analytic bound formulas that involve square roots
//! or logarithms.
//!
//! All randomized operations take explicit seeds and are reproducible; the
//! only source of randomness is a counter-based ChaCha stream.

pub mod bounds;
pub mod code;
pub mod families;
pub mod field;
pub mod grid;
pub mod interleaved;
pub mod linalg;
pub mod lintrans;
pub mod tensor;

use std::sync::OnceLock;

pub use code::{ErasureOutcome, LinearCode, Symbol, Word};
pub use field::Field;
pub use grid::Grid;

/// Exact rational used for distances, radii, and weights.
pub type Frac = num::rational::Ratio<i64>;

/// Default ceiling on brute-force enumeration (codewords, message grids,
/// advice assignments). Chosen so every oracle finishes interactively.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

/// Ceiling on exact punctured-distance computation inside decode trees.
pub const TREE_DISTANCE_CAP: u64 = 1 << 12;

/// Ceiling on the advice space enumerated by the tensor decoder.
pub const ADVICE_CAP: u64 = 1 << 16;

/// Largest vertex count for which exact maximum-independent-set search runs.
pub const ALPHA_EXACT_CAP: usize = 40;

/// Enumeration ceiling honored by every brute-force oracle.
///
/// Defaults to [`DEFAULT_ENUM_CAP`]; the environment variable `LDLAB_CAP`
/// overrides it process-wide (read once, first use wins).
pub fn enum_cap() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("LDLAB_CAP")
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .unwrap_or(DEFAULT_ENUM_CAP)
    })
}

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} exceeds the supported maximum 4096")]
    OrderTooLarge(u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u16),
    #[error("element {element} out of range for GF({q})")]
    ElementOutOfRange { element: u64, q: u16 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("generator matrix does not have full row rank")]
    RankDeficient,
    #[error("enumeration of {size} items exceeds the cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u64 },
    #[error("erasure set of size {got} not smaller than the minimum distance {d}")]
    TooManyErasures { got: usize, d: usize },
    #[error("duplicate evaluation point {0}")]
    DuplicateEvalPoint(u16),
    #[error("degree bound {degree} too large for {n} evaluation points")]
    DegreeTooLarge { degree: usize, n: usize },
    #[error("decoding radius {radius} is not below the relative distance {delta}")]
    RadiusTooLarge { radius: String, delta: String },
    #[error("parameter out of domain: {0}")]
    DomainError(String),
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(u64),
    #[error("sample size {m} exceeds the population size {n}")]
    SampleTooLarge { m: usize, n: usize },
    #[error("advice space of {size} assignments exceeds the cap {cap}")]
    AdviceSpaceTooLarge { size: u128, cap: u64 },
    #[error("code is trivial: {0}")]
    TrivialCode(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Floor of a rational multiple of an integer, as an integer error budget.
///
/// `floor_mul(eta, n)` is the largest error count consistent with relative
/// radius `eta` on block length `n`; negative results are clamped upward to
/// `None` (no budget at all).
pub fn floor_mul(eta: Frac, n: usize) -> Option<usize> {
    let scaled = eta * Frac::from_integer(n as i64);
    let f = scaled.floor().to_integer();
    if f < 0 {
        None
    } else {
        Some(f as usize)
    }
}

/// Deterministic per-trial seed derivation: a SplitMix64 step over the
/// master seed combined with the trial index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_mul_handles_negative_budgets() {
        assert_eq!(floor_mul(Frac::new(3, 8), 8), Some(3));
        assert_eq!(floor_mul(Frac::new(3, 8), 5), Some(1));
        assert_eq!(floor_mul(Frac::new(-1, 8), 8), None);
        assert_eq!(floor_mul(Frac::new(0, 1), 8), Some(0));
    }

    #[test]
    fn derive_seed_is_stable() {
        // Frozen values: experiment reports depend on this mapping.
        assert_eq!(derive_seed(0, 0), 16294208416658607535);
        assert_eq!(derive_seed(42, 7), derive_seed(42, 7));
        assert_ne!(derive_seed(42, 7), derive_seed(42, 8));
        assert_ne!(derive_seed(42, 7), derive_seed(43, 7));
    }
}
