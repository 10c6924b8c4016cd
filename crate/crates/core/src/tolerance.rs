//! Numeric tolerances and search limits shared across modules.

/// Absolute agreement between two evaluations of the same bound.
pub const BOUND_ABS: f64 = 1e-9;

/// Relative width of the argmax band around the running maximum.
pub const ARGMAX_REL: f64 = 1e-12;

/// Largest exhaustive search accepted without an explicit budget.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Witnesses kept per search unless overridden.
pub const DEFAULT_WITNESS_CAP: usize = 64;

/// Indices per work unit; fixed so results do not depend on thread count.
pub const PARTITION_SIZE: u64 = 1 << 16;

/// Random samples tried before a witness search turns exhaustive.
pub const WITNESS_RANDOM_TRIES: usize = 20_000;

/// Significant digits kept in serialized floats.
pub const OUTPUT_SIG_DIGITS: usize = 12;
