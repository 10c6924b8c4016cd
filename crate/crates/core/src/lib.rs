//! Local-realistic bounds of generic multipartite Bell functions.
//!
//! A generic Bell function `G^ν_N` for `N` parties with `d` outcomes is a sum
//! of `2^N (d-1)` cosine terms whose arguments are fixed by integer
//! "argument functions" `4C + 2γ + 4ν`. This crate evaluates the function in
//! its equivalent forms ([`representations`]), derives maximal local bounds
//! by applying maximum constraints to the two most degenerate argument terms
//! and propagating them as an arithmetic sequence ([`bounds`]), and checks
//! every closed form against an exhaustive search over deterministic
//! hidden-variable assignments ([`oracle`]). The two-outcome Mermin,
//! Svetlichny, Ardehali and Collins functions are reduced to generic form in
//! [`catalog`].
//!
//! Numeric code is generic over a [`Scalar`] (`f32` or `f64`); the phase `ν`
//! is always an exact rational ([`Nu`]).

pub mod bounds;
pub mod catalog;
pub mod error;
pub mod oracle;
pub mod report;
pub mod representations;
pub mod scenario;
pub mod tolerance;

mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use scenario::{Assignment, BellScenario, Residue4d, SubsetIndex};

/// Exact phase parameter `ν`.
pub type Nu = num_rational::Ratio<i64>;

/// Default floating type.
pub type Real = f64;

pub type BoundReportF64 = bounds::BoundReport<f64>;
pub type SearchResultF64 = oracle::SearchResult<f64>;
pub type CorrelationVectorI64 = representations::CorrelationVector;
pub type ReductionF64 = catalog::Reduction<f64>;
