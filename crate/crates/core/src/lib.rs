//! Exact arithmetic for the function `f(2^k l) = l^(1-k)` (odd `l`), its
//! companions `g` and `h`, and instance checkers for the identities and
//! bounds satisfied by the running products `prod_{r<=n} f(r)` and
//! `prod_{r<=n} h(r)`.
//!
//! Values are kept as prime-exponent maps ([`FactoredRational`]). Size
//! comparisons go through fixed-point `log2` enclosures first and fall back
//! to exact big-integer comparison when an enclosure is inconclusive.

pub mod error;
pub mod factored;
pub mod functions;
pub mod interval;
pub mod products;
pub mod scanner;
pub mod theorems;
pub mod valuation;

pub use error::{Error, Result};
pub use factored::{BigNatural, FactoredRational};
pub use interval::{Interval, Log2Enclosure};
pub use products::{ProductAccumulator, ProductKind};
pub use theorems::{ConstantC, Margin, TheoremId, Verdict};
pub use valuation::{DirectFactor, Factorize, PrimeLogTable, SpfSieve, ValuationSplit};

/// Double-precision interval, the reporting type used throughout.
pub type Interval64 = Interval<f64>;
/// Single-precision interval.
pub type Interval32 = Interval<f32>;
