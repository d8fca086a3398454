//! Exact coefficient rings and truncated power series.

pub mod bivariate;
pub mod literal;
pub mod scalar;
pub mod series;

pub use bivariate::BivariateTruncated;
pub use literal::{parse_bivariate, parse_polynomial, parse_rational, parse_scalar, parse_series};
pub use scalar::{rat, Rational, Scalar, SymbolStyle};
pub use series::TruncatedSeries;
