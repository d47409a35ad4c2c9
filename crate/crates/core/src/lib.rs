//! Exact q-series and eta-quotient workbench for partition congruences.
//!
//! The core arithmetic is generic over the coefficient ring (see
//! [`scalar::Coefficient`]); the aliases below fix the rings used by the
//! verification layer.

pub mod arith;
pub mod checks;
pub mod eta;
pub mod families;
pub mod matrix;
pub mod partitions;
pub mod report;
pub mod scalar;
pub mod series;
pub mod transform;

pub use eta::{cusps, sturm_bound, Cusp, EtaError, EtaQuotient, EtaSum};
pub use scalar::Coefficient;
pub use series::{euler_product, Exponent, Progression, QSeries, SeriesError};

/// Series over the rationals: the general-purpose carrier.
pub type RationalSeries = QSeries<num_rational::BigRational>;

/// Series with integer coefficients (every generating function in the suite).
pub type IntSeries = QSeries<num_bigint::BigInt>;
