//! Exact counting of multiplicative polynomial families over F_q[T] and of
//! effective divisors on function fields, with certified coefficient
//! asymptotics.

pub mod constants;
pub mod error;
pub mod estimator;
pub mod field;
pub mod lemmas;
pub mod lpoly;
pub mod nt;
pub mod poly;
pub mod primes;
pub mod real;
pub mod semigroup;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use estimator::{
    estimate_coefficient, estimate_range, simplified_bound_threshold, EstimateOptions, EstimateResult, EstimatorSpec,
};
pub use field::{build_field, field_of_size, Elem, FieldSpec};
pub use lpoly::LPolynomial;
pub use poly::{Factorization, MonicPoly};
pub use primes::{phi_m, pi_arith, pi_chi2, pi_q, ArithPrimeTable, Chi2Class};
pub use real::Real;
pub use semigroup::{count, CountMethod, CountTable, FamilySpec};
pub use series::{GeneratorCounts, QPoly, TruncatedSeries};
