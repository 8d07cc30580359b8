//! Exact computations around Noether-Lefschetz divisors: discriminant forms,
//! the Weil representation, vector-valued theta and Eisenstein series,
//! relations among Heegner divisors, generating sets, vanishing bounds and
//! slope bounds.
//!
//! The series and cyclotomic types are generic over a coefficient ring; the
//! aliases below fix it to exact rationals.

pub mod arith;
pub mod lattice;
pub mod discform;
pub mod weil;
pub mod qexp;
pub mod theta;
pub mod eisenstein;
pub mod nlpic;
pub mod bounds;
pub mod slope;

pub use arith::Rational;

pub type QExpansion = qexp::VVQExpansion<Rational>;
pub type ScalarSeries = qexp::ScalarQExpansion<Rational>;
pub type CyclotomicQ = arith::Cyclotomic<Rational>;
