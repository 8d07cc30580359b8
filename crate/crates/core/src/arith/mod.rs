//! Exact numbers: rationals, residues mod 1, cyclotomic numbers, error-tracked
//! floats, partitions, Bernoulli numbers and rational reconstruction.

mod bernoulli;
mod bigfloat;
mod cyclotomic;
mod partition;
pub mod primes;
mod qmodz;
mod reconstruct;
pub mod ser;
mod surd;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub use bernoulli::{bernoulli, bernoulli_poly, generalized_bernoulli};
pub use bigfloat::BigFloat;
pub use cyclotomic::{Cyclotomic, CyclotomicField};
pub use partition::{partition, partition_power, partition_power_series, partitions_up_to};
pub use qmodz::QmodZ;
pub use reconstruct::rational_reconstruct;
pub use surd::PiSurd;

pub type Integer = BigInt;
pub type Rational = BigRational;

/// Coefficient ring for series and cyclotomic numbers.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + FromPrimitive
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits the coefficient type")
    }
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + Debug
        + Zero
        + One
        + FromPrimitive
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
        + Send
        + Sync
        + 'static
{
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("no rational with denominator <= {bound} lies within the error bound")]
    NoReconstruction { bound: String },
    #[error("reconstruction precondition violated: error {err} is not below 1/(2*{bound}^2)")]
    ToleranceTooLoose { err: String, bound: String },
    #[error("precision mismatch: {0} vs {1} bits")]
    PrecisionMismatch(u32, u32),
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("square root of a negative interval")]
    NegativeSqrt,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let t = s.trim();
    t.parse::<Rational>().map_err(|_| ArithError::Parse(s.to_string()))
}

/// Largest integer not exceeding `r`.
pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Smallest integer not below `r`.
pub fn ceil(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

pub fn frac(r: &Rational) -> Rational {
    r - Rational::from_integer(floor(r))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn is_integral(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn rabs(r: &Rational) -> Rational {
    r.abs()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn rat_pow(r: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}
