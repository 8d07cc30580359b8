use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::primes::factor;
use super::Rational;

/// A number `coeff · π^pi_pow · √radicand` with squarefree positive radicand.
///
/// Closed forms of L-values and archimedean factors live in this set, so
/// their products can be simplified exactly before anything is evaluated.
#[derive(Clone, PartialEq, Eq)]
pub struct PiSurd {
    pub coeff: Rational,
    pub pi_pow: i32,
    pub radicand: BigInt,
}

impl PiSurd {
    pub fn rational(r: Rational) -> Self {
        PiSurd {
            coeff: r,
            pi_pow: 0,
            radicand: BigInt::one(),
        }
    }

    pub fn pi_power(e: i32) -> Self {
        PiSurd {
            coeff: Rational::one(),
            pi_pow: e,
            radicand: BigInt::one(),
        }
    }

    /// √r for a nonnegative rational r.
    pub fn sqrt(r: &Rational) -> Self {
        assert!(!r.is_negative(), "square root of a negative rational");
        if r.is_zero() {
            return Self::rational(Rational::zero());
        }
        // √(a/b) = √(ab)/b, then pull squares out of ab.
        let prod = r.numer() * r.denom();
        let mut outside = BigInt::one();
        let mut inside = BigInt::one();
        for (p, e) in factor(&prod) {
            outside *= BigInt::from(p).pow(e / 2);
            if e % 2 == 1 {
                inside *= p;
            }
        }
        PiSurd {
            coeff: Rational::new(outside, r.denom().clone()),
            pi_pow: 0,
            radicand: inside,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let g = num_integer::Integer::gcd(&self.radicand, &o.radicand);
        let a = &self.radicand / &g;
        let b = &o.radicand / &g;
        PiSurd {
            coeff: &self.coeff * &o.coeff * Rational::from_integer(g),
            pi_pow: self.pi_pow + o.pi_pow,
            radicand: a * b,
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.coeff.is_zero(), "reciprocal of zero");
        PiSurd {
            coeff: self.coeff.recip() / Rational::from_integer(self.radicand.clone()),
            pi_pow: -self.pi_pow,
            radicand: self.radicand.clone(),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        PiSurd {
            coeff: &self.coeff * r,
            ..self.clone()
        }
    }

    /// The value as a rational, when π and the square root have cancelled.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeff.is_zero() {
            return Some(Rational::zero());
        }
        (self.pi_pow == 0 && self.radicand.is_one()).then(|| self.coeff.clone())
    }

    pub fn to_f64(&self) -> f64 {
        super::to_f64(&self.coeff)
            * std::f64::consts::PI.powi(self.pi_pow)
            * super::to_f64(&Rational::from_integer(self.radicand.clone())).sqrt()
    }
}

impl fmt::Debug for PiSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})·π^{}·√{}", self.coeff, self.pi_pow, self.radicand)
    }
}
