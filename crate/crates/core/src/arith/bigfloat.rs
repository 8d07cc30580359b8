use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ArithError, Rational};

/// Fixed-point binary number with a tracked absolute error bound.
///
/// The represented interval is `(mant ± err) / 2^prec`. Every operation
/// widens `err` so the true value stays inside.
#[derive(Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    err: BigUint,
    prec: u32,
}

fn shift_round(x: &BigInt, bits: u32) -> BigInt {
    if bits == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (bits - 1);
    (x + half) >> bits
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

impl BigFloat {
    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let scaled = r.numer() << prec;
        let (q, rem) = scaled.div_mod_floor(r.denom());
        let twice: BigInt = rem * 2;
        let mant = if &twice >= r.denom() { q + 1 } else { q };
        let exact = (r.numer() << prec) == &mant * r.denom();
        BigFloat {
            mant,
            err: if exact { BigUint::zero() } else { BigUint::one() },
            prec,
        }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)), prec)
    }

    /// `x` with absolute error at most `abs_err`.
    pub fn from_f64(x: f64, abs_err: f64, prec: u32) -> Self {
        let r = Rational::from_float(x).expect("finite float");
        let mut out = Self::from_rational(&r, prec);
        let e = Rational::from_float(abs_err.abs()).expect("finite error");
        let units = super::ceil(&(e * Rational::from_integer(BigInt::one() << prec)));
        out.err += units.to_biguint().unwrap_or_default();
        out
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    /// Midpoint as an exact rational.
    pub fn midpoint(&self) -> Rational {
        Rational::new(self.mant.clone(), BigInt::one() << self.prec)
    }

    /// Upper bound on the absolute error.
    pub fn error_bound(&self) -> Rational {
        Rational::new(
            BigInt::from_biguint(Sign::Plus, self.err.clone()),
            BigInt::one() << self.prec,
        )
    }

    pub fn error_units(&self) -> &BigUint {
        &self.err
    }

    pub fn to_f64(&self) -> f64 {
        super::to_f64(&self.midpoint())
    }

    pub fn contains(&self, r: &Rational) -> bool {
        (r - self.midpoint()).abs() <= self.error_bound()
    }

    /// Adds `e` (a rational bound) to the error.
    pub fn widen(&self, e: &Rational) -> Self {
        let units = super::ceil(&(e.abs() * Rational::from_integer(BigInt::one() << self.prec)));
        let mut out = self.clone();
        out.err += units.to_biguint().unwrap_or_default();
        out
    }

    fn check(&self, o: &Self) -> Result<(), ArithError> {
        if self.prec != o.prec {
            Err(ArithError::PrecisionMismatch(self.prec, o.prec))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, ArithError> {
        self.check(o)?;
        Ok(BigFloat {
            mant: &self.mant + &o.mant,
            err: &self.err + &o.err,
            prec: self.prec,
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, ArithError> {
        self.check(o)?;
        Ok(BigFloat {
            mant: &self.mant - &o.mant,
            err: &self.err + &o.err,
            prec: self.prec,
        })
    }

    pub fn neg(&self) -> Self {
        BigFloat {
            mant: -&self.mant,
            err: self.err.clone(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, ArithError> {
        self.check(o)?;
        let p = self.prec;
        let mant = shift_round(&(&self.mant * &o.mant), p);
        let a = self.mant.magnitude();
        let b = o.mant.magnitude();
        // |ab − âb̂| ≤ |â|e_b + |b̂|e_a + e_a e_b, all scaled by 2^{2p}
        let raw = a * &o.err + b * &self.err + &self.err * &o.err;
        let err = ceil_div(&raw, &(BigUint::one() << p)) + 1u32;
        Ok(BigFloat { mant, err, prec: p })
    }

    pub fn div(&self, o: &Self) -> Result<Self, ArithError> {
        self.check(o)?;
        let p = self.prec;
        let bm = o.mant.magnitude();
        if bm <= &o.err {
            return Err(ArithError::DivisionByZero);
        }
        let num = &self.mant << p;
        let (q, r) = num.div_mod_floor(&o.mant);
        let twice: BigInt = r * 2;
        let mant = if twice.abs() >= o.mant.abs() { q + 1 } else { q };
        // |a/b − â/b̂| ≤ (e_a + |â/b̂| e_b) / (|b̂| − e_b)
        let quot = mant.magnitude() + 1u32;
        let raw = (&self.err << p) + &quot * &o.err;
        let err = ceil_div(&raw, &(bm - &o.err)) + 1u32;
        Ok(BigFloat { mant, err, prec: p })
    }

    pub fn mul_rational(&self, r: &Rational) -> Result<Self, ArithError> {
        self.mul(&Self::from_rational(r, self.prec))
    }

    pub fn powi(&self, e: u32) -> Result<Self, ArithError> {
        let mut acc = Self::from_int(1, self.prec);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn sqrt(&self) -> Result<Self, ArithError> {
        let p = self.prec;
        let lo = &self.mant - BigInt::from_biguint(Sign::Plus, self.err.clone());
        if lo.sign() != Sign::Plus {
            return Err(ArithError::NegativeSqrt);
        }
        let mant = (&self.mant << p).sqrt();
        // |√x − √x̂| ≤ e / √(x̂ − e), in units of 2^{-p}
        let denom = (lo.magnitude() << p).sqrt();
        let raw = &self.err << p;
        let err = ceil_div(&raw, &denom.max(BigUint::one())) + 2u32;
        Ok(BigFloat { mant, err, prec: p })
    }

    /// π by Machin's formula.
    pub fn pi(prec: u32) -> Self {
        let guard = 32;
        let w = prec + guard;
        let one = BigInt::one() << w;
        let arctan_inv = |x: u64| -> (BigInt, u64) {
            let x2 = BigInt::from(x * x);
            let mut term = &one / BigInt::from(x);
            let mut sum = term.clone();
            let mut k = 1u64;
            let mut n = 0u64;
            while !term.is_zero() {
                term /= &x2;
                let t = &term / BigInt::from(2 * k + 1);
                if k % 2 == 1 {
                    sum -= t;
                } else {
                    sum += t;
                }
                k += 1;
                n += 1;
            }
            (sum, n + 2)
        };
        let (a, na) = arctan_inv(5);
        let (b, nb) = arctan_inv(239);
        let pi = a * 16 - b * 4;
        let slack = BigUint::from(16 * 4 * na + 4 * 4 * nb);
        let mant = shift_round(&pi, guard);
        let err = ceil_div(&slack, &(BigUint::one() << guard)) + 1u32;
        BigFloat { mant, err, prec }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:e} ± {:e}",
            self.to_f64(),
            self.error_bound().to_f64().unwrap_or(f64::INFINITY)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn pi_digits() {
        let pi = BigFloat::pi(200);
        let approx = Rational::new(
            "31415926535897932384626433832795028841971693993751".parse().unwrap(),
            BigInt::from(10).pow(49),
        );
        assert!((pi.midpoint() - &approx).abs() < rat(1, 1_000_000_000_000_000) * rat(1, 1_000_000_000_000_000));
        assert!(pi.error_bound() < rat(1, 1 << 60));
    }

    #[test]
    fn exact_rationals_carry_no_error() {
        let x = BigFloat::from_rational(&rat(3, 8), 40);
        assert!(x.error_units().is_zero());
        assert_eq!(x.midpoint(), rat(3, 8));
    }

    #[test]
    fn arithmetic_encloses_true_values() {
        let p = 64;
        let pairs = [(rat(1, 3), rat(-2, 7)), (rat(22, 7), rat(355, 113)), (rat(-5, 11), rat(1, 1000))];
        for (a, b) in pairs {
            let x = BigFloat::from_rational(&a, p);
            let y = BigFloat::from_rational(&b, p);
            assert!(x.add(&y).unwrap().contains(&(&a + &b)));
            assert!(x.sub(&y).unwrap().contains(&(&a - &b)));
            assert!(x.mul(&y).unwrap().contains(&(&a * &b)));
            assert!(x.div(&y).unwrap().contains(&(&a / &b)));
        }
    }

    #[test]
    fn sqrt_encloses() {
        let two = BigFloat::from_int(2, 80);
        let s = two.sqrt().unwrap();
        let sq = s.mul(&s).unwrap();
        assert!(sq.contains(&rat(2, 1)));
        assert!((s.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mixed_precision_rejected() {
        let a = BigFloat::from_int(1, 10);
        let b = BigFloat::from_int(1, 20);
        assert_eq!(a.add(&b), Err(ArithError::PrecisionMismatch(10, 20)));
    }
}
