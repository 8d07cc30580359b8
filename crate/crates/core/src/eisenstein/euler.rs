//! Products of local factors over the primes outside a finite set.
//!
//! Two independent routes: a closed form through Dirichlet L-values at
//! integers (exact), and a truncated Euler product with a rigorous tail bound
//! (numeric).

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::primes::{fundamental_discriminant, kronecker, primes_up_to};
use crate::arith::{bernoulli, generalized_bernoulli, ArithError, BigFloat, PiSurd, Rational};

/// Which local factor the good primes contribute.
#[derive(Debug, Clone, PartialEq)]
pub enum GoodFactor {
    /// 1 + χ(p)·p^{−s} (odd rank r = 2s + 1)
    Odd { s: u32, disc: BigInt },
    /// 1 − χ(p)·p^{−s} (even rank r = 2s)
    Even { s: u32, disc: BigInt },
}

impl GoodFactor {
    /// The factor for rank `rank`, Gram determinant `det` and norm `n`.
    pub fn new(rank: usize, det: &BigInt, n: &Rational) -> Self {
        if rank % 2 == 1 {
            let s = ((rank - 1) / 2) as u32;
            let sign = if s % 2 == 0 { 1 } else { -1 };
            let d = -n * Rational::from_integer(det * 2 * sign);
            GoodFactor::Odd {
                s,
                disc: fundamental_discriminant(&d),
            }
        } else {
            let s = (rank / 2) as u32;
            let sign = if s % 2 == 0 { 1 } else { -1 };
            let d = Rational::from_integer(det * sign);
            GoodFactor::Even {
                s,
                disc: fundamental_discriminant(&d),
            }
        }
    }

    pub fn exponent(&self) -> u32 {
        match self {
            GoodFactor::Odd { s, .. } | GoodFactor::Even { s, .. } => *s,
        }
    }

    pub fn character(&self, p: u64) -> i32 {
        match self {
            GoodFactor::Odd { disc, .. } | GoodFactor::Even { disc, .. } => kronecker(disc, p),
        }
    }

    /// The local factor at p.
    pub fn at(&self, p: u64) -> Rational {
        let chi = self.character(p) as i64;
        let t = Rational::new(BigInt::from(chi), BigInt::from(p).pow(self.exponent()));
        match self {
            GoodFactor::Odd { .. } => Rational::one() + t,
            GoodFactor::Even { .. } => Rational::one() - t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EulerError {
    #[error("L({s}, χ) with χ(−1) = {sign} has no closed form at this parity")]
    WrongParity { s: u32, sign: i32 },
    #[error("product is not a rational number: {0}")]
    NotRational(String),
    #[error("exponent {0} is too small for a convergent tail bound")]
    SlowConvergence(u32),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * k)
}

fn int(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

/// L(s, χ_D) for the primitive real character of a fundamental discriminant,
/// valid when χ(−1) = (−1)^s.
pub fn dirichlet_l(s: u32, disc: &BigInt) -> Result<PiSurd, EulerError> {
    let f = disc.abs();
    let delta = if disc.is_negative() { 1 } else { 0 };
    if (s as i64 - delta) % 2 != 0 || s == 0 {
        return Err(EulerError::WrongParity {
            s,
            sign: if delta == 1 { -1 } else { 1 },
        });
    }
    let fu = f.to_u64().expect("conductor fits u64");
    let b = if fu == 1 {
        bernoulli(s as usize)
    } else {
        generalized_bernoulli(s as usize, fu, |a| kronecker(disc, a))
    };
    let sign = if ((s as i64 - delta) / 2 + 1) % 2 == 0 { 1 } else { -1 };
    let coeff = int(BigInt::from(sign)) * b * int(BigInt::one() << s)
        / (int(f.pow(s)) * int(factorial(s)) * int(BigInt::from(2)));
    Ok(PiSurd::rational(coeff)
        .mul(&PiSurd::pi_power(s as i32))
        .mul(&PiSurd::sqrt(&int(f))))
}

/// ζ(2s).
pub fn zeta_even(s: u32) -> PiSurd {
    let b = bernoulli(2 * s as usize);
    let sign = if s % 2 == 1 { 1 } else { -1 };
    let coeff = int(BigInt::from(sign)) * b * int(BigInt::one() << (2 * s))
        / int(factorial(2 * s) * 2);
    PiSurd::rational(coeff).mul(&PiSurd::pi_power(2 * s as i32))
}

/// Π_{p ∉ bad} factor(p) in closed form.
pub fn good_product_exact(g: &GoodFactor, bad: &[u64]) -> Result<PiSurd, EulerError> {
    let s = g.exponent();
    match g {
        GoodFactor::Odd { disc, .. } => {
            // Π (1 + χp^{−s}) = Π (1 − p^{−2s})/(1 − χp^{−s}) = L(s,χ)/ζ(2s) up to the bad primes
            let mut out = dirichlet_l(s, disc)?.div(&zeta_even(s));
            for &p in bad {
                let ps = int(BigInt::from(p).pow(s));
                let chi = int(BigInt::from(g.character(p)));
                let num = Rational::one() - &chi / &ps;
                let den = Rational::one() - Rational::one() / (&ps * &ps);
                out = out.scale(&(num / den));
            }
            Ok(out)
        }
        GoodFactor::Even { disc, .. } => {
            let mut out = dirichlet_l(s, disc)?.recip();
            for &p in bad {
                let chi = int(BigInt::from(g.character(p)));
                let ps = int(BigInt::from(p).pow(s));
                out = out.scale(&(Rational::one() / (Rational::one() - chi / ps)));
            }
            Ok(out)
        }
    }
}

/// A PiSurd evaluated to `prec` bits.
pub fn pisurd_to_bigfloat(x: &PiSurd, prec: u32) -> Result<BigFloat, ArithError> {
    let mut v = BigFloat::from_rational(&x.coeff, prec);
    if x.pi_pow != 0 {
        let pi = BigFloat::pi(prec).powi(x.pi_pow.unsigned_abs())?;
        v = if x.pi_pow > 0 { v.mul(&pi)? } else { v.div(&pi)? };
    }
    if !x.radicand.is_one() {
        v = v.mul(&BigFloat::from_rational(&int(x.radicand.clone()), prec).sqrt()?)?;
    }
    Ok(v)
}

/// Π_{p ∉ bad, p ≤ bound} factor(p), widened by a bound on the tail.
///
/// For p^{−s} ≤ 1/2 each factor has |log| ≤ 2p^{−s}, and Σ_{p>P} 2p^{−s} is
/// at most 2P^{1−s}/(s−1) + 2P^{−s}.
pub fn good_product_numeric(
    g: &GoodFactor,
    bad: &[u64],
    bound: u64,
    prec: u32,
) -> Result<BigFloat, EulerError> {
    let s = g.exponent();
    if s < 2 {
        return Err(EulerError::SlowConvergence(s));
    }
    let mut acc = BigFloat::from_int(1, prec);
    for p in primes_up_to(bound) {
        if bad.binary_search(&p).is_ok() {
            continue;
        }
        acc = acc.mul(&BigFloat::from_rational(&g.at(p), prec))?;
    }
    let big_p = int(BigInt::from(bound.max(2)));
    let p_s = crate::arith::rat_pow(&big_p, s as i64);
    let tail = int(BigInt::from(2)) * &big_p / (&p_s * int(BigInt::from(s - 1)))
        + int(BigInt::from(2)) / &p_s;
    // e^T − 1 ≤ 2T for T ≤ 1
    let rel = tail * int(BigInt::from(2));
    let mag = acc.midpoint().abs() + acc.error_bound();
    Ok(acc.widen(&(mag * rel)))
}

/// Smallest prime bound whose tail estimate is below 2^{−bits}.
pub fn prime_bound_for(s: u32, bits: u32) -> u64 {
    let target = (bits as f64) * std::f64::consts::LN_2;
    let mut p: u64 = 16;
    loop {
        let pf = p as f64;
        let tail = (2.0 * pf.powf(1.0 - s as f64) / (s as f64 - 1.0)).ln();
        if -tail > target + 4.0 || p > (1 << 26) {
            return p;
        }
        p = p * 3 / 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_even(1), PiSurd::rational(rat(1, 6)).mul(&PiSurd::pi_power(2)));
        assert_eq!(zeta_even(2), PiSurd::rational(rat(1, 90)).mul(&PiSurd::pi_power(4)));
        assert_eq!(dirichlet_l(2, &BigInt::one()).unwrap(), zeta_even(1));
    }

    #[test]
    fn l_values_of_small_characters() {
        // L(1, χ_{−4}) = π/4, L(3, χ_{−4}) = π³/32, L(2, χ_5) = 4π²/(25√5)
        let l = dirichlet_l(1, &BigInt::from(-4)).unwrap();
        assert_eq!(l, PiSurd::rational(rat(1, 4)).mul(&PiSurd::pi_power(1)));
        let l = dirichlet_l(3, &BigInt::from(-4)).unwrap();
        assert_eq!(l, PiSurd::rational(rat(1, 32)).mul(&PiSurd::pi_power(3)));
        let l = dirichlet_l(2, &BigInt::from(5)).unwrap();
        let expect = PiSurd::rational(rat(4, 25)).mul(&PiSurd::pi_power(2)).div(&PiSurd::sqrt(&rat(5, 1)));
        assert_eq!(l, expect);
        assert!(dirichlet_l(2, &BigInt::from(-4)).is_err());
    }

    #[test]
    fn exact_and_numeric_products_agree() {
        for (rank, det, n) in [(5usize, 12i64, rat(1, 1)), (6, 3, rat(1, 3)), (7, -2, rat(3, 4)), (8, 1, rat(2, 1))] {
            let g = GoodFactor::new(rank, &BigInt::from(det), &n);
            let bad: Vec<u64> = vec![2, 3];
            let exact = match good_product_exact(&g, &bad) {
                Ok(v) => v,
                Err(EulerError::WrongParity { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let num = good_product_numeric(&g, &bad, 20000, 96).unwrap();
            let ex = pisurd_to_bigfloat(&exact, 96).unwrap();
            let diff = (num.midpoint() - ex.midpoint()).abs();
            assert!(diff <= num.error_bound() + ex.error_bound(), "rank {rank}: {num:?} vs {ex:?}");
            assert!(num.error_bound() < rat(1, 1000));
        }
    }
}
