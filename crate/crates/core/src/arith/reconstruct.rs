use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{ArithError, BigFloat, Rational};

/// Closest fraction to `x` with denominator at most `bound`, via convergents
/// and the last admissible semiconvergent.
fn best_approximation(x: &Rational, bound: &BigInt) -> Rational {
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    loop {
        let (a, r) = num.div_mod_floor(&den);
        let k2 = &a * &k1 + &k0;
        if &k2 > bound {
            // largest t with t·k1 + k0 ≤ bound
            let t = (bound - &k0) / &k1;
            let semi = Rational::new(&t * &h1 + &h0, &t * &k1 + &k0);
            let conv = Rational::new(h1.clone(), k1.clone());
            return if (&semi - x).abs() < (&conv - x).abs() {
                semi
            } else {
                conv
            };
        }
        let h2 = &a * &h1 + &h0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        if r.is_zero() {
            return Rational::new(h1, k1);
        }
        num = std::mem::replace(&mut den, r);
    }
}

/// The unique rational with denominator ≤ `bound` inside the error interval
/// of `x`.
pub fn rational_reconstruct(x: &BigFloat, bound: &BigInt) -> Result<Rational, ArithError> {
    assert!(bound.is_positive(), "denominator bound must be positive");
    let eps = x.error_bound();
    let limit = Rational::new(BigInt::one(), bound * bound * 2);
    if eps >= limit {
        return Err(ArithError::ToleranceTooLoose {
            err: format!("{:e}", super::to_f64(&eps)),
            bound: bound.to_string(),
        });
    }
    let mid = x.midpoint();
    let cand = best_approximation(&mid, bound);
    if (&cand - &mid).abs() <= eps {
        Ok(cand)
    } else {
        Err(ArithError::NoReconstruction {
            bound: bound.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    #[test]
    fn third() {
        let x = BigFloat::from_f64(0.333333333333, 1e-12, 80);
        assert_eq!(rational_reconstruct(&x, &BigInt::from(1000)).unwrap(), rat(1, 3));
    }

    #[test]
    fn cubic_gold_value() {
        let target = rat(-523777, 206215591);
        let x = BigFloat::from_rational(&target, 90).widen(&rat(1, 10).pow(22));
        assert_eq!(
            rational_reconstruct(&x, &BigInt::from(1_000_000_000)).unwrap(),
            target
        );
    }

    #[test]
    fn loose_tolerance_rejected() {
        let x = BigFloat::from_f64(0.1234, 0.1, 40);
        assert!(matches!(
            rational_reconstruct(&x, &BigInt::from(100)),
            Err(ArithError::ToleranceTooLoose { .. })
        ));
    }

    #[test]
    fn irrational_like_input_is_refused() {
        let x = BigFloat::from_f64(std::f64::consts::PI, 1e-15, 80);
        assert!(matches!(
            rational_reconstruct(&x, &BigInt::from(1000)),
            Err(ArithError::NoReconstruction { .. })
        ));
    }

    #[test]
    fn best_approximation_matches_brute_force() {
        let x = rat(314159, 100000);
        for q in 1..60i64 {
            let got = best_approximation(&x, &BigInt::from(q));
            let mut best = rat(0, 1);
            let mut dist = rat(1000, 1);
            for d in 1..=q {
                let n = crate::arith::floor(&(&x * rat(d, 1)));
                for c in [n.clone(), n + 1] {
                    let f = Rational::new(c, BigInt::from(d));
                    let e = (&f - &x).abs();
                    if e < dist {
                        dist = e;
                        best = f;
                    }
                }
            }
            assert_eq!(got, best, "bound {q}");
        }
    }

    proptest! {
        #[test]
        fn rendered_rationals_come_back(p in -10_000_000i64..10_000_000, q in 1i64..10_000_000, slack in 0u32..4) {
            let r = rat(p, q);
            let bound = BigInt::from(q) * BigInt::from(1 + slack as i64);
            let bits = 2 * bound.bits() as u32 + 10;
            let x = BigFloat::from_rational(&r, bits);
            prop_assert_eq!(rational_reconstruct(&x, &bound).unwrap(), r);
        }
    }
}
