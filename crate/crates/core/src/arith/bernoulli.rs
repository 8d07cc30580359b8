use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use super::Rational;

/// B_0, …, B_n with B_1 = −1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::zero(); n + 1];
    b[0] = Rational::one();
    for m in 1..=n {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate().take(m) {
            acc += Rational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(j))) * bj;
        }
        b[m] = -acc / Rational::from_integer(BigInt::from(m + 1));
    }
    b
}

pub fn bernoulli(n: usize) -> Rational {
    bernoulli_numbers(n).pop().unwrap()
}

/// Bernoulli polynomial B_n(x) = Σ_k C(n,k) B_k x^{n−k}.
pub fn bernoulli_poly(n: usize, x: &Rational) -> Rational {
    let b = bernoulli_numbers(n);
    let mut acc = Rational::zero();
    let mut xp = Rational::one();
    for k in (0..=n).rev() {
        acc += Rational::from_integer(binomial(BigInt::from(n), BigInt::from(k))) * &b[k] * &xp;
        xp *= x;
    }
    acc
}

/// Generalized Bernoulli number B_{n,χ} = f^{n−1} Σ_{a=1}^{f} χ(a) B_n(a/f)
/// for a character χ of modulus f.
pub fn generalized_bernoulli(n: usize, f: u64, chi: impl Fn(u64) -> i32) -> Rational {
    let b = bernoulli_numbers(n);
    let fr = Rational::from_integer(BigInt::from(f));
    let mut sum = Rational::zero();
    for a in 1..=f {
        let c = chi(a);
        if c == 0 {
            continue;
        }
        let x = Rational::new(BigInt::from(a), BigInt::from(f));
        let mut val = Rational::zero();
        let mut xp = Rational::one();
        for k in (0..=n).rev() {
            val += Rational::from_integer(binomial(BigInt::from(n), BigInt::from(k))) * &b[k] * &xp;
            xp *= &x;
        }
        sum += val * Rational::from_integer(BigInt::from(c));
    }
    if n == 0 {
        sum / fr
    } else {
        sum * super::rat_pow(&fr, n as i64 - 1)
    }
}
