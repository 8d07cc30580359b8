//! Small-prime utilities: sieving, trial factorisation, valuations and
//! quadratic characters.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as u64))
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Factorisation of |n| by trial division; `n` must be nonzero.
pub fn factor(n: &BigInt) -> Vec<(u64, u32)> {
    assert!(!n.is_zero(), "factor(0)");
    let mut m = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    loop {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        out.push((m.to_u64().expect("cofactor exceeds u64"), 1));
    }
    out
}

pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut e = 0;
    while (&m % &pb).is_zero() {
        m /= &pb;
        e += 1;
    }
    e
}

/// p-adic valuation of a nonzero rational.
pub fn valuation_rat(r: &Rational, p: u64) -> i64 {
    valuation(r.numer(), p) as i64 - valuation(r.denom(), p) as i64
}

pub fn mobius(n: u64) -> i64 {
    let mut sign = 1;
    for (_, e) in factor(&BigInt::from(n)) {
        if e > 1 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: &BigInt, n: u64) -> i32 {
    assert!(n % 2 == 1, "jacobi needs odd modulus");
    let mut a = a.mod_floor(&BigInt::from(n)).to_u64().unwrap();
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (a/n) for positive n.
pub fn kronecker(a: &BigInt, n: u64) -> i32 {
    assert!(n > 0);
    let mut n = n;
    let mut t = 1;
    while n % 2 == 0 {
        n /= 2;
        if a.is_even() {
            return 0;
        }
        let r = a.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        if r == 3 || r == 5 {
            t = -t;
        }
    }
    if n == 1 {
        t
    } else {
        t * jacobi(a, n)
    }
}

/// Signed squarefree kernel of a nonzero rational: the squarefree integer t
/// with r = t·s² for some rational s.
pub fn squarefree_kernel(r: &Rational) -> BigInt {
    let prod = r.numer() * r.denom();
    let mut t = BigInt::one();
    for (p, e) in factor(&prod) {
        if e % 2 == 1 {
            t *= p;
        }
    }
    if prod.sign() == Sign::Minus {
        -t
    } else {
        t
    }
}

/// Fundamental discriminant of Q(√r).
pub fn fundamental_discriminant(r: &Rational) -> BigInt {
    let t = squarefree_kernel(r);
    if t.mod_floor(&BigInt::from(4)) == BigInt::one() {
        t
    } else {
        t * 4
    }
}

/// Legendre symbol of a p-integral rational modulo an odd prime.
pub fn legendre_rat(r: &Rational, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let inv = r
        .denom()
        .modpow(&(BigInt::from(p) - 2), &pb);
    jacobi(&((r.numer() * inv).mod_floor(&pb)), p)
}
