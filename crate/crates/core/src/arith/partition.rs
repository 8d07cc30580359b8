use num_bigint::BigInt;
use num_traits::{One, Zero};

/// p(0), …, p(n) by Euler's pentagonal recurrence.
pub fn partitions_up_to(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::one();
    for m in 1..=n {
        let mut acc = BigInt::zero();
        let mut k = 1usize;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let mut term = p[m - g1].clone();
            if g2 <= m {
                term += &p[m - g2];
            }
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
            k += 1;
        }
        p[m] = acc;
    }
    p
}

pub fn partition(n: usize) -> BigInt {
    partitions_up_to(n).pop().unwrap()
}

/// Coefficients of ∏(1−q^j)^{−M} up to q^n, i.e. P_M(0..=n).
///
/// Uses the power rule for series with constant term 1:
/// n·g_n = Σ_{k=1}^{n} ((M+1)k − n)·f_k·g_{n−k} with f the partition series.
pub fn partition_power_series(m: u64, n: usize) -> Vec<BigInt> {
    assert!(m >= 1, "partition_power needs M >= 1");
    let f = partitions_up_to(n);
    let mut g = vec![BigInt::zero(); n + 1];
    g[0] = BigInt::one();
    let mm = BigInt::from(m) + 1;
    for i in 1..=n {
        let mut acc = BigInt::zero();
        for k in 1..=i {
            let w = &mm * BigInt::from(k) - BigInt::from(i);
            acc += w * &f[k] * &g[i - k];
        }
        g[i] = acc / BigInt::from(i);
    }
    g
}

pub fn partition_power(m: u64, n: usize) -> BigInt {
    partition_power_series(m, n).pop().unwrap()
}
