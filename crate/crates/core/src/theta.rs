//! Vector-valued theta series of definite lattices.
//!
//! For a positive-definite lattice the component μ counts x ∈ μ + L with
//! q(x) = m. For a negative-definite lattice it counts −q(x) = m, so indices
//! are always nonnegative.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::arith::{frac, Rational};
use crate::discform::{DiscElement, DiscError, DiscriminantForm};
use crate::lattice::{IntegerLattice, LatticeError, DEFAULT_BUDGET};
use crate::qexp::{Support, VVQExpansion};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThetaError {
    #[error("lattice is indefinite")]
    IndefiniteLattice,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Disc(#[from] DiscError),
}

fn sign_of(l: &IntegerLattice) -> Result<i64, ThetaError> {
    if l.is_positive_definite() {
        Ok(1)
    } else if l.is_negative_definite() {
        Ok(-1)
    } else {
        Err(ThetaError::IndefiniteLattice)
    }
}

/// The support convention of theta series of `l`.
pub fn support_of(l: &IntegerLattice) -> Result<Support, ThetaError> {
    Ok(if sign_of(l)? > 0 { Support::Plus } else { Support::Minus })
}

/// Lift of μ reduced to coordinates in [0, 1).
fn reduced_lift(d: &DiscriminantForm, mu: &DiscElement) -> Vec<Rational> {
    d.lift(mu).iter().map(frac).collect()
}

/// Counts x ∈ μ + L with |q(x)| = m, for every m ≤ bound at once.
fn coset_counts(
    l: &IntegerLattice,
    d: &DiscriminantForm,
    mu: &DiscElement,
    bound: &Rational,
    budget: f64,
) -> Result<BTreeMap<Rational, BigInt>, ThetaError> {
    let shift = reduced_lift(d, mu);
    let two = Rational::from_integer(BigInt::from(2));
    let mut scale = Rational::zero();
    let mut raw: HashMap<i128, u64> = HashMap::new();
    l.visit_short_vectors_raw(&shift, &(bound * &two), budget, |_, t, s| {
        if scale.is_zero() {
            scale = s.clone();
        }
        *raw.entry(t.abs()).or_insert(0) += 1;
    })?;
    let den = &scale * &two;
    Ok(raw
        .into_iter()
        .map(|(t, c)| (Rational::from_integer(BigInt::from(t)) / &den, BigInt::from(c)))
        .collect())
}

pub fn count_vectors(l: &IntegerLattice, mu: &DiscElement, m: &Rational) -> Result<BigInt, ThetaError> {
    sign_of(l)?;
    let d = DiscriminantForm::of(l)?;
    d.check(mu)?;
    if m.is_negative() {
        return Ok(BigInt::zero());
    }
    Ok(coset_counts(l, &d, mu, m, DEFAULT_BUDGET)?
        .remove(m)
        .unwrap_or_else(BigInt::zero))
}

pub fn theta_qexp(l: &IntegerLattice, truncation: &Rational) -> Result<VVQExpansion<Rational>, ThetaError> {
    theta_qexp_with_budget(l, truncation, DEFAULT_BUDGET)
}

pub fn theta_qexp_with_budget(
    l: &IntegerLattice,
    truncation: &Rational,
    budget: f64,
) -> Result<VVQExpansion<Rational>, ThetaError> {
    let support = support_of(l)?;
    let d = Arc::new(DiscriminantForm::of(l)?);
    let weight = Rational::new(BigInt::from(l.rank()), BigInt::from(2));
    let mut out = VVQExpansion::zero(d.clone(), weight, support, Rational::zero(), truncation.clone());
    let per_coset: Vec<_> = d
        .elements()
        .into_par_iter()
        .map(|mu| coset_counts(l, &d, &mu, truncation, budget).map(|c| (mu, c)))
        .collect::<Result<_, _>>()?;
    for (mu, counts) in per_coset {
        for (m, c) in counts {
            out.set(m, &mu, Rational::from_integer(c))
                .expect("theta exponents lie in the support");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::lattice::IntMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sigma(n: u64, k: u32) -> BigInt {
        (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(k)).sum()
    }

    #[test]
    fn e8_is_240_sigma3() {
        let e8 = IntegerLattice::e(8);
        let th = theta_qexp(&e8, &rat(20, 1)).unwrap();
        let z = th.disc().zero();
        assert_eq!(th.coefficient(&rat(0, 1), &z).unwrap(), rat(1, 1));
        for n in 1..=20u64 {
            assert_eq!(
                th.coefficient(&rat(n as i64, 1), &z).unwrap(),
                Rational::from_integer(sigma(n, 3) * 240),
                "n = {n}"
            );
        }
        let neg = theta_qexp(&e8.rescale(-1), &rat(3, 1)).unwrap();
        assert_eq!(neg.coefficient(&rat(2, 1), &z).unwrap(), rat(2160, 1));
    }

    #[test]
    fn e7_and_e6_counts() {
        let e7 = IntegerLattice::e(7);
        let d7 = DiscriminantForm::of(&e7).unwrap();
        let g = d7.from_index(1);
        assert_eq!(count_vectors(&e7, &d7.zero(), &rat(1, 1)).unwrap(), BigInt::from(126));
        assert_eq!(count_vectors(&e7, &g, &rat(3, 4)).unwrap(), BigInt::from(56));
        let e7m = e7.rescale(-1);
        assert_eq!(count_vectors(&e7m, &g, &rat(3, 4)).unwrap(), BigInt::from(56));

        let e6 = IntegerLattice::e(6);
        let d6 = DiscriminantForm::of(&e6).unwrap();
        assert_eq!(count_vectors(&e6, &d6.zero(), &rat(1, 1)).unwrap(), BigInt::from(72));
        for mu in d6.elements().into_iter().skip(1) {
            assert_eq!(count_vectors(&e6, &mu, &rat(2, 3)).unwrap(), BigInt::from(27));
            assert_eq!(count_vectors(&e6, &mu, &rat(1, 3)).unwrap(), BigInt::from(0));
        }
    }

    #[test]
    fn truncation_zero_is_constant() {
        for l in [IntegerLattice::e(6), IntegerLattice::a(2), IntegerLattice::e(7).rescale(-1)] {
            let th = theta_qexp(&l, &rat(0, 1)).unwrap();
            let entries: Vec<_> = th.entries().collect();
            assert_eq!(entries.len(), 1);
            assert_eq!(entries[0].0, th.disc().zero());
            assert_eq!(entries[0].2, &rat(1, 1));
        }
    }

    #[test]
    fn indefinite_rejected() {
        let u = IntegerLattice::u();
        assert_eq!(
            theta_qexp(&u, &rat(1, 1)).unwrap_err(),
            ThetaError::IndefiniteLattice
        );
    }

    #[test]
    fn inversion_symmetry() {
        for l in [IntegerLattice::a(2), IntegerLattice::a(4), IntegerLattice::d(5), IntegerLattice::e(6)] {
            let th = theta_qexp(&l, &rat(4, 1)).unwrap();
            let d = th.disc();
            for (mu, m, c) in th.entries() {
                assert_eq!(&th.coefficient(m, &d.negate(&mu)).unwrap(), c);
            }
        }
    }

    fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
        let mut a = IntMatrix::identity(n);
        for _ in 0..3 * n {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            let c: i64 = rng.gen_range(-2..=2);
            // column operation col_i += c·col_j
            for r in 0..n {
                let v = &a[(r, j)] * c;
                a[(r, i)] += v;
            }
        }
        if rng.gen_bool(0.5) {
            for r in 0..n {
                a[(r, 0)] = -a[(r, 0)].clone();
            }
        }
        a
    }

    #[test]
    fn basis_change_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let catalog = [
            IntegerLattice::a(2),
            IntegerLattice::e(6),
            IntegerLattice::e(7),
            IntegerLattice::d(4),
            IntegerLattice::e(7).rescale(-1),
        ];
        for l in catalog {
            let base = theta_qexp(&l, &rat(2, 1)).unwrap();
            // the multiset of coefficient vectors over cosets is a basis-free
            // invariant; the coset labels move with the basis
            let mut want: Vec<Vec<(Rational, Rational)>> = base
                .disc()
                .elements()
                .iter()
                .map(|mu| {
                    base.entries()
                        .filter(|(e, _, _)| e == mu)
                        .map(|(_, m, c)| (m.clone(), c.clone()))
                        .collect()
                })
                .collect();
            want.sort();
            for _ in 0..10 {
                let a = random_unimodular(l.rank(), &mut rng);
                let l2 = l.change_basis(&a);
                let th = theta_qexp(&l2, &rat(2, 1)).unwrap();
                let mut got: Vec<Vec<(Rational, Rational)>> = th
                    .disc()
                    .elements()
                    .iter()
                    .map(|mu| {
                        th.entries()
                            .filter(|(e, _, _)| e == mu)
                            .map(|(_, m, c)| (m.clone(), c.clone()))
                            .collect()
                    })
                    .collect();
                got.sort();
                assert_eq!(got, want);
                // and the coset of a transported vector keeps its counts
                let d1 = base.disc();
                let d2 = th.disc();
                let ainv = a.inverse_rational().unwrap();
                for mu in d1.elements() {
                    let x = d1.lift(&mu);
                    let y: Vec<Rational> = (0..x.len())
                        .map(|r| (0..x.len()).fold(Rational::zero(), |s, c| s + &ainv[r][c] * &x[c]))
                        .collect();
                    let nu = d2.element_of(&y).unwrap();
                    for m in [rat(0, 1), rat(1, 3), rat(2, 3), rat(3, 4), rat(1, 1), rat(7, 4), rat(2, 1)] {
                        assert_eq!(
                            base.coefficient(&m, &mu).unwrap(),
                            th.coefficient(&m, &nu).unwrap()
                        );
                    }
                }
            }
        }
    }

    /// Σ over cosets at m equals the count of dual-lattice points with
    /// q(x) = m, enumerated directly in the dual Gram matrix.
    #[test]
    fn cosets_partition_the_dual() {
        for l in [IntegerLattice::a(2), IntegerLattice::a(3), IntegerLattice::e(7)] {
            let th = theta_qexp(&l, &rat(3, 1)).unwrap();
            let inv = l.gram_inverse().unwrap();
            // G^{-1} scaled to an integral Gram matrix of the dual
            let mut den = BigInt::from(2);
            for x in inv.iter().flatten() {
                den = num_integer::Integer::lcm(&den, &(x.denom() * 2));
            }
            let rows: Vec<Vec<BigInt>> = inv
                .iter()
                .map(|r| r.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect())
                .collect();
            let dual = IntegerLattice::from_gram(IntMatrix::from_rows(&rows)).unwrap();
            let mut totals: BTreeMap<Rational, BigInt> = BTreeMap::new();
            let zero = vec![Rational::zero(); l.rank()];
            let bound = rat(6, 1) * Rational::from_integer(den.clone());
            dual.visit_short_vectors(&zero, &bound, 1e8, |_, n| {
                let m = n / Rational::from_integer(den.clone()) / rat(2, 1);
                *totals.entry(m).or_insert_with(BigInt::zero) += 1;
            })
            .unwrap();
            let mut sums: BTreeMap<Rational, BigInt> = BTreeMap::new();
            for (_, m, c) in th.entries() {
                *sums.entry(m.clone()).or_insert_with(BigInt::zero) += c.to_integer();
            }
            assert_eq!(sums, totals);
        }
    }
}
