//! Discriminant groups Λ^∨/Λ with their finite quadratic forms.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{frac, Cyclotomic, CyclotomicField, QmodZ, Rational};
use crate::lattice::{smith_normal_form, IntMatrix, IntegerLattice, LatticeError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiscError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("Gauss sum has absolute value² {got}, expected {want}")]
    GaussSumMismatch { got: String, want: String },
    #[error("element {0:?} does not match the invariant factors")]
    BadElement(Vec<u64>),
    #[error("vector is not in the dual lattice")]
    NotDual,
}

/// Coordinates of an element of A = ⊕ Z/d_i.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscElement(pub Vec<u64>);

impl fmt::Debug for DiscElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for DiscElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

#[derive(Clone)]
pub struct DiscriminantForm {
    invariants: Vec<u64>,
    generators: Vec<Vec<Rational>>,
    /// ⟨g_i, g_j⟩ as exact rationals
    gen_gram: Vec<Vec<Rational>>,
    /// rows of U with U·G·V = SNF, restricted to the nontrivial factors
    coord_rows: Vec<Vec<BigInt>>,
    gram: IntMatrix,
    level: u64,
    field: Arc<CyclotomicField>,
}

impl fmt::Debug for DiscriminantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiscriminantForm{:?}", self.invariants)
    }
}

impl PartialEq for DiscriminantForm {
    fn eq(&self, o: &Self) -> bool {
        self.invariants == o.invariants && self.gen_gram == o.gen_gram && self.gram == o.gram
    }
}

impl DiscriminantForm {
    pub fn of(l: &IntegerLattice) -> Result<Self, DiscError> {
        let g = l.gram().clone();
        if g.determinant().is_zero() {
            return Err(LatticeError::DegenerateLattice.into());
        }
        let (d, u, _v) = smith_normal_form(&g);
        let inv = l.gram_inverse()?;
        let n = g.rows();
        let mut invariants = Vec::new();
        let mut generators = Vec::new();
        let mut coord_rows = Vec::new();
        // U^{-1} columns give the generators: x_i = G^{-1} U^{-1} e_i
        let uinv = u.inverse_rational().expect("unimodular");
        for (i, di) in d.iter().enumerate() {
            let di = di.abs();
            if di.is_one() {
                continue;
            }
            let col: Vec<Rational> = (0..n).map(|r| uinv[r][i].clone()).collect();
            let x: Vec<Rational> = (0..n)
                .map(|r| (0..n).fold(Rational::zero(), |acc, c| acc + &inv[r][c] * &col[c]))
                .collect();
            invariants.push(di.to_u64().expect("invariant factor fits u64"));
            generators.push(x);
            coord_rows.push(u.row(i).to_vec());
        }
        let gen_gram = generators
            .iter()
            .map(|a| generators.iter().map(|b| g.bilinear(a, b)).collect())
            .collect();
        let level = l.level()?.to_u64().expect("level fits u64");
        let m = level.lcm(&8);
        Ok(DiscriminantForm {
            invariants,
            generators,
            gen_gram,
            coord_rows,
            gram: g,
            level,
            field: CyclotomicField::new(m),
        })
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Q(ζ_M) with M = lcm(8, level).
    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn generators(&self) -> &[Vec<Rational>] {
        &self.generators
    }

    pub fn lattice_gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn zero(&self) -> DiscElement {
        DiscElement(vec![0; self.invariants.len()])
    }

    pub fn is_valid(&self, mu: &DiscElement) -> bool {
        mu.0.len() == self.invariants.len() && mu.0.iter().zip(&self.invariants).all(|(a, d)| a < d)
    }

    pub fn check(&self, mu: &DiscElement) -> Result<(), DiscError> {
        if self.is_valid(mu) {
            Ok(())
        } else {
            Err(DiscError::BadElement(mu.0.clone()))
        }
    }

    pub fn add(&self, a: &DiscElement, b: &DiscElement) -> DiscElement {
        DiscElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.invariants)
                .map(|((x, y), d)| (x + y) % d)
                .collect(),
        )
    }

    pub fn negate(&self, a: &DiscElement) -> DiscElement {
        DiscElement(
            a.0.iter()
                .zip(&self.invariants)
                .map(|(x, d)| (d - x) % d)
                .collect(),
        )
    }

    pub fn scale(&self, a: &DiscElement, s: i64) -> DiscElement {
        DiscElement(
            a.0.iter()
                .zip(&self.invariants)
                .map(|(x, d)| ((*x as i128 * s as i128).rem_euclid(*d as i128)) as u64)
                .collect(),
        )
    }

    pub fn order_of(&self, a: &DiscElement) -> u64 {
        a.0.iter()
            .zip(&self.invariants)
            .fold(1u64, |acc, (x, d)| acc.lcm(&(d / d.gcd(x))))
    }

    /// Mixed-radix index in 0..order.
    pub fn index(&self, a: &DiscElement) -> usize {
        a.0.iter()
            .zip(&self.invariants)
            .fold(0usize, |acc, (x, d)| acc * *d as usize + *x as usize)
    }

    pub fn from_index(&self, mut i: usize) -> DiscElement {
        let mut v = vec![0u64; self.invariants.len()];
        for (k, d) in self.invariants.iter().enumerate().rev() {
            v[k] = (i % *d as usize) as u64;
            i /= *d as usize;
        }
        DiscElement(v)
    }

    pub fn elements(&self) -> Vec<DiscElement> {
        (0..self.order() as usize).map(|i| self.from_index(i)).collect()
    }

    /// The dual vector Σ a_i g_i representing μ.
    pub fn lift(&self, a: &DiscElement) -> Vec<Rational> {
        let n = self.gram.rows();
        let mut x = vec![Rational::zero(); n];
        for (ai, g) in a.0.iter().zip(&self.generators) {
            if *ai == 0 {
                continue;
            }
            let c = Rational::from_integer(BigInt::from(*ai));
            for (xr, gr) in x.iter_mut().zip(g) {
                *xr += gr * &c;
            }
        }
        x
    }

    /// The class of a dual vector.
    pub fn element_of(&self, x: &[Rational]) -> Result<DiscElement, DiscError> {
        let gx = self.gram.mul_rat_vec(x);
        if gx.iter().any(|v| !v.is_integer()) {
            return Err(DiscError::NotDual);
        }
        let gx: Vec<BigInt> = gx.into_iter().map(|v| v.to_integer()).collect();
        Ok(DiscElement(
            self.coord_rows
                .iter()
                .zip(&self.invariants)
                .map(|(row, d)| {
                    let s: BigInt = row.iter().zip(&gx).map(|(a, b)| a * b).sum();
                    s.mod_floor(&BigInt::from(*d)).to_u64().unwrap()
                })
                .collect(),
        ))
    }

    /// ⟨μ, μ⟩ as an exact rational for the canonical lift.
    fn lift_norm(&self, a: &DiscElement) -> Rational {
        self.lift_pair(a, a)
    }

    fn lift_pair(&self, a: &DiscElement, b: &DiscElement) -> Rational {
        let mut s = Rational::zero();
        for (i, x) in a.0.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                if *y == 0 {
                    continue;
                }
                s += &self.gen_gram[i][j] * Rational::from_integer(BigInt::from(x * y));
            }
        }
        s
    }

    /// Half-norm q(μ) = ⟨μ,μ⟩/2 mod 1.
    pub fn q(&self, a: &DiscElement) -> QmodZ {
        QmodZ::new(self.lift_norm(a) / Rational::from_integer(BigInt::from(2)))
    }

    /// Norm ⟨μ,μ⟩ mod 2, in [0, 2).
    pub fn norm_mod2(&self, a: &DiscElement) -> Rational {
        let two = Rational::from_integer(BigInt::from(2));
        let n = self.lift_norm(a) / &two;
        frac(&n) * two
    }

    /// (μ, ν) mod 1.
    pub fn bilinear(&self, a: &DiscElement, b: &DiscElement) -> QmodZ {
        QmodZ::new(self.lift_pair(a, b))
    }

    pub fn isotropic_elements(&self) -> Vec<DiscElement> {
        self.elements().into_iter().filter(|e| self.q(e).is_zero()).collect()
    }

    pub fn orbit_pm(&self, a: &DiscElement) -> Vec<DiscElement> {
        let n = self.negate(a);
        if &n == a {
            vec![a.clone()]
        } else {
            vec![a.clone(), n]
        }
    }

    /// Canonical representative of {μ, −μ}: the smaller of the two.
    pub fn canonical_pm(&self, a: &DiscElement) -> DiscElement {
        let n = self.negate(a);
        if n < *a {
            n
        } else {
            a.clone()
        }
    }

    /// Exponent k with e(q(μ)) = ζ_M^k.
    pub fn q_exponent(&self, a: &DiscElement) -> i64 {
        let m = Rational::from_integer(BigInt::from(self.field.conductor()));
        let v = self.q(a).value() * m;
        debug_assert!(v.is_integer());
        v.to_integer().to_i64().unwrap()
    }

    /// Exponent k with e((μ,ν)) = ζ_M^k.
    pub fn bilinear_exponent(&self, a: &DiscElement, b: &DiscElement) -> i64 {
        let m = Rational::from_integer(BigInt::from(self.field.conductor()));
        let v = self.bilinear(a, b).value() * m;
        debug_assert!(v.is_integer());
        v.to_integer().to_i64().unwrap()
    }

    pub fn gauss_sum(&self) -> Cyclotomic<Rational> {
        self.elements().iter().fold(Cyclotomic::zero(&self.field), |acc, e| {
            acc.add(&Cyclotomic::zeta_pow(&self.field, self.q_exponent(e)))
        })
    }

    /// s mod 8 with Σ e(q(μ)) = √|A|·e(s/8), together with √|A| ∈ Q(ζ_M).
    pub fn milgram(&self) -> Result<(u8, Cyclotomic<Rational>), DiscError> {
        let g = self.gauss_sum();
        let order = Rational::from_integer(BigInt::from(self.order()));
        let abs2 = g.mul(&g.conj());
        if abs2.as_scalar() != Some(&order) || !abs2.coefficients().iter().skip(1).all(|c| c.is_zero()) {
            return Err(DiscError::GaussSumMismatch {
                got: format!("{:?}", abs2.to_complex()),
                want: order.to_string(),
            });
        }
        let m = self.field.conductor() as i64;
        for s in 0..8i64 {
            let r = g.mul(&Cyclotomic::zeta_pow(&self.field, -s * m / 8));
            let sq = r.mul(&r);
            if sq.as_scalar() == Some(&order) && r.to_complex().re > 0.0 {
                return Ok((s as u8, r));
            }
        }
        Err(DiscError::GaussSumMismatch {
            got: format!("{:?}", g.to_complex()),
            want: "an eighth root of unity times √|A|".into(),
        })
    }

    pub fn milgram_signature(&self) -> Result<u8, DiscError> {
        self.milgram().map(|p| p.0)
    }

    /// An isomorphism φ: self → other with q_other(φ(x)) = sign·q_self(x), as
    /// a table indexed by `self.index`.
    pub fn find_isometry(&self, other: &DiscriminantForm, sign: i64) -> Option<Vec<DiscElement>> {
        if self.order() != other.order() {
            return None;
        }
        let s = Rational::from_integer(BigInt::from(sign));
        let targets = other.elements();
        let k = self.invariants.len();
        let gens: Vec<DiscElement> = (0..k)
            .map(|i| {
                let mut v = vec![0; k];
                v[i] = 1;
                DiscElement(v)
            })
            .collect();
        let mut images: Vec<DiscElement> = Vec::new();

        fn extend(
            src: &DiscriminantForm,
            dst: &DiscriminantForm,
            gens: &[DiscElement],
            targets: &[DiscElement],
            s: &Rational,
            images: &mut Vec<DiscElement>,
        ) -> bool {
            let i = images.len();
            if i == gens.len() {
                // bijectivity: the image of the full group must be everything
                let mut seen = std::collections::HashSet::new();
                for e in src.elements() {
                    let mut acc = dst.zero();
                    for (c, img) in e.0.iter().zip(images.iter()) {
                        acc = dst.add(&acc, &dst.scale(img, *c as i64));
                    }
                    seen.insert(acc);
                }
                return seen.len() as u64 == dst.order();
            }
            let d = src.invariants[i];
            for t in targets {
                if dst.scale(t, d as i64) != dst.zero() {
                    continue;
                }
                if dst.q(t) != QmodZ::new(src.q(&gens[i]).value() * s) {
                    continue;
                }
                let ok = (0..i).all(|j| {
                    dst.bilinear(t, &images[j]) == QmodZ::new(src.bilinear(&gens[i], &gens[j]).value() * s)
                });
                if !ok {
                    continue;
                }
                images.push(t.clone());
                if extend(src, dst, gens, targets, s, images) {
                    return true;
                }
                images.pop();
            }
            false
        }

        if !extend(self, other, &gens, &targets, &s, &mut images) {
            return None;
        }
        Some(
            self.elements()
                .iter()
                .map(|e| {
                    let mut acc = other.zero();
                    for (c, img) in e.0.iter().zip(&images) {
                        acc = other.add(&acc, &other.scale(img, *c as i64));
                    }
                    acc
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn catalog() -> Vec<IntegerLattice> {
        let mut v = vec![
            IntegerLattice::u(),
            IntegerLattice::a(2),
            IntegerLattice::e(6),
            IntegerLattice::e(7),
            IntegerLattice::e(8),
            IntegerLattice::d(4),
            IntegerLattice::d(5),
            IntegerLattice::a(5),
            IntegerLattice::lambda_cubic(),
            IntegerLattice::k3_degree2_eisenstein(),
        ];
        for l in v.clone() {
            v.push(l.rescale(-1));
        }
        for d in 1..=12 {
            v.push(IntegerLattice::lambda_2d(d));
        }
        v
    }

    #[test]
    fn e8_is_trivial() {
        let d = DiscriminantForm::of(&IntegerLattice::e(8)).unwrap();
        assert_eq!(d.order(), 1);
        assert_eq!(d.milgram_signature().unwrap(), 0);
        assert_eq!(d.negate(&d.zero()), d.zero());
    }

    #[test]
    fn lambda_2d_is_cyclic() {
        for dd in 1..=6u64 {
            let l = IntegerLattice::lambda_2d(dd);
            let d = DiscriminantForm::of(&l).unwrap();
            assert_eq!(d.invariants(), &[2 * dd]);
            let mut ell = vec![Rational::zero(); 21];
            ell[20] = rat(1, 2 * dd as i64);
            let e = d.element_of(&ell).unwrap();
            assert_eq!(d.order_of(&e), 2 * dd);
            assert_eq!(d.q(&e), QmodZ::new(rat(-1, 4 * dd as i64)));
        }
        let d1 = DiscriminantForm::of(&IntegerLattice::lambda_2d(1)).unwrap();
        assert_eq!(d1.isotropic_elements(), vec![d1.zero()]);
        let d4 = DiscriminantForm::of(&IntegerLattice::lambda_2d(4)).unwrap();
        let mut ell = vec![Rational::zero(); 21];
        ell[20] = rat(1, 8);
        let e = d4.element_of(&ell).unwrap();
        let four = d4.scale(&e, 4);
        assert!(d4.q(&four).is_zero());
        assert_eq!(d4.isotropic_elements(), vec![d4.zero(), four]);
    }

    #[test]
    fn cubic_discriminant() {
        let d = DiscriminantForm::of(&IntegerLattice::lambda_cubic()).unwrap();
        assert_eq!(d.invariants(), &[3]);
        for e in d.elements().into_iter().skip(1) {
            assert_eq!(d.q(&e), QmodZ::new(rat(2, 3)));
        }
        let a2m = DiscriminantForm::of(&IntegerLattice::a(2).rescale(-1)).unwrap();
        assert_eq!(a2m.milgram_signature().unwrap(), 6);
        let l6 = DiscriminantForm::of(&IntegerLattice::lambda_2d(3)).unwrap();
        assert_eq!(l6.milgram_signature().unwrap(), 7);
    }

    #[test]
    fn milgram_matches_signature_on_catalog() {
        for l in catalog() {
            let d = DiscriminantForm::of(&l).unwrap();
            let sig = l.signature().unwrap();
            assert_eq!(d.order() as i64, l.determinant().abs().to_i64().unwrap());
            assert_eq!(
                d.milgram_signature().unwrap() as i64,
                sig.index().rem_euclid(8),
                "{l:?}"
            );
        }
    }

    #[test]
    fn quadratic_form_axioms() {
        for l in catalog() {
            let d = DiscriminantForm::of(&l).unwrap();
            let els = d.elements();
            for a in &els {
                assert_eq!(d.q(a), d.q(&d.negate(a)));
                for s in -3..4 {
                    assert_eq!(d.q(&d.scale(a, s)), QmodZ::new(d.q(a).value() * rat(s * s, 1)));
                }
                for b in &els {
                    let lhs = &(&d.q(&d.add(a, b)) - &d.q(a)) - &d.q(b);
                    assert_eq!(lhs, d.bilinear(a, b));
                }
                assert_eq!(d.element_of(&d.lift(a)).unwrap(), *a);
                let two_q = QmodZ::new(d.norm_mod2(a) / rat(2, 1));
                assert_eq!(two_q, d.q(a));
            }
        }
    }

    #[test]
    fn rescale_negates_half_norms() {
        for l in [IntegerLattice::e(6), IntegerLattice::e(7), IntegerLattice::a(5)] {
            let d = DiscriminantForm::of(&l).unwrap();
            let m = DiscriminantForm::of(&l.rescale(-1)).unwrap();
            // same Gram up to sign, so the same coordinates and generators
            for e in d.elements() {
                assert_eq!(m.q(&e), -&d.q(&e));
            }
        }
    }

    #[test]
    fn isometry_search() {
        // (A_{E7}, q) ≅ (A_{Λ_2}, q), both with q = 3/4
        let e7 = DiscriminantForm::of(&IntegerLattice::e(7)).unwrap();
        let l2 = DiscriminantForm::of(&IntegerLattice::lambda_2d(1)).unwrap();
        assert!(e7.find_isometry(&l2, 1).is_some());
        assert!(e7.find_isometry(&l2, -1).is_none());
        let e6 = DiscriminantForm::of(&IntegerLattice::e(6)).unwrap();
        let lc = DiscriminantForm::of(&IntegerLattice::lambda_cubic()).unwrap();
        let phi = e6.find_isometry(&lc, 1).unwrap();
        for e in e6.elements() {
            assert_eq!(lc.q(&phi[e6.index(&e)]), e6.q(&e));
        }
    }
}
