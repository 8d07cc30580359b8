//! Weakly holomorphic forms Δ^{−N}·(Θ or E) feeding relations, and the
//! holomorphic forms Θ_P·E4^a·E6^b used to test them.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::{relation_from_form, DivisorClassExpr, NlpicError};
use crate::arith::{floor, Rational};
use crate::discform::{DiscElement, DiscriminantForm};
use crate::eisenstein::Eisenstein;
use crate::lattice::{Family, IntegerLattice};
use crate::qexp::{delta_inverse_power, e4, e6, multiply, Support, VVQExpansion};
use crate::theta::theta_qexp;

/// Where the principal part of a relation comes from.
#[derive(Debug, Clone)]
pub enum RelationSource {
    /// Θ of a positive-definite lattice Q with q_Q ≅ q_Λ
    Theta(IntegerLattice),
    /// the Eisenstein series of a lattice X with q_X ≅ −q_Λ
    Eisenstein(IntegerLattice),
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Re-indexes f along an isomorphism of discriminant groups (a table indexed
/// by the source's element index).
pub fn transport(
    f: &VVQExpansion<Rational>,
    target: Arc<DiscriminantForm>,
    iso: &[DiscElement],
    support: Support,
) -> Result<VVQExpansion<Rational>, NlpicError> {
    let src = f.disc().clone();
    let mut out = VVQExpansion::zero(
        target,
        f.weight().clone(),
        support,
        f.min_exponent().clone(),
        f.truncation().clone(),
    );
    for (mu, m, c) in f.entries() {
        out.set(m.clone(), &iso[src.index(&mu)], c.clone())?;
    }
    Ok(out)
}

/// rank of the source lattice needed for Δ^{−N}·(source) to have weight
/// 2 − rk(Λ)/2.
fn source_rank(l: &IntegerLattice, n: u32) -> i64 {
    4 - l.rank() as i64 + 24 * n as i64
}

fn weight_check(l: &IntegerLattice, src: &IntegerLattice, n: u32) -> Result<(), NlpicError> {
    let want = source_rank(l, n);
    if src.rank() as i64 != want {
        return Err(NlpicError::WeightMismatch {
            got: Rational::new(BigInt::from(src.rank()), BigInt::from(2)).to_string(),
            want: Rational::new(BigInt::from(want), BigInt::from(2)).to_string(),
        });
    }
    Ok(())
}

fn relation_of(
    disc_l: Arc<DiscriminantForm>,
    form: &VVQExpansion<Rational>,
    iso: &[DiscElement],
    n: u32,
) -> Result<DivisorClassExpr, NlpicError> {
    let w = int(-12 * n as i64);
    let f = multiply(&delta_inverse_power(n, 0), form, &w);
    let f = transport(&f, disc_l.clone(), iso, Support::Plus)?;
    relation_from_form(&disc_l, &f.principal_part())
}

/// The relation from Δ^{−N}·Θ_Q.
pub fn relation_via_theta(l: &IntegerLattice, q: &IntegerLattice, n: u32) -> Result<DivisorClassExpr, NlpicError> {
    if !q.is_positive_definite() {
        return Err(NlpicError::HypothesisNotSatisfied("theta source must be positive definite".into()));
    }
    weight_check(l, q, n)?;
    let disc_l = Arc::new(DiscriminantForm::of(l)?);
    let disc_q = DiscriminantForm::of(q)?;
    let iso = disc_q
        .find_isometry(&disc_l, 1)
        .ok_or_else(|| NlpicError::NoPartner(format!("{:?} is not isometric to {:?}", disc_q, disc_l)))?;
    let theta = theta_qexp(q, &int(n as i64))?;
    relation_of(disc_l, &theta, &iso, n)
}

/// A lattice whose Eisenstein series of weight 2 − rk(Λ)/2 + 12N feeds a
/// relation on Λ.
pub fn eisenstein_partner(l: &IntegerLattice, n: u32) -> Result<IntegerLattice, NlpicError> {
    let r = source_rank(l, n);
    let pad: Vec<IntegerLattice> = (0..3 * (n as usize - 1)).map(|_| IntegerLattice::e(8)).collect();
    let with_pad = |core: Vec<IntegerLattice>| {
        let mut parts = core;
        parts.extend(pad.iter().cloned());
        IntegerLattice::direct_sum(&parts)
    };
    let u = IntegerLattice::u;
    let x = match l.family() {
        Family::Lambda2d { d } => with_pad(vec![u(), u(), u(), IntegerLattice::rank1(2 * *d as i64)?]),
        Family::LambdaCubic => with_pad(vec![u(), u(), IntegerLattice::a(2)]),
        Family::Other => {
            let extra = r - l.rank() as i64;
            if extra < 0 || extra % 2 != 0 {
                return Err(NlpicError::NoPartner(format!(
                    "no Eisenstein partner of rank {r} for a lattice of rank {}",
                    l.rank()
                )));
            }
            let mut parts = vec![l.rescale(-1)];
            parts.extend((0..extra / 2).map(|_| u()));
            IntegerLattice::direct_sum(&parts)
        }
    };
    if x.rank() as i64 != r || r <= 4 {
        return Err(NlpicError::NoPartner(format!("no Eisenstein partner of rank {r}")));
    }
    Ok(x)
}

/// The relation from Δ^{−N}·E_X.
pub fn relation_via_eisenstein(l: &IntegerLattice, x: &IntegerLattice, n: u32) -> Result<DivisorClassExpr, NlpicError> {
    weight_check(l, x, n)?;
    let disc_l = Arc::new(DiscriminantForm::of(l)?);
    let e = Eisenstein::new(x, x.rank() as i64)?;
    let iso = e
        .disc()
        .find_isometry(&disc_l, -1)
        .ok_or_else(|| NlpicError::NoPartner(format!("{:?} is not anti-isometric to {:?}", e.disc(), disc_l)))?;
    let ex = e.qexp(&int(n as i64))?;
    relation_of(disc_l, &ex, &iso, n)
}

/// The relation from Δ^{−N} times the given source.
pub fn relation_from_source(l: &IntegerLattice, src: &RelationSource, n: u32) -> Result<DivisorClassExpr, NlpicError> {
    match src {
        RelationSource::Theta(q) => relation_via_theta(l, q, n),
        RelationSource::Eisenstein(x) => relation_via_eisenstein(l, x, n),
    }
}

/// A holomorphic form of weight rk(Λ)/2 for the dual Weil representation
/// of Λ, with its provenance.
#[derive(Debug, Clone)]
pub struct PairingForm {
    pub label: String,
    pub e4_power: u32,
    pub e6_power: u32,
    pub form: VVQExpansion<Rational>,
}

fn catalog_pieces() -> Vec<IntegerLattice> {
    let mut out = vec![];
    out.extend((1..=8).map(IntegerLattice::a));
    out.extend((4..=8).map(IntegerLattice::d));
    out.push(IntegerLattice::e(6));
    out.push(IntegerLattice::e(7));
    out
}

/// Definite lattices P ⊕ E8^j from a small catalog whose discriminant form is
/// isometric to `target` up to the factor `sign`, with rank accepted by
/// `rank_ok`. Each comes with the isomorphism A_P → target.
pub fn catalog_partners(
    target: &DiscriminantForm,
    sign: i64,
    rank_ok: impl Fn(usize) -> bool + Sync,
) -> Vec<(IntegerLattice, Vec<DiscElement>)> {
    let order = target.order() as i64;
    let mut pieces: Vec<Option<IntegerLattice>> = vec![None];
    pieces.extend(catalog_pieces().into_iter().map(Some));
    if order % 2 == 0 {
        pieces.push(Some(IntegerLattice::rank1(order).expect("even")));
    }
    let mut cands = vec![];
    for j in 0..=2usize {
        for p in &pieces {
            let mut parts: Vec<IntegerLattice> = p.iter().cloned().collect();
            parts.extend((0..j).map(|_| IntegerLattice::e(8)));
            if parts.is_empty() {
                continue;
            }
            let l = IntegerLattice::direct_sum(&parts);
            if rank_ok(l.rank()) && l.determinant() == BigInt::from(order) {
                cands.push(l);
            }
        }
    }
    cands
        .into_par_iter()
        .filter_map(|l| {
            let d = DiscriminantForm::of(&l).ok()?;
            let iso = d.find_isometry(target, sign)?;
            Some((l, iso))
        })
        .collect()
}

/// Scalar weights E4^a·E6^b, b as large as possible.
fn scalar_exponents(w: i64) -> Option<(u32, u32)> {
    if w < 0 || w == 2 || w % 2 != 0 {
        return None;
    }
    (0..=w / 6).rev().find_map(|b| {
        let rest = w - 6 * b;
        (rest % 4 == 0).then_some(((rest / 4) as u32, b as u32))
    })
}

/// Forms Θ_P·E4^a·E6^b of weight rk(Λ)/2 with q_P ≅ −q_Λ, complete up to
/// `truncation`, indexed by A_Λ.
pub fn pairing_forms(l: &IntegerLattice, truncation: &Rational) -> Result<Vec<PairingForm>, NlpicError> {
    let disc_l = Arc::new(DiscriminantForm::of(l)?);
    let two_k = l.rank() as i64;
    let partners = catalog_partners(&disc_l, -1, |r| {
        let w2 = two_k - r as i64;
        w2 >= 0 && w2 % 2 == 0 && scalar_exponents(w2 / 2).is_some()
    });
    let t = floor(truncation);
    let ti: i64 = t.try_into().expect("small truncation");
    let mut out = vec![];
    for (p, iso) in partners {
        let (a, b) = scalar_exponents((two_k - p.rank() as i64) / 2).expect("filtered");
        let theta = theta_qexp(&p, truncation)?;
        let s = e4(ti + 1).pow(a).mul(&e6(ti + 1).pow(b));
        let g = multiply(&s, &theta, &int(4 * a as i64 + 6 * b as i64));
        let g = g.truncate(truncation.clone());
        out.push(PairingForm {
            label: p.provenance().to_string(),
            e4_power: a,
            e6_power: b,
            form: transport(&g, disc_l.clone(), &iso, Support::Minus)?,
        });
    }
    Ok(out)
}

/// Σ c·c_{m,μ}(g) over the H-form of the expression, with λ paired against
/// −c_{0,0}(g). Zero for a valid relation and any holomorphic g.
pub fn pair(e: &DivisorClassExpr, d: &DiscriminantForm, g: &VVQExpansion<Rational>) -> Result<Rational, NlpicError> {
    let h = e.to_h(d)?;
    let mut acc = -(&h.lambda * g.coefficient(&Rational::zero(), &d.zero())?);
    for (s, c) in &h.terms {
        acc += c * g.coefficient(&s.m, &s.mu)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_weights() {
        assert_eq!(scalar_exponents(10), Some((1, 1)));
        assert_eq!(scalar_exponents(6), Some((0, 1)));
        assert_eq!(scalar_exponents(8), Some((2, 0)));
        assert_eq!(scalar_exponents(0), Some((0, 0)));
        assert_eq!(scalar_exponents(2), None);
    }
}
