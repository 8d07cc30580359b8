//! The Hodge class of the moduli of quasi-polarized K3 surfaces of degree 2d
//! as a combination of H_{1,0} and the divisors H_{m_δ, δℓ*}.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::sources::{relation_via_eisenstein, relation_via_theta};
use super::{DivisorClassExpr, HeegnerSymbol, Kind, NlpicError};
use crate::arith::{frac, Rational};
use crate::discform::{DiscElement, DiscriminantForm};
use crate::lattice::{IntegerLattice, LatticeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HodgeMethod {
    Theta,
    Eisenstein,
}

/// C·λ = H_{1,0} + Σ_{δ=1}^{d} a_δ·H_{m_δ,δℓ*} on lambda_2d(d).
#[derive(Debug, Clone, Serialize)]
pub struct HodgeClass {
    pub d: u64,
    pub method: HodgeMethod,
    #[serde(rename = "C", with = "crate::arith::ser::rational")]
    pub c: Rational,
    /// coefficient of H_{m_δ,δℓ*} in the relation
    #[serde(serialize_with = "ser_map")]
    pub a: BTreeMap<u64, Rational>,
    /// the Fourier coefficient c_{1−m_δ,δ}; half of a_δ when δℓ* ≠ −δℓ*
    #[serde(serialize_with = "ser_map")]
    pub per_coset: BTreeMap<u64, Rational>,
    #[serde(serialize_with = "ser_map")]
    pub m: BTreeMap<u64, Rational>,
    /// δ with δ²/4d integral: m_δ = 0 and a_δ belongs to H_{0,δℓ*}, which
    /// is not a divisor and stays out of the relation
    pub degenerate: Vec<u64>,
    pub relation: DivisorClassExpr,
    pub source: String,
}

fn ser_map<S: serde::Serializer>(m: &BTreeMap<u64, Rational>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(&k.to_string(), &v.to_string())?;
    }
    map.end()
}

/// A generator ℓ* of A ≅ Z/2d with q(ℓ*) = −1/(4d).
pub fn lambda_generator(disc: &DiscriminantForm, d: u64) -> Result<DiscElement, NlpicError> {
    let want = frac(&-Rational::new(BigInt::one(), BigInt::from(4 * d)));
    disc.elements()
        .into_iter()
        .find(|e| disc.order_of(e) == 2 * d && disc.q(e).value() == &want)
        .ok_or(NlpicError::NoCompatibleGenerator)
}

/// m_δ = frac(δ²/4d), with m₀ = 1. A zero fractional part is replaced by 1
/// and flagged, which is the index the generating sets use.
pub fn m_delta(d: u64, delta: u64) -> (Rational, bool) {
    if delta == 0 {
        return (Rational::one(), false);
    }
    let m = frac(&Rational::new(BigInt::from(delta * delta), BigInt::from(4 * d)));
    if m.is_zero() {
        (Rational::one(), true)
    } else {
        (m, false)
    }
}

fn read_relation(
    d: u64,
    method: HodgeMethod,
    rel: DivisorClassExpr,
    source: String,
) -> Result<HodgeClass, NlpicError> {
    let l = IntegerLattice::lambda_2d(d);
    let disc = DiscriminantForm::of(&l)?;
    let g = lambda_generator(&disc, d)?;
    let mut a = BTreeMap::new();
    let mut per_coset = BTreeMap::new();
    let mut ms = BTreeMap::new();
    let mut degenerate = vec![];
    for delta in 1..=d {
        let (m, degen) = m_delta(d, delta);
        let mu = disc.scale(&g, delta as i64);
        let orbit = disc.orbit_pm(&mu);
        let (m, c) = if degen {
            // H_{0,δℓ*} is no divisor: its coefficient sits in `dropped`
            let c = orbit
                .iter()
                .filter_map(|e| rel.dropped.get(e))
                .fold(Rational::zero(), |a, b| a + b);
            degenerate.push(delta);
            (Rational::zero(), c)
        } else {
            let sym = HeegnerSymbol::new(&disc, Kind::H, m.clone(), &mu)?;
            (m, rel.coefficient(&sym))
        };
        let size = Rational::from_integer(BigInt::from(orbit.len()));
        per_coset.insert(delta, &c / size);
        a.insert(delta, c);
        ms.insert(delta, m);
    }
    Ok(HodgeClass {
        d,
        method,
        c: -rel.lambda.clone(),
        a,
        per_coset,
        m: ms,
        degenerate,
        relation: rel,
        source,
    })
}

/// The Hodge class through Θ of the orthogonal complement of a primitive
/// norm 2d vector in E8.
pub fn hodge_via_theta(d: u64) -> Result<HodgeClass, NlpicError> {
    if d == 0 {
        return Err(NlpicError::HypothesisNotSatisfied("d must be positive".into()));
    }
    let e8 = IntegerLattice::e(8);
    let v = e8.find_primitive_vector(2 * d as i64).map_err(|e| match e {
        LatticeError::NoVectorFound(_) => NlpicError::NoVectorFound(-2 * d as i64),
        other => other.into(),
    })?;
    let q = e8.orthogonal_complement(&v)?;
    let rel = relation_via_theta(&IntegerLattice::lambda_2d(d), &q, 1)?;
    read_relation(d, HodgeMethod::Theta, rel, format!("theta of E8 ∩ v^⊥, v = {v:?}"))
}

/// The Hodge class through the weight 7/2 Eisenstein series of U³ ⊕ ⟨2d⟩.
pub fn hodge_via_eisenstein(d: u64) -> Result<HodgeClass, NlpicError> {
    if d == 0 {
        return Err(NlpicError::HypothesisNotSatisfied("d must be positive".into()));
    }
    let x = IntegerLattice::hodge_eisenstein(d);
    let rel = relation_via_eisenstein(&IntegerLattice::lambda_2d(d), &x, 1)?;
    read_relation(d, HodgeMethod::Eisenstein, rel, format!("Eisenstein series of U^3 + <{}>", 2 * d))
}
