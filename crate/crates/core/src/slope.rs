//! Slope bounds for the moduli of cubic fourfolds and of quasi-polarized K3
//! surfaces of degree 2.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::Rational;
use crate::discform::{DiscElement, DiscriminantForm};
use crate::eisenstein::Eisenstein;
use crate::lattice::IntegerLattice;
use crate::nlpic::{lambda_generator, relation_via_theta, DivisorClassExpr, HeegnerSymbol, Kind, NlpicError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryTag {
    C2,
    D11,
}

/// The class αλ − β·B with B the boundary divisor named by the tag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeExpr {
    #[serde(with = "crate::arith::ser::rational")]
    pub alpha: Rational,
    #[serde(with = "crate::arith::ser::rational")]
    pub beta: Rational,
    pub boundary_tag: BoundaryTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slope {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(r) => write!(f, "{r}"),
            Slope::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        Some(match (self, o) {
            (Slope::Finite(a), Slope::Finite(b)) => a.cmp(b),
            (Slope::Finite(_), Slope::Infinite) => Less,
            (Slope::Infinite, Slope::Finite(_)) => Greater,
            (Slope::Infinite, Slope::Infinite) => Equal,
        })
    }
}

/// α/β when both are positive, ∞ otherwise.
pub fn slope(e: &SlopeExpr) -> Slope {
    if e.alpha.is_positive() && e.beta.is_positive() {
        Slope::Finite(&e.alpha / &e.beta)
    } else {
        Slope::Infinite
    }
}

/// Reads `effective` = αλ − β·`boundary` off a relation involving only λ
/// and these two symbols.
pub fn slope_expr_from_relation(
    rel: &DivisorClassExpr,
    effective: &HeegnerSymbol,
    boundary: &HeegnerSymbol,
    tag: BoundaryTag,
) -> Result<SlopeExpr, NlpicError> {
    let stray: Vec<String> = rel
        .terms
        .keys()
        .filter(|s| *s != effective && *s != boundary)
        .map(|s| s.to_string())
        .collect();
    let ce = rel.coefficient(effective);
    if !stray.is_empty() || ce.is_zero() {
        return Err(NlpicError::HypothesisNotSatisfied(format!(
            "relation {rel} does not express {effective} through λ and {boundary}"
        )));
    }
    Ok(SlopeExpr {
        alpha: -&rel.lambda / &ce,
        beta: rel.coefficient(boundary) / &ce,
        boundary_tag: tag,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeBounds {
    #[serde(with = "crate::arith::ser::rational")]
    pub lower: Rational,
    #[serde(with = "crate::arith::ser::rational")]
    pub upper: Rational,
    /// the Eisenstein coefficient whose negative is the lower bound
    #[serde(with = "crate::arith::ser::rational")]
    pub eisenstein_coefficient: Rational,
    pub eisenstein_lattice: String,
    pub eisenstein_index: String,
    pub relation: String,
    pub expr: SlopeExpr,
}

fn upper_of(e: &SlopeExpr) -> Result<Rational, NlpicError> {
    match slope(e) {
        Slope::Finite(r) => Ok(r),
        Slope::Infinite => Err(NlpicError::HypothesisNotSatisfied(format!("{e:?} has no finite slope"))),
    }
}

fn lower_of(
    lattice: &IntegerLattice,
    two_k: i64,
    m: &Rational,
    mu: &DiscElement,
) -> Result<(Rational, String), NlpicError> {
    let e = Eisenstein::new(lattice, two_k)?;
    let c = e.coefficient(m, mu)?;
    Ok((c, format!("({m}, {mu})")))
}

/// 523777/206215591 ≤ s(M) ≤ 16/9 for cubic fourfolds: the lower bound is
/// −c_{1/3,2ℓ*} of the weight 21/2 Eisenstein series of lambda_2d(3), the
/// upper bound the slope of C₆ from the relation through Θ_{E6}.
pub fn cubic_slope_bounds() -> Result<SlopeBounds, NlpicError> {
    let l6 = IntegerLattice::lambda_2d(3);
    let d6 = DiscriminantForm::of(&l6)?;
    let mu = d6.scale(&lambda_generator(&d6, 3)?, 2);
    let m = Rational::new(BigInt::from(1), BigInt::from(3));
    let (c, index) = lower_of(&l6, 21, &m, &mu)?;

    let lc = IntegerLattice::lambda_cubic();
    let dc = DiscriminantForm::of(&lc)?;
    let rel = relation_via_theta(&lc, &IntegerLattice::e(6), 1)?;
    let gen = dc.elements().into_iter().find(|e| *e != dc.zero()).expect("A ≅ Z/3");
    let c6 = HeegnerSymbol::new(&dc, Kind::H, Rational::from_integer(BigInt::from(1)), &dc.zero())?;
    let c2 = HeegnerSymbol::new(&dc, Kind::H, m, &gen)?;
    let expr = slope_expr_from_relation(&rel, &c6, &c2, BoundaryTag::C2)?;
    Ok(SlopeBounds {
        lower: -c.clone(),
        upper: upper_of(&expr)?,
        eisenstein_coefficient: c,
        eisenstein_lattice: "lambda_2d(3)".into(),
        eisenstein_index: index,
        relation: rel.to_string(),
        expr,
    })
}

/// s(P_{1,0}) on F₂ as stated, checked against the recomputed value.
pub const K3_DEGREE2_UPPER: (i64, i64) = (150, 57);

/// 1/1984 ≤ s(F₂) ≤ 150/57: the lower bound is −c_{1/4,ℓ*} of the weight 10
/// Eisenstein series of U ⊕ ⟨2⟩ ⊕ E8(−1)² ⊕ ⟨−2⟩, the upper bound the slope
/// of P_{1,0} from the relation through Θ_{E7} rewritten in P-form.
pub fn k3deg2_slope_bounds() -> Result<SlopeBounds, NlpicError> {
    let le = IntegerLattice::k3_degree2_eisenstein();
    let de = DiscriminantForm::of(&le)?;
    let m = Rational::new(BigInt::from(1), BigInt::from(4));
    let want_q = Rational::new(BigInt::from(3), BigInt::from(4));
    let ell = de
        .elements()
        .into_iter()
        .find(|e| de.q(e).value() == &want_q)
        .ok_or(NlpicError::NoCompatibleGenerator)?;
    let (c, index) = lower_of(&le, 20, &m, &ell)?;

    let l2 = IntegerLattice::lambda_2d(1);
    let d2 = DiscriminantForm::of(&l2)?;
    let rel = relation_via_theta(&l2, &IntegerLattice::e(7), 1)?.to_p(&d2)?;
    let star = lambda_generator(&d2, 1)?;
    let p10 = HeegnerSymbol::new(&d2, Kind::P, Rational::from_integer(BigInt::from(1)), &d2.zero())?;
    let d11 = HeegnerSymbol::new(&d2, Kind::P, m, &star)?;
    let expr = slope_expr_from_relation(&rel, &p10, &d11, BoundaryTag::D11)?;
    let upper = upper_of(&expr)?;
    let stated = Rational::new(BigInt::from(K3_DEGREE2_UPPER.0), BigInt::from(K3_DEGREE2_UPPER.1));
    if upper != stated {
        return Err(NlpicError::HypothesisNotSatisfied(format!(
            "recomputed upper bound {upper} differs from {stated}"
        )));
    }
    Ok(SlopeBounds {
        lower: -c.clone(),
        upper,
        eisenstein_coefficient: c,
        eisenstein_lattice: "k3_degree2_eisenstein".into(),
        eisenstein_index: index,
        relation: rel.to_string(),
        expr,
    })
}
