//! Heegner divisors, primitive Heegner divisors and relations between them
//! in the Picard group of an orthogonal modular variety.
//!
//! Conventions: a symbol H_{m,μ} (m > 0) is the divisor of vectors x ∈ μ + Λ
//! with q(x) = −m, so m ≡ −q(μ) mod 1. H_{m,μ} = H_{m,−μ}, and every symbol
//! is stored with the smaller of μ, −μ. The slot H_{0,0} is −λ.

mod generators;
mod hodge;
mod sources;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::primes::mobius;
use crate::arith::{frac, parse_rational, Rational};
use crate::discform::{DiscElement, DiscError, DiscriminantForm};
use crate::eisenstein::EisensteinError;
use crate::lattice::LatticeError;
use crate::qexp::QExpError;
use crate::theta::ThetaError;

pub use generators::{
    generating_set, verify_primitive_representatives, Flavor, GeneratingSet, NlGenerator,
};
pub use hodge::{hodge_via_eisenstein, hodge_via_theta, lambda_generator, HodgeClass, HodgeMethod};
pub use sources::{
    catalog_partners, eisenstein_partner, pair, pairing_forms, relation_from_source, relation_via_eisenstein,
    relation_via_theta, transport, PairingForm, RelationSource,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NlpicError {
    #[error("{kind}_{{{m},{mu}}} is not a supported index")]
    UnsupportedIndex { kind: Kind, m: String, mu: String },
    #[error("principal part is empty")]
    EmptyPrincipalPart,
    #[error("no primitive vector of norm {0} in E8")]
    NoVectorFound(i64),
    #[error("no generator of the discriminant group with the required norm")]
    NoCompatibleGenerator,
    #[error("hypothesis not satisfied: {0}")]
    HypothesisNotSatisfied(String),
    #[error("weight mismatch: source has weight {got}, need {want}")]
    WeightMismatch { got: String, want: String },
    #[error("no lattice with a matching discriminant form: {0}")]
    NoPartner(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Eisenstein(#[from] EisensteinError),
    #[error(transparent)]
    QExp(#[from] QExpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    H,
    P,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::H => "H",
            Kind::P => "P",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeegnerSymbol {
    pub kind: Kind,
    pub m: Rational,
    pub mu: DiscElement,
}

impl fmt::Display for HeegnerSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{{{},{}}}", self.kind, self.m, self.mu)
    }
}

impl HeegnerSymbol {
    /// A checked symbol with μ replaced by its ± representative.
    pub fn new(d: &DiscriminantForm, kind: Kind, m: Rational, mu: &DiscElement) -> Result<Self, NlpicError> {
        d.check(mu)?;
        let unsupported = || NlpicError::UnsupportedIndex {
            kind,
            m: m.to_string(),
            mu: mu.to_string(),
        };
        if !m.is_positive() || !is_supported(d, &m, mu) {
            return Err(unsupported());
        }
        Ok(HeegnerSymbol {
            kind,
            mu: d.canonical_pm(mu),
            m,
        })
    }

    /// How many times the Noether-Lefschetz locus is counted: 2 when μ = −μ.
    pub fn nl_multiplicity(&self, d: &DiscriminantForm) -> u32 {
        if d.negate(&self.mu) == self.mu {
            2
        } else {
            1
        }
    }
}

/// m ≡ −q(μ) mod 1.
pub fn is_supported(d: &DiscriminantForm, m: &Rational, mu: &DiscElement) -> bool {
    frac(&(m + d.q(mu).into_value())).is_zero()
}

/// λ·lambda + Σ c·symbol, read as a relation (= 0) when `relation` is set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DivisorClassExpr {
    pub lambda: Rational,
    pub terms: BTreeMap<HeegnerSymbol, Rational>,
    pub relation: bool,
    /// exponent-zero coefficients at nonzero isotropic μ, left out of the
    /// relation since H_{0,μ} is not a divisor
    pub dropped: BTreeMap<DiscElement, Rational>,
}

impl fmt::Display for DivisorClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.terms.iter().map(|(s, c)| format!("{c}·{s}")).collect();
        if !self.lambda.is_zero() {
            parts.push(format!("{}·λ", self.lambda));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))?;
        if self.relation {
            write!(f, " = 0")?;
        }
        Ok(())
    }
}

impl DivisorClassExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() && self.terms.is_empty()
    }

    /// Adds c·symbol, keeping no zero coefficients.
    pub fn add_term(&mut self, s: HeegnerSymbol, c: Rational) {
        let e = self.terms.entry(s).or_insert_with(Rational::zero);
        *e += c;
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn add_lambda(&mut self, c: Rational) {
        self.lambda += c;
    }

    pub fn coefficient(&self, s: &HeegnerSymbol) -> Rational {
        self.terms.get(s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        out.lambda *= c;
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.lambda += &o.lambda;
        for (s, c) in &o.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    /// The same class written with H-symbols only.
    pub fn to_h(&self, d: &DiscriminantForm) -> Result<Self, NlpicError> {
        let mut out = DivisorClassExpr {
            lambda: self.lambda.clone(),
            relation: self.relation,
            dropped: self.dropped.clone(),
            ..Default::default()
        };
        for (s, c) in &self.terms {
            match s.kind {
                Kind::H => out.add_term(s.clone(), c.clone()),
                Kind::P => out = out.add(&p_to_h(d, s)?.scale(c)),
            }
        }
        Ok(out)
    }

    /// The same class written with P-symbols only.
    pub fn to_p(&self, d: &DiscriminantForm) -> Result<Self, NlpicError> {
        let mut out = DivisorClassExpr {
            lambda: self.lambda.clone(),
            relation: self.relation,
            dropped: self.dropped.clone(),
            ..Default::default()
        };
        for (s, c) in &self.terms {
            match s.kind {
                Kind::P => out.add_term(s.clone(), c.clone()),
                Kind::H => out = out.add(&h_to_p(d, s)?.scale(c)),
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    kind: Kind,
    #[serde(with = "crate::arith::ser::rational")]
    m: Rational,
    mu: DiscElement,
    #[serde(with = "crate::arith::ser::rational")]
    c: Rational,
}

#[derive(Serialize, Deserialize)]
struct DroppedJson {
    mu: DiscElement,
    #[serde(with = "crate::arith::ser::rational")]
    c: Rational,
}

#[derive(Serialize, Deserialize)]
struct ExprJson {
    #[serde(with = "crate::arith::ser::rational")]
    lambda: Rational,
    terms: Vec<TermJson>,
    relation: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    dropped: Vec<DroppedJson>,
}

impl Serialize for DivisorClassExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExprJson {
            lambda: self.lambda.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermJson {
                    kind: k.kind,
                    m: k.m.clone(),
                    mu: k.mu.clone(),
                    c: c.clone(),
                })
                .collect(),
            relation: self.relation,
            dropped: self
                .dropped
                .iter()
                .map(|(mu, c)| DroppedJson {
                    mu: mu.clone(),
                    c: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DivisorClassExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ExprJson::deserialize(d)?;
        let mut out = DivisorClassExpr {
            lambda: j.lambda,
            relation: j.relation,
            dropped: j.dropped.into_iter().map(|e| (e.mu, e.c)).collect(),
            ..Default::default()
        };
        for t in j.terms {
            out.add_term(
                HeegnerSymbol {
                    kind: t.kind,
                    m: t.m,
                    mu: t.mu,
                },
                t.c,
            );
        }
        Ok(out)
    }
}

/// Parses "H:1/3:[1]"-style symbol text (used by the command line).
pub fn parse_symbol(d: &DiscriminantForm, s: &str) -> Result<HeegnerSymbol, NlpicError> {
    let bad = || NlpicError::HypothesisNotSatisfied(format!("cannot parse symbol {s:?}"));
    let mut it = s.splitn(3, ':');
    let kind = match it.next() {
        Some("H") => Kind::H,
        Some("P") => Kind::P,
        _ => return Err(bad()),
    };
    let m = parse_rational(it.next().ok_or_else(bad)?).map_err(|_| bad())?;
    let mu: Vec<u64> = serde_json::from_str(it.next().ok_or_else(bad)?).map_err(|_| bad())?;
    HeegnerSymbol::new(d, kind, m, &DiscElement(mu))
}

/// Scales s with s² ≤ m·level: beyond that m/s² lies below every positive
/// exponent of the discriminant form.
fn scales(d: &DiscriminantForm, m: &Rational) -> Vec<u64> {
    let bound = m * Rational::from_integer(BigInt::from(d.level()));
    (1u64..)
        .take_while(|s| Rational::from_integer(BigInt::from(s * s)) <= bound)
        .collect()
}

fn divide(m: &Rational, s: u64) -> Rational {
    m / Rational::from_integer(BigInt::from(s * s))
}

/// H_{m,μ} = Σ_{s ≥ 1} Σ_{sδ = μ} P_{m/s², δ}.
pub fn h_to_p(d: &DiscriminantForm, h: &HeegnerSymbol) -> Result<DivisorClassExpr, NlpicError> {
    let h = HeegnerSymbol::new(d, Kind::H, h.m.clone(), &h.mu)?;
    let elements = d.elements();
    let mut out = DivisorClassExpr::zero();
    for s in scales(d, &h.m) {
        let ms = divide(&h.m, s);
        for delta in elements.iter().filter(|e| d.scale(e, s as i64) == h.mu) {
            if is_supported(d, &ms, delta) {
                out.add_term(HeegnerSymbol::new(d, Kind::P, ms.clone(), delta)?, Rational::one());
            }
        }
    }
    Ok(out)
}

/// P_{Δ,δ} = Σ_{s ≥ 1} μ(s) Σ_{sα = δ} H_{Δ/s², α}.
pub fn p_to_h(d: &DiscriminantForm, p: &HeegnerSymbol) -> Result<DivisorClassExpr, NlpicError> {
    let p = HeegnerSymbol::new(d, Kind::P, p.m.clone(), &p.mu)?;
    let elements = d.elements();
    let mut out = DivisorClassExpr::zero();
    for s in scales(d, &p.m) {
        let mu = mobius(s);
        if mu == 0 {
            continue;
        }
        let ms = divide(&p.m, s);
        for alpha in elements.iter().filter(|e| d.scale(e, s as i64) == p.mu) {
            if is_supported(d, &ms, alpha) {
                out.add_term(
                    HeegnerSymbol::new(d, Kind::H, ms.clone(), alpha)?,
                    Rational::from_integer(BigInt::from(mu)),
                );
            }
        }
    }
    Ok(out)
}

/// The relation Σ α_{−m,μ} H_{m,μ} = 0 attached to the principal part of a
/// weakly holomorphic form with Fourier support m ≡ q(μ), keyed by
/// (exponent, μ) with exponent ≤ 0. H_{0,0} becomes −λ; exponent-zero
/// entries at μ ≠ 0 are kept in `dropped`.
pub fn relation_from_form(
    d: &DiscriminantForm,
    principal: &BTreeMap<(Rational, DiscElement), Rational>,
) -> Result<DivisorClassExpr, NlpicError> {
    let mut out = DivisorClassExpr {
        relation: true,
        ..Default::default()
    };
    let zero = d.zero();
    for ((e, mu), c) in principal {
        if c.is_zero() {
            continue;
        }
        if e.is_positive() {
            continue;
        }
        if e.is_zero() {
            if *mu == zero {
                out.add_lambda(-c);
            } else {
                if !d.q(mu).value().is_zero() {
                    return Err(NlpicError::UnsupportedIndex {
                        kind: Kind::H,
                        m: "0".into(),
                        mu: mu.to_string(),
                    });
                }
                out.dropped.insert(mu.clone(), c.clone());
            }
            continue;
        }
        out.add_term(HeegnerSymbol::new(d, Kind::H, -e, mu)?, c.clone());
    }
    if out.is_zero() {
        return Err(NlpicError::EmptyPrincipalPart);
    }
    Ok(out)
}

/// Slope-style reading of a relation H + … = Cλ: the constant C.
pub fn lambda_constant(rel: &DivisorClassExpr) -> Rational {
    -rel.lambda.clone()
}

/// The largest index m among the terms (0 when there are none).
pub fn max_index(e: &DivisorClassExpr) -> Rational {
    e.terms.keys().map(|s| s.m.clone()).max().unwrap_or_else(Rational::zero)
}
