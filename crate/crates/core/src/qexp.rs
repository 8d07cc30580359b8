//! Scalar and vector-valued q-expansions with rational exponents.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ceil, floor, frac, partition_power_series, ser, Coeff, Rational};
use crate::discform::{DiscElement, DiscriminantForm};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QExpError {
    #[error("coefficient at exponent {requested} is not determined (truncation {truncation})")]
    TruncationUnderflow { requested: String, truncation: String },
    #[error("exponent {m} is not in the support of component {mu}")]
    Unsupported { m: String, mu: String },
    #[error("discriminant forms differ")]
    DiscMismatch,
    #[error("malformed expansion: {0}")]
    Malformed(String),
}

/// Σ_{n ≥ valuation} a_n qⁿ, exact for n ≤ truncation.
#[derive(Clone, Debug)]
pub struct ScalarQExpansion<C: Coeff> {
    valuation: i64,
    coeffs: Vec<C>,
    truncation: i64,
}

impl<C: Coeff> ScalarQExpansion<C> {
    /// `coeffs[i]` is the coefficient of q^{valuation+i}; missing entries up
    /// to `truncation` are zero.
    pub fn new(valuation: i64, mut coeffs: Vec<C>, truncation: i64) -> Self {
        let len = (truncation - valuation + 1).max(0) as usize;
        coeffs.truncate(len);
        coeffs.resize(len, C::zero());
        ScalarQExpansion {
            valuation,
            coeffs,
            truncation,
        }
    }

    pub fn one(truncation: i64) -> Self {
        Self::new(0, vec![C::one()], truncation)
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    /// Leading exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.valuation + i as i64)
    }

    pub fn coefficient(&self, n: i64) -> Result<C, QExpError> {
        if n > self.truncation {
            return Err(QExpError::TruncationUnderflow {
                requested: n.to_string(),
                truncation: self.truncation.to_string(),
            });
        }
        if n < self.valuation {
            return Ok(C::zero());
        }
        Ok(self.coeffs[(n - self.valuation) as usize].clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.valuation + i as i64, c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let val = self.valuation + o.valuation;
        let trunc = (self.truncation + o.valuation).min(o.truncation + self.valuation);
        let len = (trunc - val + 1).max(0) as usize;
        let mut out = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    let t = std::mem::replace(&mut out[i + j], C::zero());
                    out[i + j] = t + a.clone() * b.clone();
                }
            }
        }
        Self::new(val, out, trunc)
    }

    pub fn add(&self, o: &Self) -> Self {
        let val = self.valuation.min(o.valuation);
        let trunc = self.truncation.min(o.truncation);
        let coeffs = (val..=trunc)
            .map(|n| self.coefficient(n).unwrap() + o.coefficient(n).unwrap())
            .collect();
        Self::new(val, coeffs, trunc)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(
            self.valuation,
            self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
            self.truncation,
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.truncation - self.valuation);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn truncate(&self, truncation: i64) -> Self {
        assert!(truncation <= self.truncation);
        Self::new(self.valuation, self.coeffs.clone(), truncation)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> ScalarQExpansion<D> {
        ScalarQExpansion::new(self.valuation, self.coeffs.iter().map(f).collect(), self.truncation)
    }
}

impl<C: Coeff> PartialEq for ScalarQExpansion<C> {
    fn eq(&self, o: &Self) -> bool {
        self.truncation == o.truncation
            && (self.valuation.min(o.valuation)..=self.truncation)
                .all(|n| self.coefficient(n).unwrap() == o.coefficient(n).unwrap())
    }
}

/// Δ^{−N} = q^{−N} ∏ (1 − qʲ)^{−24N}, complete up to q^{truncation}.
pub fn delta_inverse_power(n: u32, truncation: i64) -> ScalarQExpansion<Rational> {
    assert!(n >= 1 && truncation >= -(n as i64));
    let len = (truncation + n as i64 + 1) as usize;
    let coeffs = partition_power_series(24 * n as u64, len)
        .into_iter()
        .map(Rational::from_integer)
        .collect();
    ScalarQExpansion::new(-(n as i64), coeffs, truncation)
}

/// Δ^N from Euler's pentagonal series raised to the power 24N.
pub fn delta_power(n: u32, truncation: i64) -> ScalarQExpansion<Rational> {
    let t = truncation - n as i64;
    let mut euler = vec![Rational::zero(); (t.max(0) + 1) as usize];
    for k in -(t + 1)..=(t + 1) {
        let e = k * (3 * k - 1) / 2;
        if e >= 0 && e <= t {
            let s = if k.is_odd() { -1 } else { 1 };
            euler[e as usize] = Rational::from_integer(BigInt::from(s));
        }
    }
    let eta24 = ScalarQExpansion::new(0, euler, t);
    let p = eta24.pow(24 * n);
    ScalarQExpansion::new(n as i64, p.coeffs, truncation)
}

fn divisor_power_sum(n: u64, k: u32) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(k);
            if d * d != n {
                s += BigInt::from(n / d).pow(k);
            }
        }
        d += 1;
    }
    s
}

/// E₄ = 1 + 240 Σ σ₃(n) qⁿ.
pub fn e4(truncation: i64) -> ScalarQExpansion<Rational> {
    eisenstein_level_one(240, 3, truncation)
}

/// E₆ = 1 − 504 Σ σ₅(n) qⁿ.
pub fn e6(truncation: i64) -> ScalarQExpansion<Rational> {
    eisenstein_level_one(-504, 5, truncation)
}

fn eisenstein_level_one(c: i64, k: u32, truncation: i64) -> ScalarQExpansion<Rational> {
    let coeffs = (0..=truncation.max(0) as u64)
        .map(|n| {
            if n == 0 {
                Rational::from_integer(BigInt::from(1))
            } else {
                Rational::from_integer(divisor_power_sum(n, k) * c)
            }
        })
        .collect();
    ScalarQExpansion::new(0, coeffs, truncation)
}

/// Σ_μ Σ_m c(m, μ) q^m e_μ with m ≡ offset(μ) mod 1, exact for m ≤ truncation.
#[derive(Clone, Debug)]
pub struct VVQExpansion<C: Coeff> {
    disc: Arc<DiscriminantForm>,
    weight: Rational,
    offsets: Vec<Rational>,
    components: Vec<BTreeMap<Rational, C>>,
    /// lower bound for every exponent that may carry a nonzero coefficient
    min_exponent: Rational,
    truncation: Rational,
}

/// Which residue class the exponents of component μ live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// m ≡ q(μ) mod 1 (theta series of positive-definite lattices)
    Plus,
    /// m ≡ −q(μ) mod 1 (dual Weil representation)
    Minus,
}

impl<C: Coeff> VVQExpansion<C> {
    pub fn zero(
        disc: Arc<DiscriminantForm>,
        weight: Rational,
        support: Support,
        min_exponent: Rational,
        truncation: Rational,
    ) -> Self {
        let offsets = disc
            .elements()
            .iter()
            .map(|e| {
                let q = disc.q(e).into_value();
                match support {
                    Support::Plus => q,
                    Support::Minus => frac(&-q),
                }
            })
            .collect();
        let n = disc.order() as usize;
        VVQExpansion {
            disc,
            weight,
            offsets,
            components: vec![BTreeMap::new(); n],
            min_exponent,
            truncation,
        }
    }

    pub fn disc(&self) -> &Arc<DiscriminantForm> {
        &self.disc
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn truncation(&self) -> &Rational {
        &self.truncation
    }

    pub fn min_exponent(&self) -> &Rational {
        &self.min_exponent
    }

    pub fn offset(&self, mu: &DiscElement) -> &Rational {
        &self.offsets[self.disc.index(mu)]
    }

    pub fn is_supported(&self, m: &Rational, mu: &DiscElement) -> bool {
        self.disc.is_valid(mu) && frac(m) == *self.offset(mu)
    }

    pub fn set(&mut self, m: Rational, mu: &DiscElement, c: C) -> Result<(), QExpError> {
        if !self.is_supported(&m, mu) {
            return Err(QExpError::Unsupported {
                m: m.to_string(),
                mu: mu.to_string(),
            });
        }
        if m > self.truncation {
            return Err(QExpError::TruncationUnderflow {
                requested: m.to_string(),
                truncation: self.truncation.to_string(),
            });
        }
        let comp = &mut self.components[self.disc.index(mu)];
        if c.is_zero() {
            comp.remove(&m);
        } else {
            if m < self.min_exponent {
                self.min_exponent = m.clone();
            }
            comp.insert(m, c);
        }
        Ok(())
    }

    pub fn coefficient(&self, m: &Rational, mu: &DiscElement) -> Result<C, QExpError> {
        if m > &self.truncation {
            return Err(QExpError::TruncationUnderflow {
                requested: m.to_string(),
                truncation: self.truncation.to_string(),
            });
        }
        if !self.is_supported(m, mu) {
            return Ok(C::zero());
        }
        Ok(self.components[self.disc.index(mu)]
            .get(m)
            .cloned()
            .unwrap_or_else(C::zero))
    }

    /// Nonzero entries ordered by component index, then exponent.
    pub fn entries(&self) -> impl Iterator<Item = (DiscElement, &Rational, &C)> {
        self.components.iter().enumerate().flat_map(move |(i, comp)| {
            let mu = self.disc.from_index(i);
            comp.iter().map(move |(m, c)| (mu.clone(), m, c))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_empty())
    }

    /// All coefficients with m ≤ 0.
    pub fn principal_part(&self) -> BTreeMap<(Rational, DiscElement), C> {
        self.entries()
            .filter(|(_, m, _)| !m.is_positive())
            .map(|(mu, m, c)| ((m.clone(), mu), c.clone()))
            .collect()
    }

    pub fn truncate(&self, truncation: Rational) -> Self {
        assert!(truncation <= self.truncation);
        let mut out = self.clone();
        for comp in &mut out.components {
            comp.retain(|m, _| *m <= truncation);
        }
        out.truncation = truncation;
        out
    }

    pub fn add(&self, o: &Self) -> Result<Self, QExpError> {
        self.check_compatible(o)?;
        let mut out = self.truncate(self.truncation.clone().min(o.truncation.clone()));
        out.min_exponent = self.min_exponent.clone().min(o.min_exponent.clone());
        for (mu, m, c) in o.entries() {
            if *m > out.truncation {
                continue;
            }
            let cur = out.coefficient(m, &mu)?;
            out.set(m.clone(), &mu, cur + c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = self.clone();
        for comp in &mut out.components {
            for v in comp.values_mut() {
                *v = v.clone() * c.clone();
            }
            comp.retain(|_, v| !v.is_zero());
        }
        out
    }

    fn check_compatible(&self, o: &Self) -> Result<(), QExpError> {
        if self.disc.invariants() != o.disc.invariants() || self.offsets != o.offsets {
            return Err(QExpError::DiscMismatch);
        }
        Ok(())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> VVQExpansion<D> {
        VVQExpansion {
            disc: self.disc.clone(),
            weight: self.weight.clone(),
            offsets: self.offsets.clone(),
            components: self
                .components
                .iter()
                .map(|comp| comp.iter().map(|(m, c)| (m.clone(), f(c))).collect())
                .collect(),
            min_exponent: self.min_exponent.clone(),
            truncation: self.truncation.clone(),
        }
    }
}

/// The largest truncation determined by a product s·f.
pub fn product_truncation<C: Coeff>(s: &ScalarQExpansion<C>, f: &VVQExpansion<C>) -> Rational {
    let a = Rational::from_integer(BigInt::from(s.truncation())) + f.min_exponent();
    let b = f.truncation() + Rational::from_integer(BigInt::from(s.valuation()));
    a.min(b)
}

/// The Cauchy product s·f, complete up to `product_truncation(s, f)`.
pub fn multiply<C: Coeff>(s: &ScalarQExpansion<C>, f: &VVQExpansion<C>, weight_of_s: &Rational) -> VVQExpansion<C> {
    let t = product_truncation(s, f);
    multiply_to(s, f, weight_of_s, &t).expect("truncation is attainable")
}

/// The Cauchy product s·f up to a requested truncation.
pub fn multiply_to<C: Coeff>(
    s: &ScalarQExpansion<C>,
    f: &VVQExpansion<C>,
    weight_of_s: &Rational,
    truncation: &Rational,
) -> Result<VVQExpansion<C>, QExpError> {
    let best = product_truncation(s, f);
    if truncation > &best {
        return Err(QExpError::TruncationUnderflow {
            requested: truncation.to_string(),
            truncation: best.to_string(),
        });
    }
    let mut out = VVQExpansion {
        disc: f.disc.clone(),
        weight: &f.weight + weight_of_s,
        offsets: f.offsets.clone(),
        components: vec![BTreeMap::new(); f.components.len()],
        min_exponent: &f.min_exponent + Rational::from_integer(BigInt::from(s.valuation())),
        truncation: truncation.clone(),
    };
    for (idx, comp) in f.components.iter().enumerate() {
        let mut acc: BTreeMap<Rational, C> = BTreeMap::new();
        for (m, c) in comp {
            for (n, a) in s.iter() {
                if a.is_zero() {
                    continue;
                }
                let e = m + Rational::from_integer(BigInt::from(n));
                if &e > truncation {
                    break;
                }
                let entry = acc.entry(e).or_insert_with(C::zero);
                *entry = entry.clone() + a.clone() * c.clone();
            }
        }
        acc.retain(|_, v| !v.is_zero());
        out.components[idx] = acc;
    }
    Ok(out)
}

/// Exponents m ≤ bound (and ≥ lower) in the residue class of `offset`.
pub fn exponents_in_class(offset: &Rational, lower: &Rational, bound: &Rational) -> Vec<Rational> {
    let lo = ceil(&(lower - offset));
    let hi = floor(&(bound - offset));
    let mut out = Vec::new();
    let mut k = lo;
    while k <= hi {
        out.push(offset + Rational::from_integer(k.clone()));
        k += 1;
    }
    out
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    #[serde(with = "ser::rational")]
    m: Rational,
    mu: DiscElement,
    #[serde(with = "ser::rational")]
    c: Rational,
}

#[derive(Serialize, Deserialize)]
pub struct VVQExpansionJson {
    #[serde(with = "ser::rational")]
    weight: Rational,
    invariants: Vec<u64>,
    entries: Vec<EntryJson>,
    #[serde(with = "ser::rational")]
    truncation: Rational,
}

impl VVQExpansion<Rational> {
    pub fn to_json(&self) -> VVQExpansionJson {
        VVQExpansionJson {
            weight: self.weight.clone(),
            invariants: self.disc.invariants().to_vec(),
            entries: self
                .entries()
                .map(|(mu, m, c)| EntryJson {
                    m: m.clone(),
                    mu,
                    c: c.clone(),
                })
                .collect(),
            truncation: self.truncation.clone(),
        }
    }

    /// Rebuilds an expansion over a known discriminant form.
    pub fn from_json(
        disc: Arc<DiscriminantForm>,
        support: Support,
        j: &VVQExpansionJson,
    ) -> Result<Self, QExpError> {
        if j.invariants != disc.invariants() {
            return Err(QExpError::DiscMismatch);
        }
        let min = j
            .entries
            .iter()
            .map(|e| e.m.clone())
            .min()
            .unwrap_or_else(Rational::zero);
        let mut out = Self::zero(disc, j.weight.clone(), support, min, j.truncation.clone());
        for e in &j.entries {
            if !out.disc.is_valid(&e.mu) {
                return Err(QExpError::Malformed(format!("bad element {}", e.mu)));
            }
            out.set(e.m.clone(), &e.mu, e.c.clone())?;
        }
        Ok(out)
    }
}

/// Converts a rational truncation to the integral one used by scalar series.
pub fn integral_part(r: &Rational) -> i64 {
    floor(r).to_i64().expect("truncation fits i64")
}

/// Lowest common denominator of a list of exponents.
pub fn exponent_denominator<'a>(ms: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    ms.into_iter().fold(BigInt::from(1), |a, m| a.lcm(m.denom()))
}
