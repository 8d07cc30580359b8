//! Finite generating sets of the Heegner part of the Picard group.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::hodge::{lambda_generator, m_delta};
use super::{HeegnerSymbol, Kind, NlpicError};
use crate::arith::{floor, frac, Rational};
use crate::discform::DiscriminantForm;
use crate::lattice::{Family, IntegerLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Flavor {
    H,
    P,
}

/// One member {P_{m_δ,δℓ*}} of the generating set of size d + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NlGenerator {
    pub delta: u64,
    pub symbol: HeegnerSymbol,
    /// δ²/4d was integral and m was moved to 1
    pub degenerate: bool,
    /// −|L| = 4dΔ for the rank-two lattice L of the Noether-Lefschetz locus
    pub nl_discriminant: Rational,
}

#[derive(Debug, Clone)]
pub struct GeneratingSet {
    pub flavor: Flavor,
    /// every symbol has m ≤ bound
    pub bound: Rational,
    /// the λ slot H_{0,0} belongs to the set (flavor H)
    pub with_lambda: bool,
    pub symbols: Vec<HeegnerSymbol>,
    pub presentation: Option<Vec<NlGenerator>>,
}

/// All supported symbols up to the flavor's bound: 0 ≤ m ≤ rk/24 for H
/// (with H_{0,0} = −λ) and 0 < m ≤ ⌊rk/24⌋ + 1 for P.
pub fn generating_set(l: &IntegerLattice, flavor: Flavor) -> Result<GeneratingSet, NlpicError> {
    if !l.splits_two_hyperbolic_planes() {
        return Err(NlpicError::HypothesisNotSatisfied(
            "the lattice is not known to split two hyperbolic planes".into(),
        ));
    }
    if l.rank() < 5 {
        return Err(NlpicError::HypothesisNotSatisfied(format!("rank {} < 5", l.rank())));
    }
    let disc = DiscriminantForm::of(l)?;
    let rk = Rational::new(BigInt::from(l.rank()), BigInt::from(24));
    let (kind, bound) = match flavor {
        Flavor::H => (Kind::H, rk),
        Flavor::P => (Kind::P, Rational::from_integer(floor(&rk) + 1)),
    };
    let mut symbols = vec![];
    for mu in disc.elements() {
        if disc.canonical_pm(&mu) != mu {
            continue;
        }
        let mut m = frac(&-disc.q(&mu).into_value());
        if m.is_zero() {
            m = Rational::one();
        }
        while m <= bound {
            symbols.push(HeegnerSymbol::new(&disc, kind, m.clone(), &mu)?);
            m += Rational::one();
        }
    }
    symbols.sort();
    let presentation = match (flavor, l.family()) {
        (Flavor::P, Family::Lambda2d { d }) => Some(presentation(&disc, *d)?),
        _ => None,
    };
    Ok(GeneratingSet {
        flavor,
        bound,
        with_lambda: flavor == Flavor::H,
        symbols,
        presentation,
    })
}

/// {P_{m_δ,δℓ*} : δ = 0..d}.
fn presentation(disc: &DiscriminantForm, d: u64) -> Result<Vec<NlGenerator>, NlpicError> {
    let g = lambda_generator(disc, d)?;
    (0..=d)
        .map(|delta| {
            let (m, degenerate) = m_delta(d, delta);
            let mu = disc.scale(&g, delta as i64);
            Ok(NlGenerator {
                delta,
                nl_discriminant: &m * Rational::from_integer(BigInt::from(4 * d)),
                symbol: HeegnerSymbol::new(disc, Kind::P, m, &mu)?,
                degenerate,
            })
        })
        .collect()
}

/// For each symbol, a primitive vector x of the dual lattice with x ∈ μ + Λ
/// and q(x) = −m, built inside the leading hyperbolic plane U and checked.
/// Fails when the Gram matrix does not start with an orthogonal copy of U.
pub fn verify_primitive_representatives(
    l: &IntegerLattice,
    symbols: &[HeegnerSymbol],
) -> Result<Vec<Vec<Rational>>, NlpicError> {
    let g = l.gram();
    let n = l.rank();
    let is = |i: usize, j: usize, v: i64| g[(i, j)] == BigInt::from(v);
    let leading_u = n >= 2
        && is(0, 0, 0)
        && is(1, 1, 0)
        && is(0, 1, 1)
        && (2..n).all(|j| is(0, j, 0) && is(1, j, 0));
    if !leading_u {
        return Err(NlpicError::HypothesisNotSatisfied("no leading hyperbolic plane".into()));
    }
    let disc = DiscriminantForm::of(l)?;
    let two = Rational::from_integer(BigInt::from(2));
    symbols
        .iter()
        .map(|s| {
            // the lift has integral U-coordinates; replace them by e + b·f with q(e + b·f) = b
            let mut x = disc.lift(&s.mu);
            x[0] = Rational::zero();
            x[1] = Rational::zero();
            let qx = l.norm(&x) / &two;
            x[0] = Rational::one();
            x[1] = -&s.m - qx;
            let ok_coset = disc.element_of(&x)? == s.mu;
            let ok_norm = l.norm(&x) / &two == -&s.m;
            let gx = g.mul_rat_vec(&x);
            let content = gx
                .iter()
                .fold(BigInt::zero(), |a, v| a.gcd(&v.to_integer()));
            if !(ok_coset && ok_norm && content.is_one()) {
                return Err(NlpicError::UnsupportedIndex {
                    kind: s.kind,
                    m: s.m.to_string(),
                    mu: s.mu.to_string(),
                });
            }
            Ok(x)
        })
        .collect()
}
