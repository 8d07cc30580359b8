//! Fourier coefficients of the vector-valued Eisenstein series for the dual
//! Weil representation, as exact rationals.
//!
//! c(n, γ) = ε·(2π)^κ n^{κ−1} / (Γ(κ)·√|A|) · Π_p δ_p(γ, n) with κ = rank/2.
//! Bad primes are counted exactly; the remaining product is taken either in
//! closed form through L-values or numerically with a tail bound followed by
//! rational reconstruction.

pub mod density;
pub mod euler;

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes::prime_divisors;
use crate::arith::{frac, rational_reconstruct, ArithError, BigFloat, PiSurd, Rational};
use crate::discform::{DiscElement, DiscError, DiscriminantForm};
use crate::lattice::{IntegerLattice, LatticeError, Signature};
use crate::qexp::{exponents_in_class, Support, VVQExpansion};

pub use density::{DensityCounter, DensityError, LocalDensity};
pub use euler::{EulerError, GoodFactor};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EisensteinError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error("local density at p = {p}: {source}")]
    Density { p: u64, source: DensityError },
    #[error(transparent)]
    Euler(#[from] EulerError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("calibration failure: {0}")]
    CalibrationFailure(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
}

/// One row of the calibration table: which normalization of the archimedean
/// factor applies to a class of signatures.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationEntry {
    pub version: u32,
    /// b⁺ mod 4
    pub b_plus_mod4: u8,
    /// ε in the archimedean factor
    pub sign: i8,
    /// extra rational factor in front of (2π)^κ
    pub prefactor: (i64, i64),
}

pub const CALIBRATION_VERSION: u32 = 1;

/// Weight rank/2 with the parity condition forces b⁺ even; the sign is
/// (−1)^{b⁺/2}. Checked by the gold coefficients on signatures (2, *) and
/// (4, 3).
pub const CALIBRATION: &[CalibrationEntry] = &[
    CalibrationEntry {
        version: CALIBRATION_VERSION,
        b_plus_mod4: 0,
        sign: 1,
        prefactor: (1, 1),
    },
    CalibrationEntry {
        version: CALIBRATION_VERSION,
        b_plus_mod4: 2,
        sign: -1,
        prefactor: (1, 1),
    },
];

fn calibration_for(sig: &Signature) -> Result<&'static CalibrationEntry, EisensteinError> {
    let class = (sig.b_plus % 4) as u8;
    CALIBRATION
        .iter()
        .find(|e| e.b_plus_mod4 == class)
        .ok_or_else(|| {
            EisensteinError::CalibrationFailure(format!(
                "no calibration entry for b+ = {} (b+ mod 4 = {class})",
                sig.b_plus
            ))
        })
}

/// Route for the product over good primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// closed form through Dirichlet L-values
    Exact,
    /// truncated Euler product at `bits` of precision, then reconstruction
    Numeric { bits: u32 },
}

fn int(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Eisenstein data of one lattice of weight rank/2.
#[derive(Debug, Clone)]
pub struct Eisenstein {
    lattice: IntegerLattice,
    disc: Arc<DiscriminantForm>,
    sig: Signature,
    det: BigInt,
    level: BigInt,
    calib: &'static CalibrationEntry,
}

impl Eisenstein {
    /// `two_k` is twice the weight.
    pub fn new(l: &IntegerLattice, two_k: i64) -> Result<Self, EisensteinError> {
        let sig = l.signature()?;
        let r = sig.rank() as i64;
        if two_k != r {
            return Err(EisensteinError::PreconditionFailed(format!(
                "weight {two_k}/2 differs from rank/2 = {r}/2"
            )));
        }
        if two_k <= 4 {
            return Err(EisensteinError::PreconditionFailed(format!(
                "weight {two_k}/2 must exceed 2"
            )));
        }
        let diff = sig.b_minus as i64 - sig.b_plus as i64;
        if (two_k - diff).rem_euclid(4) != 0 {
            return Err(EisensteinError::PreconditionFailed(format!(
                "parity: 2k = {two_k} is not b- - b+ = {diff} mod 4"
            )));
        }
        let disc = Arc::new(DiscriminantForm::of(l)?);
        Ok(Eisenstein {
            lattice: l.clone(),
            disc,
            sig,
            det: l.determinant(),
            level: l.level()?,
            calib: calibration_for(&sig)?,
        })
    }

    pub fn disc(&self) -> &Arc<DiscriminantForm> {
        &self.disc
    }

    pub fn weight(&self) -> Rational {
        Rational::new(BigInt::from(self.sig.rank()), BigInt::from(2))
    }

    pub fn calibration(&self) -> &'static CalibrationEntry {
        self.calib
    }

    /// Whether (n, γ) lies in the support n ≡ −q(γ) mod 1, n ≥ 0.
    pub fn is_supported(&self, n: &Rational, gamma: &DiscElement) -> bool {
        !n.is_negative() && frac(&(n + self.disc.q(gamma).into_value())).is_zero()
    }

    /// Primes dividing 2·det·level·numerator(n)·denominator(n).
    pub fn bad_primes(&self, n: &Rational) -> Vec<u64> {
        let prod = &self.det * &self.level * n.numer() * n.denom() * 2;
        prime_divisors(&prod)
    }

    fn counter(&self, gamma: &DiscElement, n: &Rational, p: u64) -> DensityCounter {
        let shift: Vec<Rational> = self.disc.lift(gamma).iter().map(frac).collect();
        DensityCounter::new(self.lattice.gram(), &shift, n, p)
    }

    pub fn local_density(
        &self,
        gamma: &DiscElement,
        n: &Rational,
        p: u64,
    ) -> Result<LocalDensity, EisensteinError> {
        self.disc.check(gamma)?;
        if !n.is_positive() || !self.is_supported(n, gamma) {
            return Err(EisensteinError::PreconditionFailed(format!(
                "({n}, {gamma}) is not a positive supported index"
            )));
        }
        self.counter(gamma, n, p)
            .stabilize(1)
            .map_err(|source| EisensteinError::Density { p, source })
    }

    /// ε·(2π)^κ n^{κ−1} / (Γ(κ)·√|A|) in closed form.
    pub fn archimedean(&self, n: &Rational) -> PiSurd {
        let r = self.sig.rank() as u64;
        let (num, den) = self.calib.prefactor;
        let pre = int(self.calib.sign as i64) * Rational::new(BigInt::from(num), BigInt::from(den));
        let order = int(self.disc.order());
        if r % 2 == 0 {
            let k = r / 2;
            let c = pre * int(BigInt::one() << k) * crate::arith::rat_pow(n, k as i64 - 1)
                / int(factorial(k - 1));
            PiSurd::rational(c)
                .mul(&PiSurd::pi_power(k as i32))
                .mul(&PiSurd::sqrt(&(Rational::one() / order)))
        } else {
            // κ = s + 1/2: Γ(κ) = (2s)!√π/(4^s s!), so √π cancels against (2π)^κ
            let s = (r - 1) / 2;
            let c = pre * int(BigInt::one() << (3 * s)) * int(factorial(s))
                * crate::arith::rat_pow(n, s as i64 - 1)
                / int(factorial(2 * s));
            PiSurd::rational(c)
                .mul(&PiSurd::pi_power(s as i32))
                .mul(&PiSurd::sqrt(&(int(2) * n / order)))
        }
    }

    fn bad_densities(&self, gamma: &DiscElement, n: &Rational) -> Result<(Vec<u64>, Rational), EisensteinError> {
        let bad = self.bad_primes(n);
        let dens: Result<Vec<LocalDensity>, EisensteinError> = bad
            .par_iter()
            .map(|&p| self.local_density(gamma, n, p))
            .collect();
        let prod = dens?.iter().fold(Rational::one(), |acc, d| acc * &d.value);
        Ok((bad, prod))
    }

    /// c(n, γ) with the good primes taken in closed form.
    pub fn coefficient(&self, n: &Rational, gamma: &DiscElement) -> Result<Rational, EisensteinError> {
        self.coefficient_via(n, gamma, Route::Exact)
    }

    pub fn coefficient_via(
        &self,
        n: &Rational,
        gamma: &DiscElement,
        route: Route,
    ) -> Result<Rational, EisensteinError> {
        self.disc.check(gamma)?;
        if n.is_zero() {
            return Ok(if *gamma == self.disc.zero() { Rational::one() } else { Rational::zero() });
        }
        if !self.is_supported(n, gamma) {
            return Ok(Rational::zero());
        }
        let (bad, local) = self.bad_densities(gamma, n)?;
        if local.is_zero() {
            return Ok(Rational::zero());
        }
        let good = GoodFactor::new(self.sig.rank(), &self.det, n);
        match route {
            Route::Exact => {
                let total = self
                    .archimedean(n)
                    .scale(&local)
                    .mul(&euler::good_product_exact(&good, &bad)?);
                total.as_rational().ok_or_else(|| {
                    EisensteinError::CalibrationFailure(format!(
                        "coefficient at ({n}, {gamma}) is not rational: {total:?}"
                    ))
                })
            }
            Route::Numeric { bits } => self.numeric_value(n, &bad, &local, &good, bits),
        }
    }

    /// The numeric value of c(n, γ) as an error-tracked float.
    pub fn coefficient_float(
        &self,
        n: &Rational,
        gamma: &DiscElement,
        bits: u32,
    ) -> Result<BigFloat, EisensteinError> {
        let (bad, local) = self.bad_densities(gamma, n)?;
        let good = GoodFactor::new(self.sig.rank(), &self.det, n);
        let bound = euler::prime_bound_for(good.exponent(), bits);
        let prod = euler::good_product_numeric(&good, &bad, bound, bits + 32)?;
        let arch = euler::pisurd_to_bigfloat(&self.archimedean(n).scale(&local), bits + 32)?;
        Ok(arch.mul(&prod)?)
    }

    fn numeric_value(
        &self,
        n: &Rational,
        bad: &[u64],
        local: &Rational,
        good: &GoodFactor,
        bits: u32,
    ) -> Result<Rational, EisensteinError> {
        let bound = euler::prime_bound_for(good.exponent(), bits);
        let prod = euler::good_product_numeric(good, bad, bound, bits + 32)?;
        let arch = euler::pisurd_to_bigfloat(&self.archimedean(n).scale(local), bits + 32)?;
        let x = arch.mul(&prod)?;
        let err = x.error_bound();
        if err.is_zero() {
            return Ok(x.midpoint());
        }
        // largest Q with err < 1/(2Q²), halved for margin
        let q = (Rational::one() / (err * int(8))).to_integer().sqrt();
        if q < BigInt::from(2) {
            return Err(EisensteinError::PrecisionExhausted(format!(
                "error {} at {bits} bits leaves no room for reconstruction",
                x.error_bound()
            )));
        }
        rational_reconstruct(&x, &q).map_err(|e| match e {
            ArithError::NoReconstruction { .. } => EisensteinError::PrecisionExhausted(e.to_string()),
            other => other.into(),
        })
    }

    /// All coefficients with n ≤ truncation.
    pub fn qexp(&self, truncation: &Rational) -> Result<VVQExpansion<Rational>, EisensteinError> {
        let mut out = VVQExpansion::zero(
            self.disc.clone(),
            self.weight(),
            Support::Minus,
            Rational::zero(),
            truncation.clone(),
        );
        let mut tasks = Vec::new();
        let mut seen = HashMap::new();
        for gamma in self.disc.elements() {
            let canon = self.disc.canonical_pm(&gamma);
            if seen.insert(canon.clone(), ()).is_some() {
                continue;
            }
            let offset = out.offset(&gamma).clone();
            for n in exponents_in_class(&offset, &Rational::zero(), truncation) {
                tasks.push((canon.clone(), n));
            }
        }
        let values: Result<Vec<Rational>, EisensteinError> =
            tasks.par_iter().map(|(g, n)| self.coefficient(n, g)).collect();
        for ((canon, n), c) in tasks.iter().zip(values?) {
            for g in self.disc.orbit_pm(canon) {
                out.set(n.clone(), &g, c.clone()).expect("supported index");
            }
        }
        Ok(out)
    }
}

/// c(m, μ) of the weight two_k/2 Eisenstein series of `l`.
pub fn eisenstein_coefficient(
    l: &IntegerLattice,
    two_k: i64,
    m: &Rational,
    mu: &DiscElement,
) -> Result<Rational, EisensteinError> {
    Eisenstein::new(l, two_k)?.coefficient(m, mu)
}

pub fn eisenstein_qexp(
    l: &IntegerLattice,
    two_k: i64,
    truncation: &Rational,
) -> Result<VVQExpansion<Rational>, EisensteinError> {
    Eisenstein::new(l, two_k)?.qexp(truncation)
}

pub fn local_density(
    l: &IntegerLattice,
    mu: &DiscElement,
    m: &Rational,
    p: u64,
) -> Result<LocalDensity, EisensteinError> {
    let sig = l.signature()?;
    Eisenstein::new_unchecked(l, sig)?.local_density(mu, m, p)
}

impl Eisenstein {
    fn new_unchecked(l: &IntegerLattice, sig: Signature) -> Result<Self, EisensteinError> {
        Ok(Eisenstein {
            lattice: l.clone(),
            disc: Arc::new(DiscriminantForm::of(l)?),
            sig,
            det: l.determinant(),
            level: l.level()?,
            calib: &CALIBRATION[0],
        })
    }
}

#[cfg(test)]
mod tests;
