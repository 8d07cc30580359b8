//! The Weil representation of Mp₂(Z) attached to a discriminant form, and a
//! direct-summation Eisenstein series used as a numeric oracle.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::arith::{to_f64, BigFloat, Cyclotomic, CyclotomicField, Rational};
use crate::discform::{DiscElement, DiscError, DiscriminantForm};
use crate::lattice::{IntegerLattice, Signature};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeilError {
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error("the series does not converge for weight {0}")]
    NonConvergent(String),
    #[error("lattice is not even")]
    NotEven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    T,
    S,
    TInv,
    SInv,
}

/// A matrix whose value is `entries · |A|^{−half_power/2}`.
#[derive(Clone, Debug)]
pub struct WeilMatrix {
    pub entries: Vec<Vec<Cyclotomic<BigInt>>>,
    pub half_power: u32,
}

#[derive(Clone, Debug)]
pub struct WeilRep {
    disc: DiscriminantForm,
    signature: Signature,
    dual: bool,
    /// √|A| in Z[ζ_M]
    sqrt_order: Cyclotomic<BigInt>,
}

impl WeilRep {
    pub fn new(l: &IntegerLattice) -> Result<Self, WeilError> {
        let g = l.gram();
        if (0..g.rows()).any(|i| g[(i, i)].is_odd()) {
            return Err(WeilError::NotEven);
        }
        let disc = DiscriminantForm::of(l)?;
        let signature = l.signature().map_err(DiscError::from)?;
        let (_, root) = disc.milgram()?;
        let sqrt_order = root.map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        });
        Ok(WeilRep {
            disc,
            signature,
            dual: false,
            sqrt_order,
        })
    }

    /// The dual representation ρ*, obtained by complex conjugation.
    pub fn dual(&self) -> Self {
        WeilRep {
            dual: !self.dual,
            ..self.clone()
        }
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    pub fn disc(&self) -> &DiscriminantForm {
        &self.disc
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        self.disc.field()
    }

    pub fn dim(&self) -> usize {
        self.disc.order() as usize
    }

    fn conductor(&self) -> i64 {
        self.field().conductor() as i64
    }

    fn maybe_conj(&self, x: Cyclotomic<BigInt>) -> Cyclotomic<BigInt> {
        if self.dual {
            x.conj()
        } else {
            x
        }
    }

    fn zeta(&self, k: i64) -> Cyclotomic<BigInt> {
        self.maybe_conj(Cyclotomic::zeta_pow(self.field(), k))
    }

    /// Exponent of σ∞ = e((b⁻−b⁺)/8) as a power of ζ_M.
    fn sigma_exp(&self) -> i64 {
        let sig = self.signature.b_minus as i64 - self.signature.b_plus as i64;
        sig * self.conductor() / 8
    }

    pub fn identity(&self) -> WeilMatrix {
        let n = self.dim();
        let f = self.field();
        WeilMatrix {
            entries: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { Cyclotomic::one(f) } else { Cyclotomic::zero(f) })
                        .collect()
                })
                .collect(),
            half_power: 0,
        }
    }

    pub fn rho_t(&self) -> WeilMatrix {
        self.rho_t_pow(1)
    }

    fn rho_t_pow(&self, s: i64) -> WeilMatrix {
        let mut m = self.identity();
        for (i, e) in self.disc.elements().iter().enumerate() {
            m.entries[i][i] = self.zeta(s * self.disc.q_exponent(e));
        }
        m
    }

    pub fn rho_s(&self) -> WeilMatrix {
        self.rho_s_signed(1)
    }

    /// ρ(S) for s = 1 and its inverse (the conjugate transpose) for s = −1.
    fn rho_s_signed(&self, s: i64) -> WeilMatrix {
        let els = self.disc.elements();
        let sigma = self.sigma_exp();
        let entries = els
            .iter()
            .map(|a| {
                els.iter()
                    .map(|b| self.zeta(s * (sigma - self.disc.bilinear_exponent(a, b))))
                    .collect()
            })
            .collect();
        WeilMatrix {
            entries,
            half_power: 1,
        }
    }

    pub fn rho_gen(&self, g: Gen) -> WeilMatrix {
        match g {
            Gen::T => self.rho_t_pow(1),
            Gen::TInv => self.rho_t_pow(-1),
            Gen::S => self.rho_s_signed(1),
            Gen::SInv => self.rho_s_signed(-1),
        }
    }

    pub fn rep_of_word(&self, word: &[Gen]) -> WeilMatrix {
        word.iter()
            .fold(self.identity(), |acc, g| self.mul(&acc, &self.rho_gen(*g)))
    }

    pub fn mul(&self, a: &WeilMatrix, b: &WeilMatrix) -> WeilMatrix {
        let n = a.entries.len();
        let f = self.field();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(Cyclotomic::zero(f), |acc, k| {
                            if a.entries[i][k].is_zero() || b.entries[k][j].is_zero() {
                                acc
                            } else {
                                acc.add(&a.entries[i][k].mul(&b.entries[k][j]))
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        self.reduce(WeilMatrix {
            entries,
            half_power: a.half_power + b.half_power,
        })
    }

    /// Pulls factors of |A| out of the entries.
    fn reduce(&self, mut m: WeilMatrix) -> WeilMatrix {
        let order = BigInt::from(self.disc.order());
        if order.is_one() {
            m.half_power = 0;
            return m;
        }
        while m.half_power >= 2
            && m
                .entries
                .iter()
                .flatten()
                .all(|c| c.coefficients().iter().all(|x| x.is_multiple_of(&order)))
        {
            for c in m.entries.iter_mut().flatten() {
                *c = c.map(|x| x / &order);
            }
            m.half_power -= 2;
        }
        m
    }

    /// Rewrites `m` with a larger `half_power` without changing its value.
    fn lift_to(&self, m: &WeilMatrix, p: u32) -> WeilMatrix {
        assert!(p >= m.half_power);
        let mut factor = Cyclotomic::one(self.field());
        for _ in 0..p - m.half_power {
            factor = factor.mul(&self.sqrt_order);
        }
        WeilMatrix {
            entries: m
                .entries
                .iter()
                .map(|row| row.iter().map(|c| c.mul(&factor)).collect())
                .collect(),
            half_power: p,
        }
    }

    pub fn matrices_equal(&self, a: &WeilMatrix, b: &WeilMatrix) -> bool {
        let p = a.half_power.max(b.half_power);
        let a = self.lift_to(a, p);
        let b = self.lift_to(b, p);
        a.entries == b.entries
    }

    pub fn to_complex(&self, m: &WeilMatrix) -> Vec<Vec<Complex64>> {
        let s = (self.disc.order() as f64).powf(-(m.half_power as f64) / 2.0);
        m.entries
            .iter()
            .map(|row| row.iter().map(|c| c.to_complex() * s).collect())
            .collect()
    }

    /// The action of Z = S²: e_μ ↦ e((b⁻−b⁺)/4)·e_{−μ}, conjugated for ρ*.
    pub fn rho_z_expected(&self) -> WeilMatrix {
        let els = self.disc.elements();
        let mut m = self.identity();
        let z = self.zeta(2 * self.sigma_exp());
        for (i, e) in els.iter().enumerate() {
            let j = self.disc.index(&self.disc.negate(e));
            m.entries[i][i] = Cyclotomic::zero(self.field());
            m.entries[j][i] = z.clone();
        }
        m
    }

    /// Whether Eisenstein series of weight k for this representation can be
    /// nonzero: 2k ≡ b⁻−b⁺ mod 4 for ρ*, and 2k ≡ b⁺−b⁻ mod 4 for ρ.
    pub fn parity_ok(&self, two_k: i64) -> bool {
        let sig = self.signature.b_minus as i64 - self.signature.b_plus as i64;
        let sig = if self.dual { sig } else { -sig };
        (two_k - sig).rem_euclid(4) == 0
    }
}

/// A 2×2 integer matrix of determinant one.
pub type Sl2 = [[i64; 2]; 2];

pub fn sl2_mul(a: &Sl2, b: &Sl2) -> Sl2 {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn gen_matrix(g: Gen) -> Sl2 {
    match g {
        Gen::T => [[1, 1], [0, 1]],
        Gen::TInv => [[1, -1], [0, 1]],
        Gen::S => [[0, -1], [1, 0]],
        Gen::SInv => [[0, 1], [-1, 0]],
    }
}

pub fn word_matrix(word: &[Gen]) -> Sl2 {
    word.iter()
        .fold([[1, 0], [0, 1]], |acc, g| sl2_mul(&acc, &gen_matrix(*g)))
}

/// A word in T^{±1}, S whose image in SL₂(Z) is `m`, found by the Euclidean
/// algorithm on the first column.
pub fn factor_sl2(m: &Sl2) -> Vec<Gen> {
    assert_eq!(m[0][0] * m[1][1] - m[0][1] * m[1][0], 1, "not in SL2(Z)");
    let mut word = Vec::new();
    let mut cur = *m;
    let push_t = |word: &mut Vec<Gen>, q: i64| {
        let g = if q >= 0 { Gen::T } else { Gen::TInv };
        word.extend(std::iter::repeat(g).take(q.unsigned_abs() as usize));
    };
    while cur[1][0] != 0 {
        // cur = T^q · cur' with 0 ≤ a − q·c < |c|, then cur' = S · cur''
        let q = Integer::div_floor(&cur[0][0], &cur[1][0]);
        push_t(&mut word, q);
        cur = [[cur[0][0] - q * cur[1][0], cur[0][1] - q * cur[1][1]], cur[1]];
        word.push(Gen::S);
        cur = sl2_mul(&gen_matrix(Gen::SInv), &cur);
    }
    if cur[0][0] == -1 {
        word.push(Gen::S);
        word.push(Gen::S);
        cur = sl2_mul(&[[-1, 0], [0, -1]], &cur);
    }
    debug_assert_eq!(cur[0][0], 1);
    push_t(&mut word, cur[0][1]);
    debug_assert_eq!(word_matrix(&word), *m);
    word
}

/// The metaplectic multiplier φ(τ) of the product of standard lifts
/// (T, 1), (S, √τ) along a word.
pub fn word_multiplier(word: &[Gen], tau: Complex64) -> Complex64 {
    let mut t = tau;
    let mut phi = Complex64::new(1.0, 0.0);
    for g in word.iter().rev() {
        match g {
            Gen::T => t += 1.0,
            Gen::TInv => t -= 1.0,
            Gen::S => {
                phi *= t.sqrt();
                t = -1.0 / t;
            }
            Gen::SInv => {
                t = -1.0 / t;
                phi /= t.sqrt();
            }
        }
    }
    phi
}

/// Coefficient estimates with an error radius.
#[derive(Debug, Clone)]
pub struct NumericCoefficient {
    pub m: Rational,
    pub mu: DiscElement,
    pub value: f64,
    pub error: f64,
}

impl NumericCoefficient {
    pub fn to_bigfloat(&self, prec: u32) -> BigFloat {
        BigFloat::from_f64(self.value, self.error, prec)
    }

    pub fn contains(&self, r: &Rational) -> bool {
        (to_f64(r) - self.value).abs() <= self.error
    }
}

#[derive(Debug, Clone)]
pub struct NumericOptions {
    pub cutoff: i64,
    pub height: f64,
    /// samples on the horocycle; `None` picks 8·level·(max m + 1)
    pub samples: Option<usize>,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            cutoff: 100,
            height: 1.0,
            samples: None,
        }
    }
}

/// Approximates c_{m,μ} of the Eisenstein series of weight k (given as 2k)
/// for the dual Weil representation by summing the defining series over
/// coprime (c, d) with max(|c|,|d|) ≤ cutoff.
pub fn numeric_eisenstein(
    w: &WeilRep,
    two_k: i64,
    indices: &[(Rational, DiscElement)],
    opts: &NumericOptions,
) -> Result<Vec<NumericCoefficient>, WeilError> {
    if two_k <= 4 {
        return Err(WeilError::NonConvergent(format!("{two_k}/2")));
    }
    let rho = w.dual();
    let disc = rho.disc();
    let n = rho.dim();
    let k = two_k as f64 / 2.0;
    let supported = |m: &Rational, mu: &DiscElement| {
        !m.is_negative() && disc.is_valid(mu) && (disc.q(mu).value() + m).is_integer()
    };
    if !rho.parity_ok(two_k) {
        return Ok(indices
            .iter()
            .map(|(m, mu)| NumericCoefficient {
                m: m.clone(),
                mu: mu.clone(),
                value: 0.0,
                error: 0.0,
            })
            .collect());
    }

    // one representative per (c, d) with c > 0: its word, multiplier sign
    // and the vector ρ*(M)⁻¹e₀
    let tau0 = Complex64::new(0.0, 1.0);
    // inverses of ρ*(T), ρ*(T⁻¹), ρ*(S)
    let t_inv = rho.to_complex(&rho.rho_gen(Gen::TInv));
    let t = rho.to_complex(&rho.rho_gen(Gen::T));
    let s_inv = rho.to_complex(&rho.rho_gen(Gen::SInv));
    let cut = opts.cutoff;
    let mut reps: Vec<(i64, i64, Complex64, Vec<Complex64>)> = Vec::new();
    for c in 1..=cut {
        for d in -cut..=cut {
            if c.gcd(&d) != 1 {
                continue;
            }
            // a·d − b·c = 1
            let (g, x, _) = ext_gcd(d, c);
            debug_assert_eq!(g, 1);
            let a = x;
            let b = (a * d - 1) / c;
            let m = [[a, b], [c, d]];
            let word = factor_sl2(&m);
            let phi = word_multiplier(&word, tau0);
            let principal = (Complex64::new(d as f64, 0.0) + tau0 * c as f64).sqrt();
            let eps = (phi / principal).re.signum();
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[0] = Complex64::new(1.0, 0.0);
            for g in &word {
                let inv = match g {
                    Gen::T => &t_inv,
                    Gen::TInv => &t,
                    Gen::S => &s_inv,
                    Gen::SInv => unreachable!("factor_sl2 only emits T, T⁻¹, S"),
                };
                v = apply(inv, &v);
            }
            reps.push((c, d, Complex64::new(eps, 0.0), v));
        }
    }

    let max_m = indices
        .iter()
        .map(|(m, _)| to_f64(m))
        .fold(0.0f64, f64::max);
    let samples = opts
        .samples
        .unwrap_or(8 * disc.level() as usize * (max_m.ceil() as usize + 1));
    let y = opts.height;
    let values: Vec<Vec<Complex64>> = (0..samples)
        .into_par_iter()
        .map(|j| {
            let tau = Complex64::new(j as f64 / samples as f64, y);
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            acc[0] += 1.0;
            for (c, d, eps, v) in &reps {
                let s = eps * (tau * *c as f64 + *d as f64).sqrt();
                let f = s.powf(-2.0 * k);
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += f * b;
                }
            }
            acc
        })
        .collect();

    // tail: each (c,d) with max(|c|,|d|) = R has |cτ+d| ≥ R·min(y,1)/2, and
    // there are at most 4R such pairs with c > 0
    let r0 = cut as f64;
    let h = y.min(1.0) / 2.0;
    let tail = h.powf(-k) * (4.0 * r0.powf(2.0 - k) / (k - 2.0) + r0.powf(1.0 - k) / (k - 1.0));
    let rounding = reps.len() as f64 * 1e-15;

    Ok(indices
        .iter()
        .map(|(m, mu)| {
            if !supported(m, mu) {
                return NumericCoefficient {
                    m: m.clone(),
                    mu: mu.clone(),
                    value: 0.0,
                    error: 0.0,
                };
            }
            let i = disc.index(mu);
            let mf = to_f64(m);
            let mut s = Complex64::new(0.0, 0.0);
            for (j, row) in values.iter().enumerate() {
                let x = j as f64 / samples as f64;
                let ph = Complex64::from_polar(1.0, -std::f64::consts::TAU * mf * x);
                s += row[i] * ph;
            }
            let growth = (std::f64::consts::TAU * mf * y).exp();
            let value = s.re / samples as f64 * growth;
            NumericCoefficient {
                m: m.clone(),
                mu: mu.clone(),
                value,
                error: (tail + rounding) * growth * (1.0 + value.abs()),
            }
        })
        .collect())
}

fn apply(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    (e.gcd, e.x, e.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn catalog() -> Vec<IntegerLattice> {
        let mut v = vec![
            IntegerLattice::u(),
            IntegerLattice::a(2),
            IntegerLattice::e(6),
            IntegerLattice::e(7),
            IntegerLattice::e(8),
            IntegerLattice::d(4),
            IntegerLattice::lambda_cubic(),
        ];
        for l in v.clone() {
            v.push(l.rescale(-1));
        }
        for d in 1..=6 {
            v.push(IntegerLattice::lambda_2d(d));
        }
        v
    }

    #[test]
    fn trivial_group() {
        let w = WeilRep::new(&IntegerLattice::e(8)).unwrap();
        let s = w.rho_s();
        assert!(w.matrices_equal(&s, &w.identity()));
        assert!(w.matrices_equal(&w.rho_t(), &w.identity()));
    }

    #[test]
    fn lambda2_t_matrix() {
        let w = WeilRep::new(&IntegerLattice::lambda_2d(1)).unwrap();
        let t = w.to_complex(&w.rho_t());
        assert!((t[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((t[1][1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn generator_relations_exact() {
        for l in catalog() {
            for w in [WeilRep::new(&l).unwrap(), WeilRep::new(&l).unwrap().dual()] {
                let st = w.rep_of_word(&[Gen::S, Gen::T]);
                let st3 = w.mul(&w.mul(&st, &st), &st);
                let s2 = w.rep_of_word(&[Gen::S, Gen::S]);
                assert!(w.matrices_equal(&st3, &s2), "{l:?}");
                assert!(w.matrices_equal(&s2, &w.rho_z_expected()), "{l:?}");
                // S symmetric
                let s = w.rho_s();
                for i in 0..w.dim() {
                    for j in 0..w.dim() {
                        assert_eq!(s.entries[i][j], s.entries[j][i]);
                    }
                }
                // unitarity: S·S⁻¹ = 1 and rows of |S|² sum to 1
                assert!(w.matrices_equal(&w.rep_of_word(&[Gen::S, Gen::SInv]), &w.identity()));
                assert!(w.matrices_equal(&w.rep_of_word(&[Gen::TInv, Gen::T]), &w.identity()));
                for row in &s.entries {
                    let f = w.field();
                    let sum = row
                        .iter()
                        .fold(Cyclotomic::zero(f), |acc, c| acc.add(&c.mul(&c.conj())));
                    let want = BigInt::from(w.disc().order()).pow(s.half_power);
                    assert_eq!(sum, Cyclotomic::from_scalar(f, want));
                }
                // Z has order 4 (order 2 when 2·sig ≡ 0 mod 4)
                let z4 = w.rep_of_word(&[Gen::S; 8]);
                assert!(w.matrices_equal(&z4, &w.identity()));
            }
        }
    }

    #[test]
    fn empty_word_is_identity() {
        let w = WeilRep::new(&IntegerLattice::lambda_2d(3)).unwrap();
        assert!(w.matrices_equal(&w.rep_of_word(&[]), &w.identity()));
    }

    #[test]
    fn milgram_root_is_positive() {
        for l in catalog() {
            let w = WeilRep::new(&l).unwrap();
            let r = w.sqrt_order.to_complex();
            assert!((r.re - (w.disc().order() as f64).sqrt()).abs() < 1e-9);
            assert!(r.im.abs() < 1e-9);
        }
    }

    fn gen_strategy() -> impl Strategy<Value = Gen> {
        prop_oneof![Just(Gen::T), Just(Gen::TInv), Just(Gen::S), Just(Gen::SInv)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn factorization_reproduces_matrix(word in proptest::collection::vec(gen_strategy(), 0..12)) {
            let m = word_matrix(&word);
            let f = factor_sl2(&m);
            prop_assert_eq!(word_matrix(&f), m);
        }

        /// Two words for the same element of Mp₂(Z) act identically. The
        /// metaplectic multipliers at τ = i decide whether the lifts agree.
        #[test]
        fn two_factorizations_agree(word in proptest::collection::vec(gen_strategy(), 0..10)) {
            let w = WeilRep::new(&IntegerLattice::lambda_2d(2)).unwrap();
            let m = word_matrix(&word);
            let f = factor_sl2(&m);
            let tau = Complex64::new(0.3, 1.1);
            let p1 = word_multiplier(&word, tau);
            let p2 = word_multiplier(&f, tau);
            let a = w.rep_of_word(&word);
            let b = w.rep_of_word(&f);
            if (p1 - p2).norm() < 1e-9 {
                prop_assert!(w.matrices_equal(&a, &b));
            } else {
                // the lifts differ by Z² = (I, −1), which acts by e((b⁻−b⁺)/2)
                prop_assert!((p1 + p2).norm() < 1e-9);
                let z2 = w.rep_of_word(&[Gen::S; 4]);
                prop_assert!(w.matrices_equal(&w.mul(&a, &z2), &b));
            }
        }
    }

    #[test]
    fn numeric_eisenstein_lambda6() {
        let l = IntegerLattice::lambda_2d(3);
        let w = WeilRep::new(&l).unwrap();
        let d = w.disc();
        let mut ell = vec![Rational::zero(); 21];
        ell[20] = rat(1, 6);
        let two_ell = d.scale(&d.element_of(&ell).unwrap(), 2);
        let idx = vec![
            (rat(0, 1), d.zero()),
            (rat(1, 3), two_ell.clone()),
            (rat(1, 2), two_ell.clone()),
            (rat(4, 3), two_ell),
        ];
        let opts = NumericOptions {
            cutoff: 40,
            ..Default::default()
        };
        let out = numeric_eisenstein(&w, 21, &idx, &opts).unwrap();
        assert!(out[0].contains(&rat(1, 1)), "{:?}", out[0]);
        assert!(out[1].contains(&rat(-523777, 206215591)), "{:?}", out[1]);
        assert_eq!(out[2].value, 0.0);
        assert!(out[3].contains(&rat(-274609995265, 206215591)), "{:?}", out[3]);
        assert!(out[1].error < 1e-6);
    }

    #[test]
    fn low_weight_rejected() {
        let w = WeilRep::new(&IntegerLattice::lambda_2d(1)).unwrap();
        assert!(matches!(
            numeric_eisenstein(&w, 4, &[], &NumericOptions::default()),
            Err(WeilError::NonConvergent(_))
        ));
    }
}
