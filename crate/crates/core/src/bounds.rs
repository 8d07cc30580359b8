//! Vanishing bounds for genus-g Fourier coefficients: slope constants, the
//! constants C_{i,g}(k), successive minima of small Gram matrices and the
//! finite index sets S_{k,g,Λ}.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{ceil, common_denominator, floor, frac, Rational};
use crate::discform::{DiscElement, DiscError, DiscriminantForm};
use crate::lattice::enumerate::lll_reduce;
use crate::lattice::{hermite_normal_form, IntMatrix, IntegerLattice};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundsError {
    #[error("slope table has no entry for genus {0}")]
    MissingSlopeEntry(u32),
    #[error("need 1 <= i <= g, got i = {i}, g = {g}")]
    BadIndex { i: u32, g: u32 },
    #[error("weight {k} is below (i-1)/2 = {min}")]
    WeightTooSmall { k: String, min: String },
    #[error("the slope of genus 1 is fixed at 12")]
    FixedSlope,
    #[error("enumeration would visit {predicted} points (budget {budget})")]
    EnumerationBudgetExceeded { predicted: u64, budget: u64 },
    #[error("genus {0} is not supported")]
    GenusNotSupported(u32),
    #[error("matrix is not symmetric positive semi-definite")]
    NotSemidefinite,
    #[error(transparent)]
    Disc(#[from] DiscError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlopeProvenance {
    Paper,
    Config,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeEntry {
    #[serde(with = "crate::arith::ser::rational")]
    pub value: Rational,
    pub provenance: SlopeProvenance,
}

/// Slopes s_g of Siegel modular forms, keyed by genus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeTable {
    pub version: u32,
    pub entries: BTreeMap<u32, SlopeEntry>,
}

pub const SLOPE_TABLE_VERSION: u32 = 1;

impl Default for SlopeTable {
    /// s₁ = 12; s₂ = 10 and s₃ = 9 as configuration.
    fn default() -> Self {
        let mut entries = BTreeMap::new();
        let e = |v: i64, provenance| SlopeEntry {
            value: Rational::from_integer(BigInt::from(v)),
            provenance,
        };
        entries.insert(1, e(12, SlopeProvenance::Paper));
        entries.insert(2, e(10, SlopeProvenance::Config));
        entries.insert(3, e(9, SlopeProvenance::Config));
        SlopeTable {
            version: SLOPE_TABLE_VERSION,
            entries,
        }
    }
}

impl SlopeTable {
    pub fn get(&self, g: u32) -> Result<&Rational, BoundsError> {
        self.entries
            .get(&g)
            .map(|e| &e.value)
            .ok_or(BoundsError::MissingSlopeEntry(g))
    }

    pub fn set(&mut self, g: u32, value: Rational) -> Result<(), BoundsError> {
        if g == 1 {
            return Err(BoundsError::FixedSlope);
        }
        self.entries.insert(
            g,
            SlopeEntry {
                value,
                provenance: SlopeProvenance::Config,
            },
        );
        Ok(())
    }
}

/// C_{i,g}(k) from the recursion together with the explicit bound
/// Σ_{j<i} (k − j/2)/s_{g−j}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CBound {
    #[serde(with = "crate::arith::ser::rational")]
    pub value: Rational,
    #[serde(with = "crate::arith::ser::rational")]
    pub closed_form: Rational,
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

fn recursion(i: u32, g: u32, k: &Rational, t: &SlopeTable) -> Result<Rational, BoundsError> {
    let c1 = k / t.get(g)?;
    if i == 1 {
        return Ok(c1);
    }
    let prev = recursion(i - 1, g - 1, &(k - half()), t)?;
    let quarter = &c1 / Rational::from_integer(BigInt::from(4));
    Ok(c1.max(prev + quarter))
}

/// C_{i,g}(k) for k ≥ (i − 1)/2, where the explicit bound dominates.
pub fn c_bound(i: u32, g: u32, k: &Rational, table: &SlopeTable) -> Result<CBound, BoundsError> {
    if i == 0 || i > g {
        return Err(BoundsError::BadIndex { i, g });
    }
    let min = Rational::new(BigInt::from(i - 1), BigInt::from(2));
    if k < &min {
        return Err(BoundsError::WeightTooSmall {
            k: k.to_string(),
            min: min.to_string(),
        });
    }
    let value = recursion(i, g, k, table)?;
    let mut closed_form = Rational::zero();
    for j in 0..i {
        let jj = Rational::new(BigInt::from(j), BigInt::from(2));
        closed_form += (k - jj) / table.get(g - j)?;
    }
    assert!(value <= closed_form, "C_{{{i},{g}}}({k}) = {value} exceeds {closed_form}");
    Ok(CBound { value, closed_form })
}

/// Rows of a rational matrix scaled to integers: (D·T, D).
fn integral(t: &[Vec<Rational>]) -> (IntMatrix, BigInt) {
    let den = common_denominator(t.iter().flatten());
    let dr = Rational::from_integer(den.clone());
    let rows: Vec<Vec<BigInt>> = t
        .iter()
        .map(|r| r.iter().map(|x| (x * &dr).to_integer()).collect())
        .collect();
    (IntMatrix::from_rows(&rows), den)
}

fn value(t: &IntMatrix, v: &[i64]) -> BigInt {
    let n = v.len();
    let mut s = BigInt::zero();
    for i in 0..n {
        for j in 0..n {
            s += &t[(i, j)] * v[i] * v[j];
        }
    }
    s
}

fn rank_of(vs: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Rational>> = vs
        .iter()
        .map(|v| v.iter().map(|x| Rational::from_integer(BigInt::from(*x))).collect())
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

pub const MINIMA_BUDGET: u64 = 20_000_000;

/// λ₁ ≤ … ≤ λ_g of a positive semi-definite rational matrix (g ≤ 3): the
/// smallest values reached by i linearly independent integer vectors.
pub fn successive_minima(t: &[Vec<Rational>]) -> Result<Vec<Rational>, BoundsError> {
    let g = t.len();
    if g == 0 || g > 3 {
        return Err(BoundsError::GenusNotSupported(g as u32));
    }
    if t.iter().any(|r| r.len() != g) || (0..g).any(|i| (0..g).any(|j| t[i][j] != t[j][i])) {
        return Err(BoundsError::NotSemidefinite);
    }
    let (ti, den) = integral(t);
    // rows of U with U·T = H; zero rows of H span the kernel
    let (h, u) = hermite_normal_form(&ti.transpose());
    let live: Vec<usize> = (0..g).filter(|&r| h.row(r).iter().any(|x| !x.is_zero())).collect();
    let kernel_dim = g - live.len();
    let ty = u.mul(&ti).mul(&u.transpose());
    let n = live.len();
    let mut tp = IntMatrix::zeros(n, n);
    for (a, &i) in live.iter().enumerate() {
        for (b, &j) in live.iter().enumerate() {
            tp[(a, b)] = ty[(i, j)].clone();
        }
    }
    let minors = tp.leading_minors();
    if minors.iter().any(|m| !m.is_positive()) {
        return Err(BoundsError::NotSemidefinite);
    }
    let r = lll_reduce(&tp);
    let tp = r.transpose().mul(&tp).mul(&r);
    let scale = Rational::from_integer(den);
    let mut out = vec![Rational::zero(); kernel_dim];
    if n == 0 {
        return Ok(out);
    }
    let bound = (0..n).map(|i| tp[(i, i)].clone()).max().unwrap();
    let inv = tp.inverse_rational().expect("definite");
    let b = Rational::from_integer(bound.clone());
    let radii: Vec<i64> = (0..n)
        .map(|i| floor(&(&b * &inv[i][i])).sqrt().to_i64().expect("small radius"))
        .collect();
    let predicted: u64 = radii.iter().map(|r| 2 * *r as u64 + 1).product();
    if predicted > MINIMA_BUDGET {
        return Err(BoundsError::EnumerationBudgetExceeded {
            predicted,
            budget: MINIMA_BUDGET,
        });
    }
    let mut pts: Vec<(BigInt, Vec<i64>)> = vec![];
    let mut v = vec![0i64; n];
    fn walk(i: usize, v: &mut Vec<i64>, radii: &[i64], tp: &IntMatrix, bound: &BigInt, pts: &mut Vec<(BigInt, Vec<i64>)>) {
        if i == v.len() {
            if v.iter().all(|x| *x == 0) {
                return;
            }
            let q = value(tp, v);
            if &q <= bound {
                pts.push((q, v.clone()));
            }
            return;
        }
        for x in -radii[i]..=radii[i] {
            v[i] = x;
            walk(i + 1, v, radii, tp, bound, pts);
        }
    }
    walk(0, &mut v, &radii, &tp, &bound, &mut pts);
    pts.sort();
    let mut chosen: Vec<Vec<i64>> = vec![];
    for (q, p) in pts {
        chosen.push(p);
        if rank_of(&chosen) < chosen.len() {
            chosen.pop();
            continue;
        }
        out.push(Rational::from_integer(q) / &scale);
        if chosen.len() == n {
            break;
        }
    }
    debug_assert_eq!(out.len(), g);
    Ok(out)
}

/// (T, μ̲): a half-integral Gram matrix with cosets, indexing a special cycle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GenusGIndex {
    #[serde(serialize_with = "ser_matrix")]
    pub t: Vec<Vec<Rational>>,
    pub mu: Vec<DiscElement>,
}

fn ser_matrix<S: serde::Serializer>(t: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = t.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    rows.serialize(s)
}

/// Exponents x ≡ offset mod `step` with lo ≤ x ≤ hi.
fn in_class(offset: &Rational, step: &Rational, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut out = vec![];
    let start = ceil(&((lo - offset) / step));
    let mut x = offset + Rational::from_integer(start) * step;
    while &x <= hi {
        out.push(x.clone());
        x += step;
    }
    out
}

/// A 2×2 integer matrix acting by T ↦ AᵀTA and μ̲ ↦ μ̲A.
type Mat2 = [[i64; 2]; 2];

fn act(d: &DiscriminantForm, a: &Mat2, t: &[Vec<Rational>], mu: &[DiscElement]) -> (Vec<Vec<Rational>>, Vec<DiscElement>) {
    let r = |x: i64| Rational::from_integer(BigInt::from(x));
    let mut out = vec![vec![Rational::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut s = Rational::zero();
            for p in 0..2 {
                for q in 0..2 {
                    s += r(a[p][i]) * &t[p][q] * r(a[q][j]);
                }
            }
            out[i][j] = s;
        }
    }
    let nm = (0..2)
        .map(|j| d.add(&d.scale(&mu[0], a[0][j]), &d.scale(&mu[1], a[1][j])))
        .collect();
    (out, nm)
}

fn is_reduced(t: &[Vec<Rational>]) -> bool {
    let two_b = &t[0][1] * Rational::from_integer(BigInt::from(2));
    !t[0][1].is_negative() && two_b <= t[0][0] && t[0][0] <= t[1][1]
}

/// GL₂(Z) generators: S, the translation, and a reflection.
const GENERATORS: [Mat2; 4] = [[[0, -1], [1, 0]], [[1, 1], [0, 1]], [[1, -1], [0, 1]], [[1, 0], [0, -1]]];

/// Orbit of μ̲ under the given matrices (closure under composition).
fn mu_orbit(d: &DiscriminantForm, t: &[Vec<Rational>], mu: &[DiscElement], gens: &[Mat2]) -> BTreeSet<Vec<DiscElement>> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![mu.to_vec()];
    seen.insert(mu.to_vec());
    while let Some(m) = stack.pop() {
        for a in gens {
            let (_, nm) = act(d, a, t, &m);
            if seen.insert(nm.clone()) {
                stack.push(nm);
            }
        }
    }
    seen
}

fn unimodular_small() -> Vec<Mat2> {
    let mut out = vec![];
    for a in -2..=2 {
        for b in -2..=2 {
            for c in -2..=2 {
                for e in -2..=2i64 {
                    if (a * e - b * c).abs() == 1 {
                        out.push([[a, b], [c, e]]);
                    }
                }
            }
        }
    }
    out
}

/// The least (T, μ̲) among reduced forms equivalent to a reduced (T, μ̲).
fn canonical(d: &DiscriminantForm, t: &[Vec<Rational>], mu: &[DiscElement], small: &[Mat2]) -> GenusGIndex {
    let mk = |t: Vec<Vec<Rational>>, mu: Vec<DiscElement>| GenusGIndex { t, mu };
    let key = |g: &GenusGIndex| (g.t[0][0].clone(), g.t[0][1].clone(), g.t[1][1].clone(), g.mu.clone());
    if t[0][0].is_positive() {
        small
            .iter()
            .map(|a| act(d, a, t, mu))
            .filter(|(nt, _)| is_reduced(nt))
            .map(|(nt, nm)| mk(nt, nm))
            .min_by_key(key)
            .expect("identity is among the candidates")
    } else {
        // T = diag(0, c): the stabilizer is upper triangular; T = 0: all of GL₂(Z)
        let gens: Vec<Mat2> = if t[1][1].is_positive() {
            vec![[[1, 1], [0, 1]], [[-1, 0], [0, 1]], [[1, 0], [0, -1]]]
        } else {
            GENERATORS.to_vec()
        };
        let m = mu_orbit(d, t, mu, &gens).into_iter().next().expect("nonempty");
        mk(t.to_vec(), m)
    }
}

/// Representatives of S_{k,g,Λ}: (T, μ̲) with λ_i(T) ≤ C_{i,g}(k), up to
/// GL_g(Z) (g = 1: up to sign).
pub fn enumerate_s(k: &Rational, g: u32, l: &IntegerLattice, table: &SlopeTable) -> Result<Vec<GenusGIndex>, BoundsError> {
    let d = DiscriminantForm::of(l)?;
    match g {
        1 => {
            let c1 = c_bound(1, 1, k, table)?.value;
            let mut out = vec![];
            for mu in d.elements() {
                if d.canonical_pm(&mu) != mu {
                    continue;
                }
                let off = frac(&-d.q(&mu).into_value());
                for m in in_class(&off, &Rational::one(), &Rational::zero(), &c1) {
                    out.push(GenusGIndex {
                        t: vec![vec![m]],
                        mu: vec![mu.clone()],
                    });
                }
            }
            out.sort();
            Ok(out)
        }
        2 => enumerate_genus2(&d, &c_bound(1, 2, k, table)?.value, &c_bound(2, 2, k, table)?.value),
        _ => Err(BoundsError::GenusNotSupported(g)),
    }
}

/// Reduced (T, μ̲) with a ≤ c1, c ≤ c2, one per GL₂(Z)-orbit.
pub fn enumerate_genus2(d: &DiscriminantForm, c1: &Rational, c2: &Rational) -> Result<Vec<GenusGIndex>, BoundsError> {
    let els = d.elements();
    let one = Rational::one();
    let halfr = half();
    let small = unimodular_small();
    let pairs: Vec<(DiscElement, DiscElement)> = els
        .iter()
        .flat_map(|a| els.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let found: Vec<Vec<GenusGIndex>> = pairs
        .par_iter()
        .map(|(m1, m2)| {
            let mut out = vec![];
            let oa = frac(&-d.q(m1).into_value());
            let oc = frac(&-d.q(m2).into_value());
            let ob = frac(&-d.bilinear(m1, m2).into_value()) * &halfr;
            for a in in_class(&oa, &one, &Rational::zero(), c1) {
                for c in in_class(&oc, &one, &a, c2) {
                    for b in in_class(&ob, &halfr, &Rational::zero(), &(&a * &halfr)) {
                        let t = vec![vec![a.clone(), b.clone()], vec![b, c.clone()]];
                        let mu = vec![m1.clone(), m2.clone()];
                        let canon = canonical(d, &t, &mu, &small);
                        if canon.t == t && canon.mu == mu {
                            out.push(canon);
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut out: Vec<GenusGIndex> = found.into_iter().flatten().collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Brute-force orbit count: all (T, μ̲) with congruences, entries in a box,
/// λ₁ ≤ c1 and λ₂ ≤ c2, grouped into GL₂(Z)-orbits by union-find along
/// generator moves inside the box. Returns one orbit label per member.
pub fn brute_force_orbits(
    d: &DiscriminantForm,
    c1: &Rational,
    c2: &Rational,
    box_bound: &Rational,
) -> Result<Vec<(GenusGIndex, usize)>, BoundsError> {
    let els = d.elements();
    let one = Rational::one();
    let halfr = half();
    let mut members: Vec<GenusGIndex> = vec![];
    for m1 in &els {
        for m2 in &els {
            let oa = frac(&-d.q(m1).into_value());
            let oc = frac(&-d.q(m2).into_value());
            let ob = frac(&-d.bilinear(m1, m2).into_value()) * &halfr;
            for a in in_class(&oa, &one, &Rational::zero(), box_bound) {
                for c in in_class(&oc, &one, &Rational::zero(), box_bound) {
                    for b in in_class(&ob, &halfr, &-box_bound.clone(), box_bound) {
                        if &a * &c < &b * &b {
                            continue;
                        }
                        let t = vec![vec![a.clone(), b.clone()], vec![b, c.clone()]];
                        let lam = successive_minima(&t)?;
                        if &lam[0] <= c1 && &lam[1] <= c2 {
                            members.push(GenusGIndex {
                                t,
                                mu: vec![m1.clone(), m2.clone()],
                            });
                        }
                    }
                }
            }
        }
    }
    let index: BTreeMap<GenusGIndex, usize> = members.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for (i, g) in members.iter().enumerate() {
        for a in GENERATORS.iter() {
            let (nt, nm) = act(d, a, &g.t, &g.mu);
            if let Some(&j) = index.get(&GenusGIndex { t: nt, mu: nm }) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let labels: Vec<usize> = (0..members.len()).map(|i| find(&mut parent, i)).collect();
    Ok(members.into_iter().zip(labels).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|x| int(*x)).collect()).collect()
    }

    #[test]
    fn c_bound_examples() {
        let t = SlopeTable::default();
        for k in [rat(1, 2), int(7), rat(21, 2)] {
            let c = c_bound(1, 1, &k, &t).unwrap();
            assert_eq!(c.value, &k / int(12));
            assert_eq!(c.closed_form, &k / int(12));
            let c = c_bound(2, 2, &k, &t).unwrap();
            let want = (&k / int(10)).max((&k - rat(1, 2)) / int(12) + &k / int(40));
            assert_eq!(c.value, want);
        }
        assert!(matches!(c_bound(3, 3, &rat(1, 2), &t), Err(BoundsError::WeightTooSmall { .. })));
        assert!(matches!(c_bound(2, 1, &int(3), &t), Err(BoundsError::BadIndex { .. })));
        assert!(matches!(c_bound(1, 4, &int(3), &t), Err(BoundsError::MissingSlopeEntry(4))));
        let mut t2 = t.clone();
        assert_eq!(t2.set(1, int(11)), Err(BoundsError::FixedSlope));
        t2.set(4, rat(17, 2)).unwrap();
        assert!(c_bound(4, 4, &int(5), &t2).is_ok());
    }

    #[test]
    fn recursion_below_closed_form_on_grid() {
        let t = SlopeTable::default();
        for g in 1..=3u32 {
            for i in 1..=g {
                for twice_k in (i as i64 - 1).max(1)..=60 {
                    let k = rat(twice_k, 2);
                    let c = c_bound(i, g, &k, &t).unwrap();
                    assert!(c.value <= c.closed_form);
                }
            }
        }
    }

    #[test]
    fn minima_examples() {
        assert_eq!(successive_minima(&m(&[&[1, 0], &[0, 1]])).unwrap(), vec![int(1), int(1)]);
        assert_eq!(successive_minima(&m(&[&[2, 1], &[1, 2]])).unwrap(), vec![int(2), int(2)]);
        assert_eq!(successive_minima(&m(&[&[0, 0], &[0, 3]])).unwrap(), vec![int(0), int(3)]);
        assert_eq!(successive_minima(&m(&[&[1, 1], &[1, 1]])).unwrap(), vec![int(0), int(1)]);
        assert_eq!(
            successive_minima(&m(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])).unwrap(),
            vec![int(2), int(2), int(2)]
        );
        assert_eq!(successive_minima(&m(&[&[1, 2], &[2, 1]])), Err(BoundsError::NotSemidefinite));
        // a skewed basis of diag(1, 5): minima still (1, 5)
        assert_eq!(successive_minima(&m(&[&[1, 3], &[3, 14]])).unwrap(), vec![int(1), int(5)]);
        assert_eq!(
            successive_minima(&vec![vec![rat(1, 3), rat(1, 6)], vec![rat(1, 6), rat(1, 3)]]).unwrap(),
            vec![rat(1, 3), rat(1, 3)]
        );
    }

    fn random_unimodular(rng: &mut ChaCha8Rng, g: usize) -> Vec<Vec<i64>> {
        let mut a: Vec<Vec<i64>> = (0..g).map(|i| (0..g).map(|j| (i == j) as i64).collect()).collect();
        for _ in 0..6 {
            let i = rng.gen_range(0..g);
            let j = rng.gen_range(0..g);
            if i == j {
                for r in a.iter_mut() {
                    r[i] = -r[i];
                }
                continue;
            }
            let f = rng.gen_range(-2..=2);
            for r in a.iter_mut() {
                r[j] += f * r[i];
            }
        }
        a
    }

    #[test]
    fn minima_are_gl_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let g = rng.gen_range(1..=3usize);
            // T = BᵀB + semidefinite noise keeps it positive semi-definite
            let b: Vec<Vec<i64>> = (0..g).map(|_| (0..g).map(|_| rng.gen_range(-2..=2)).collect()).collect();
            let t: Vec<Vec<Rational>> = (0..g)
                .map(|i| (0..g).map(|j| int((0..g).map(|r| b[r][i] * b[r][j]).sum())).collect())
                .collect();
            let a = random_unimodular(&mut rng, g);
            let ta: Vec<Vec<Rational>> = (0..g)
                .map(|i| {
                    (0..g)
                        .map(|j| {
                            let mut s = Rational::zero();
                            for p in 0..g {
                                for q in 0..g {
                                    s += int(a[p][i]) * &t[p][q] * int(a[q][j]);
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect();
            assert_eq!(successive_minima(&t).unwrap(), successive_minima(&ta).unwrap(), "{t:?}");
        }
    }

    #[test]
    fn genus_one_for_lambda_2d() {
        let t = SlopeTable::default();
        let l = IntegerLattice::lambda_2d(1);
        let s = enumerate_s(&rat(21, 2), 1, &l, &t).unwrap();
        let ms: Vec<Rational> = s.iter().map(|g| g.t[0][0].clone()).collect();
        assert_eq!(ms, vec![int(0), rat(1, 4)]);
        assert_eq!(c_bound(1, 1, &rat(21, 2), &t).unwrap().value, rat(21, 24));
    }

    #[test]
    fn genus_two_matches_orbit_oracle() {
        let toy = IntegerLattice::direct_sum(&[IntegerLattice::u(), IntegerLattice::u(), IntegerLattice::a(2).rescale(-1)]);
        let d = DiscriminantForm::of(&toy).unwrap();
        let t = SlopeTable::default();
        for k in [int(6), int(12)] {
            let c1 = c_bound(1, 2, &k, &t).unwrap().value;
            let c2 = c_bound(2, 2, &k, &t).unwrap().value;
            let reps = enumerate_s(&k, 2, &toy, &t).unwrap();
            let oracle = brute_force_orbits(&d, &c1, &c2, &(&c2 + int(1))).unwrap();
            let labels: BTreeMap<GenusGIndex, usize> = oracle.iter().cloned().collect();
            let orbits: BTreeSet<usize> = labels.values().cloned().collect();
            let rep_orbits: Vec<usize> = reps.iter().map(|r| labels[r]).collect();
            let distinct: BTreeSet<usize> = rep_orbits.iter().cloned().collect();
            assert_eq!(distinct.len(), reps.len(), "k = {k}: two representatives share an orbit");
            assert_eq!(orbits.len(), reps.len(), "k = {k}: an orbit has no representative");
            assert!(reps.len() > 2);
        }
    }
}
