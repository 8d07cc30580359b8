//! Local representation densities at a single prime.
//!
//! The lattice is split over Z_(p) into orthogonal blocks of size one (two at
//! p = 2 when needed), the coset shift is carried along, and the number of
//! solutions of q(x) + n ≡ 0 mod p^a is obtained by convolving the value
//! distributions of the blocks.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::primes::valuation_rat;
use crate::arith::{ser, Rational};
use crate::lattice::IntMatrix;

/// Highest exponent tried before giving up on stabilization.
pub const MAX_EXPONENT: u32 = 48;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDensity {
    pub p: u64,
    #[serde(with = "ser::rational")]
    pub value: Rational,
    pub stabilized_at: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DensityError {
    #[error("density at p = {p} did not stabilize below exponent {cap}")]
    NoStabilization { p: u64, cap: u32 },
    #[error("residue modulus {p}^{exp} is too large")]
    ModulusTooLarge { p: u64, exp: u32 },
    #[error("q(x) + m is not integral on the coset")]
    NotIntegral,
}

#[derive(Debug, Clone)]
struct Block {
    gram: Vec<Vec<Rational>>,
    shift: Vec<Rational>,
}

/// e_a ← e_a + c·e_b, acting on the Gram matrix and on coordinates.
fn add_basis(g: &mut [Vec<Rational>], y: &mut [Rational], a: usize, b: usize, c: &Rational) {
    if c.is_zero() {
        return;
    }
    let n = g.len();
    for k in 0..n {
        let t = &g[b][k] * c;
        g[a][k] += t;
    }
    for k in 0..n {
        let t = &g[k][b] * c;
        g[k][a] += t;
    }
    let t = &y[a] * c;
    y[b] -= t;
}

fn val(r: &Rational, p: u64) -> Option<i64> {
    if r.is_zero() {
        None
    } else {
        Some(valuation_rat(r, p))
    }
}

/// Orthogonal splitting over Z_(p) with the shift written in the new basis.
fn jordan_blocks(gram: &IntMatrix, shift: &[Rational], p: u64) -> Vec<Block> {
    let mut g = gram.to_rational();
    let mut y = shift.to_vec();
    let mut active: Vec<usize> = (0..g.len()).collect();
    let mut blocks = Vec::new();
    while !active.is_empty() {
        let mut best: Option<(i64, usize, usize)> = None;
        for (ii, &i) in active.iter().enumerate() {
            for &j in &active[ii..] {
                if let Some(v) = val(&g[i][j], p) {
                    // diagonal entries win ties
                    let better = match best {
                        None => true,
                        Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                    };
                    if better {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (_, i, j) = best.expect("nondegenerate Gram matrix");
        if i != j && p != 2 {
            let one = Rational::one();
            add_basis(&mut g, &mut y, i, j, &one);
        }
        if i == j || p != 2 {
            for &k in &active {
                if k != i {
                    let c = -&g[k][i] / &g[i][i];
                    add_basis(&mut g, &mut y, k, i, &c);
                }
            }
            blocks.push(Block {
                gram: vec![vec![g[i][i].clone()]],
                shift: vec![y[i].clone()],
            });
            active.retain(|&k| k != i);
        } else {
            let (a, b, c) = (g[i][i].clone(), g[i][j].clone(), g[j][j].clone());
            let det = &a * &c - &b * &b;
            for &k in &active {
                if k != i && k != j {
                    let (u, v) = (g[k][i].clone(), g[k][j].clone());
                    let ci = -(&c * &u - &b * &v) / &det;
                    let cj = -(&a * &v - &b * &u) / &det;
                    add_basis(&mut g, &mut y, k, i, &ci);
                    add_basis(&mut g, &mut y, k, j, &cj);
                }
            }
            blocks.push(Block {
                gram: vec![vec![a, b.clone()], vec![b, c]],
                shift: vec![y[i].clone(), y[j].clone()],
            });
            active.retain(|&k| k != i && k != j);
        }
    }
    blocks
}

/// F(w) = c0 + Σ lin_i w_i + Σ_{i≤j} quad_ij w_i w_j, where F(w) = q(s + w).
struct BlockPoly {
    c0: Rational,
    lin: Vec<Rational>,
    quad: Vec<Vec<Rational>>,
}

impl BlockPoly {
    fn of(b: &Block, p: u64) -> Self {
        let k = b.shift.len();
        // an integral shift only permutes the residues
        let integral = b.shift.iter().all(|x| val(x, p).map_or(true, |v| v >= 0));
        let zero = vec![Rational::zero(); k];
        let shift = if integral { &zero } else { &b.shift };
        let two = Rational::from_integer(BigInt::from(2));
        let bs: Vec<Rational> = (0..k)
            .map(|i| (0..k).map(|j| &b.gram[i][j] * &shift[j]).sum())
            .collect();
        let c0 = bs.iter().zip(shift).map(|(x, s)| x * s).sum::<Rational>() / &two;
        let mut quad = vec![vec![Rational::zero(); k]; k];
        for i in 0..k {
            quad[i][i] = &b.gram[i][i] / &two;
            for j in i + 1..k {
                quad[i][j] = b.gram[i][j].clone();
            }
        }
        BlockPoly { c0, lin: bs, quad }
    }

    fn is_centered(&self) -> bool {
        self.c0.is_zero() && self.lin.iter().all(|l| l.is_zero())
    }
}

fn residue(r: &Rational, modulus: &BigInt) -> Result<u64, DensityError> {
    let g = r.denom().extended_gcd(modulus);
    if !g.gcd.is_one() {
        return Err(DensityError::NotIntegral);
    }
    let v = (r.numer() * g.x).mod_floor(modulus);
    Ok(v.to_u64().expect("residue below modulus"))
}

type Dist = HashMap<u64, BigUint>;

fn convolve(a: &Dist, b: &Dist, m: u64) -> Dist {
    let mut out: Dist = HashMap::with_capacity(a.len().max(b.len()));
    for (x, cx) in a {
        for (y, cy) in b {
            let s = ((*x as u128 + *y as u128) % m as u128) as u64;
            *out.entry(s).or_default() += cx * cy;
        }
    }
    out
}

/// Value distribution of one block over w ∈ (Z/p^a)^k, values scaled by p^V.
fn block_distribution(key: &[u64], k: usize, pa: u64, m: u64) -> Dist {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let mm = m as u128;
    let c0 = key[0] as u128;
    if k == 1 {
        let (l, q) = (key[1] as u128, key[2] as u128);
        for w in 0..pa as u128 {
            let v = (c0 + l * w % mm + q * (w * w % mm) % mm) % mm;
            *counts.entry(v as u64).or_default() += 1;
        }
    } else {
        let (l1, l2) = (key[1] as u128, key[2] as u128);
        let (q11, q12, q22) = (key[3] as u128, key[4] as u128, key[5] as u128);
        for w1 in 0..pa as u128 {
            let base = (c0 + l1 * w1 % mm + q11 * (w1 * w1 % mm) % mm) % mm;
            let lin2 = (l2 + q12 * w1 % mm) % mm;
            for w2 in 0..pa as u128 {
                let v = (base + lin2 * w2 % mm + q22 * (w2 * w2 % mm) % mm) % mm;
                *counts.entry(v as u64).or_default() += 1;
            }
        }
    }
    counts.into_iter().map(|(v, c)| (v, BigUint::from(c))).collect()
}

/// Residues mod p^e up to multiplication by squares of units.
///
/// Value distributions of centered blocks are constant on these orbits, so
/// they convolve through a small table of structure constants.
struct OrbitSpace {
    m: u64,
    ids: Vec<u32>,
    count: usize,
    /// structure[z][o1·count + o2] = #{x ∈ o1 : rep(z) − x ∈ o2}
    structure: Vec<Vec<u64>>,
}

impl OrbitSpace {
    fn new(p: u64, e: u32) -> Self {
        let m = p.pow(e);
        let squares: Vec<bool> = {
            let mut t = vec![false; p as usize];
            for x in 1..p {
                t[(x * x % p) as usize] = true;
            }
            t
        };
        let per_level: u32 = if p == 2 { 4 } else { 2 };
        let id_of = |x: u64| -> u32 {
            if x == 0 {
                return 0;
            }
            let mut j = 0;
            let mut u = x;
            while u % p == 0 {
                u /= p;
                j += 1;
            }
            let cls = if p == 2 {
                let r = (e - j).min(3);
                ((u % (1 << r)) >> 1) as u32
            } else if squares[(u % p) as usize] {
                0
            } else {
                1
            };
            1 + per_level * j + cls
        };
        let raw: Vec<u32> = (0..m).map(id_of).collect();
        // compact the ids that actually occur
        let mut remap = HashMap::new();
        let mut reps = Vec::new();
        let ids: Vec<u32> = raw
            .iter()
            .enumerate()
            .map(|(x, r)| {
                *remap.entry(*r).or_insert_with(|| {
                    reps.push(x as u64);
                    reps.len() as u32 - 1
                })
            })
            .collect();
        let count = reps.len();
        let structure = reps
            .iter()
            .map(|&z| {
                let mut t = vec![0u64; count * count];
                for x in 0..m {
                    let y = (z + m - x) % m;
                    t[ids[x as usize] as usize * count + ids[y as usize] as usize] += 1;
                }
                t
            })
            .collect();
        OrbitSpace { m, ids, count, structure }
    }

    fn id(&self, x: u64) -> usize {
        self.ids[(x % self.m) as usize] as usize
    }

    fn delta(&self) -> Vec<BigUint> {
        let mut f = vec![BigUint::zero(); self.count];
        f[self.id(0)] = BigUint::one();
        f
    }

    fn from_dist(&self, d: &Dist) -> Vec<BigUint> {
        let mut f = vec![BigUint::zero(); self.count];
        for (x, c) in d {
            f[self.id(*x)] = c.clone();
        }
        f
    }

    fn convolve(&self, f: &[BigUint], g: &[BigUint]) -> Vec<BigUint> {
        let n = self.count;
        let pairs: Vec<(usize, usize, BigUint)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !f[i].is_zero() && !g[j].is_zero())
            .map(|(i, j)| (i, j, &f[i] * &g[j]))
            .collect();
        self.structure
            .iter()
            .map(|t| {
                let mut acc = BigUint::zero();
                for (i, j, fg) in &pairs {
                    let c = t[i * n + j];
                    if c != 0 {
                        acc += fg * c;
                    }
                }
                acc
            })
            .collect()
    }

    fn power(&self, f: &[BigUint], mut e: usize) -> Vec<BigUint> {
        let mut acc = self.delta();
        let mut base = f.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.convolve(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.convolve(&base, &base);
            }
        }
        acc
    }
}

/// Prepared density computation for a fixed coset, norm and prime.
pub struct DensityCounter {
    p: u64,
    rank: usize,
    polys: Vec<BlockPoly>,
    scale_exp: u32,
    max_scale: i64,
    n: Rational,
}

impl DensityCounter {
    /// `gram` is the Gram matrix, `shift` the coordinates of a coset
    /// representative and `n` the norm with q(x) + n integral on the coset.
    pub fn new(gram: &IntMatrix, shift: &[Rational], n: &Rational, p: u64) -> Self {
        let blocks = jordan_blocks(gram, shift, p);
        let polys: Vec<BlockPoly> = blocks.iter().map(|b| BlockPoly::of(b, p)).collect();
        let max_scale = blocks
            .iter()
            .map(|b| b.gram.iter().flatten().filter_map(|x| val(x, p)).min().unwrap_or(0))
            .max()
            .unwrap_or(0);
        let mut v = 0i64;
        for poly in &polys {
            if let Some(e) = val(&poly.c0, p) {
                v = v.max(-e);
            }
        }
        if let Some(e) = val(n, p) {
            v = v.max(-e);
        }
        DensityCounter {
            p,
            rank: gram.rows(),
            polys,
            scale_exp: v as u32,
            max_scale,
            n: n.clone(),
        }
    }

    /// Number of x in the coset modulo p^a L with q(x) + n ≡ 0 mod p^a.
    pub fn count(&self, a: u32) -> Result<BigUint, DensityError> {
        let p = self.p;
        let e = a + self.scale_exp;
        if (e as f64) * (p as f64).log2() > 62.0 {
            return Err(DensityError::ModulusTooLarge { p, exp: e });
        }
        let m = p.pow(e);
        let pa = p.pow(a);
        let mb = BigInt::from(m);
        let pv = Rational::from_integer(BigInt::from(p).pow(self.scale_exp));
        let mut groups: Vec<(Vec<u64>, usize, usize)> = Vec::new();
        let mut shifted: Vec<(Vec<u64>, usize)> = Vec::new();
        for poly in &self.polys {
            let k = poly.lin.len();
            let mut key = vec![residue(&(&poly.c0 * &pv), &mb)?];
            for l in &poly.lin {
                key.push(residue(&(l * &pv), &mb)?);
            }
            for i in 0..k {
                for j in i..k {
                    key.push(residue(&(&poly.quad[i][j] * &pv), &mb)?);
                }
            }
            if !poly.is_centered() {
                shifted.push((key, k));
                continue;
            }
            match groups.iter_mut().find(|(g, _, _)| *g == key) {
                Some(entry) => entry.2 += 1,
                None => groups.push((key, k, 1)),
            }
        }
        let space = OrbitSpace::new(p, e);
        let mut centered = space.delta();
        for (key, k, mult) in &groups {
            let f = space.from_dist(&block_distribution(key, *k, pa, m));
            centered = space.convolve(&centered, &space.power(&f, *mult));
        }
        let mut rest: Dist = HashMap::from([(0u64, BigUint::one())]);
        for (key, k) in &shifted {
            rest = convolve(&rest, &block_distribution(key, *k, pa, m), m);
        }
        let target = residue(&(-(&self.n) * &pv), &mb)?;
        let mut total = BigUint::zero();
        for (y, c) in &rest {
            let z = (target + m - y) % m;
            total += c * &centered[space.id(z)];
        }
        Ok(total)
    }

    /// p^{a(1−r)}·N(p^a).
    pub fn density_at(&self, a: u32) -> Result<Rational, DensityError> {
        let n = self.count(a)?;
        let denom = BigInt::from(self.p).pow(a * (self.rank as u32 - 1));
        Ok(Rational::new(BigInt::from(n), denom))
    }

    /// Exponent from which every solution lifts to exactly p^{r−1} solutions.
    ///
    /// A solution x with v(∇q(x)) = t lifts uniformly once a ≥ 2t + 1. Since
    /// q(x) = gᵀB⁻¹g/2 with g = Bx, v(q(x)) ≥ 2t − s (minus one more at p = 2)
    /// where p^s is the largest Jordan scale, and v(q(x)) = v(n) for a > v(n).
    pub fn lifting_exponent(&self) -> u32 {
        let nu = val(&self.n, self.p).unwrap_or(0).max(0);
        let extra = if self.p == 2 { 2 } else { 1 };
        (nu + self.max_scale + extra).max(1) as u32
    }

    /// Counts from max(start, lifting exponent) and confirms that the next
    /// exponent gives the same value, moving on if it does not.
    pub fn stabilize(&self, start: u32) -> Result<LocalDensity, DensityError> {
        let mut a = start.max(self.lifting_exponent());
        let mut prev = self.density_at(a)?;
        while a < MAX_EXPONENT {
            let next = self.density_at(a + 1)?;
            if next == prev {
                return Ok(LocalDensity {
                    p: self.p,
                    value: prev,
                    stabilized_at: a,
                });
            }
            prev = next;
            a += 1;
        }
        Err(DensityError::NoStabilization {
            p: self.p,
            cap: MAX_EXPONENT,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    /// Direct count over (γ + Z^r)/p^a Z^r.
    fn brute_count(gram: &IntMatrix, shift: &[Rational], n: &Rational, p: u64, a: u32) -> u64 {
        let r = gram.rows();
        let pa = p.pow(a);
        let modulus = Rational::from_integer(BigInt::from(pa));
        let mut w = vec![0u64; r];
        let mut hits = 0;
        loop {
            let x: Vec<Rational> = w
                .iter()
                .zip(shift)
                .map(|(wi, s)| s + Rational::from_integer(BigInt::from(*wi)))
                .collect();
            let val = gram.bilinear(&x, &x) / Rational::from_integer(BigInt::from(2)) + n;
            assert!(val.is_integer());
            if (val / &modulus).is_integer() {
                hits += 1;
            }
            let mut i = 0;
            loop {
                if i == r {
                    return hits;
                }
                w[i] += 1;
                if w[i] < pa {
                    break;
                }
                w[i] = 0;
                i += 1;
            }
        }
    }

    fn check(rows: &[Vec<i64>], shift: &[Rational], n: &Rational, p: u64, a: u32) {
        let g = IntMatrix::from_rows(rows);
        let c = DensityCounter::new(&g, shift, n, p);
        assert_eq!(
            c.count(a).unwrap(),
            BigUint::from(brute_count(&g, shift, n, p, a)),
            "gram {rows:?} shift {shift:?} n {n} p {p} a {a}"
        );
    }

    #[test]
    fn counts_match_brute_force() {
        let a2 = vec![vec![2, -1], vec![-1, 2]];
        let third = vec![rat(1, 3), rat(2, 3)];
        check(&a2, &third, &rat(2, 3), 3, 3);
        check(&a2, &third, &rat(2, 3), 2, 4);
        check(&a2, &[rat(0, 1), rat(0, 1)], &rat(1, 1), 3, 3);
        let u = vec![vec![0, 1], vec![1, 0]];
        check(&u, &[rat(0, 1), rat(0, 1)], &rat(4, 1), 2, 5);
        let mixed = vec![vec![2, 1, 0], vec![1, 4, 1], vec![0, 1, -6]];
        let g = IntMatrix::from_rows(&mixed);
        let inv = g.inverse_rational().unwrap();
        let gamma: Vec<Rational> = inv.iter().map(|row| row[2].clone()).collect();
        let qg = g.bilinear(&gamma, &gamma) / Rational::from_integer(BigInt::from(2));
        let n = crate::arith::frac(&-qg) + Rational::one();
        for p in [2, 3, 5, 7, 11, 13] {
            check(&mixed, &gamma, &n, p, if p < 5 { 3 } else { 1 });
        }
        let d4 = vec![vec![4, 0], vec![0, 2]];
        check(&d4, &[rat(1, 4), rat(0, 1)], &rat(7, 8), 2, 5);
    }

    #[test]
    fn good_prime_closed_forms() {
        // rank 3 (s = 1): 1 + χ(p)/p with χ the character of (−1)^s·2·(−n)·det = 12
        let rows = vec![vec![2, 1, 0], vec![1, 2, 0], vec![0, 0, 2]];
        let g = IntMatrix::from_rows(&rows);
        let n = rat(1, 1);
        for p in [5u64, 7, 11, 13] {
            let c = DensityCounter::new(&g, &[rat(0, 1), rat(0, 1), rat(0, 1)], &n, p);
            let d = rat(brute_count(&g, &[rat(0, 1), rat(0, 1), rat(0, 1)], &n, p, 1) as i64, (p * p) as i64);
            let disc = BigInt::from(12);
            let chi = crate::arith::primes::kronecker(&disc, p);
            let expect = Rational::one() + rat(chi as i64, p as i64);
            assert_eq!(d, expect, "p = {p}");
            assert_eq!(c.stabilize(1).unwrap().value, expect);
        }
        // rank 2: 1 − χ(p)/p with χ the character of −det
        let rows = vec![vec![2, 1], vec![1, 4]];
        let g = IntMatrix::from_rows(&rows);
        for p in [3u64, 5, 11, 13] {
            let c = DensityCounter::new(&g, &[rat(0, 1), rat(0, 1)], &rat(1, 1), p);
            let chi = crate::arith::primes::kronecker(&BigInt::from(-7), p);
            let brute = rat(brute_count(&g, &[rat(0, 1), rat(0, 1)], &rat(1, 1), p, 1) as i64, p as i64);
            assert_eq!(brute, Rational::one() - rat(chi as i64, p as i64));
            assert_eq!(c.stabilize(1).unwrap().value, brute);
        }
    }

    #[test]
    fn constant_past_the_lifting_exponent() {
        let cases: Vec<(Vec<Vec<i64>>, usize)> = vec![
            (vec![vec![2, 1, 0], vec![1, 4, 1], vec![0, 1, -6]], 2),
            (vec![vec![4, 0, 0], vec![0, -12, 0], vec![0, 0, 2]], 1),
            (vec![vec![2, 1], vec![1, -8]], 1),
        ];
        for (rows, col) in cases {
            let g = IntMatrix::from_rows(&rows);
            let inv = g.inverse_rational().unwrap();
            let gamma: Vec<Rational> = inv.iter().map(|row| row[col].clone()).collect();
            let qg = g.bilinear(&gamma, &gamma) / Rational::from_integer(BigInt::from(2));
            for extra in [1i64, 2, 4, 12] {
                let n = crate::arith::frac(&-&qg) + rat(extra, 1);
                for p in [2u64, 3, 5] {
                    let c = DensityCounter::new(&g, &gamma, &n, p);
                    let a0 = c.lifting_exponent();
                    let d0 = c.density_at(a0).unwrap();
                    for a in a0 + 1..a0 + 3 {
                        assert_eq!(c.density_at(a).unwrap(), d0, "{rows:?} n = {n} p = {p} a = {a}");
                    }
                }
            }
        }
    }

    #[test]
    fn stabilization_on_a_hyperbolic_plane() {
        // xy ≡ −n mod 2^a has (v + 1)(1 − 1/p)·p^a solutions when v = v_p(n) < a
        let g = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let c = DensityCounter::new(&g, &[rat(0, 1), rat(0, 1)], &rat(4, 1), 2);
        let d = c.stabilize(1).unwrap();
        assert_eq!(d.value, rat(3, 2));
        assert_eq!(d.stabilized_at, 4);
        for a in 3..8 {
            assert_eq!(c.density_at(a).unwrap(), rat(3, 2), "a = {a}");
        }
    }
}
