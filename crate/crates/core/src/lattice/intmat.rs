//! Dense integer and rational matrices with the exact algorithms the lattice
//! layer needs: Bareiss determinant, Gauss–Jordan inverse, Hermite and Smith
//! normal forms, integer kernels.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|x| x.iter().cloned().map(Into::into)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_rat_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + b * a)
            })
            .collect()
    }

    /// x^T M y for rational vectors.
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let my = self.mul_rat_vec(y);
        x.iter().zip(&my).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn neg(&self) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn block_diag(parts: &[&IntMatrix]) -> Self {
        let n: usize = parts.iter().map(|p| p.rows).sum();
        let m: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            for r in 0..p.rows {
                for c in 0..p.cols {
                    out[(r0 + r, c0 + c)] = p[(r, c)].clone();
                }
            }
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }

    /// Bareiss fraction-free determinant.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// Leading principal minors Δ_1, …, Δ_n.
    pub fn leading_minors(&self) -> Vec<BigInt> {
        (1..=self.rows)
            .map(|k| {
                let mut s = Self::zeros(k, k);
                for r in 0..k {
                    for c in 0..k {
                        s[(r, c)] = self[(r, c)].clone();
                    }
                }
                s.determinant()
            })
            .collect()
    }

    pub fn to_rational(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|x| Rational::from_integer(x.clone()))
                    .collect()
            })
            .collect()
    }

    /// Exact inverse over Q; None when singular.
    pub fn inverse_rational(&self) -> Option<Vec<Vec<Rational>>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.to_rational();
        let mut inv: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(p, c);
            inv.swap(p, c);
            let piv = a[c][c].clone();
            for j in 0..n {
                a[c][j] = &a[c][j] / &piv;
                inv[c][j] = &inv[c][j] / &piv;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for j in 0..n {
                        let t = &f * &a[c][j];
                        a[r][j] -= t;
                        let t = &f * &inv[c][j];
                        inv[r][j] -= t;
                    }
                }
            }
        }
        Some(inv)
    }
}

/// Row-style Hermite normal form: returns (H, U) with U unimodular and
/// U·A = H, H in row echelon form with positive pivots and entries above each
/// pivot reduced into [0, pivot).
pub fn hermite_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.to_rows();
    let mut u = IntMatrix::identity(m).to_rows();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        // gcd-combine everything below into row r
        for i in r + 1..m {
            if h[i][c].is_zero() {
                continue;
            }
            let (a0, b0) = (h[r][c].clone(), h[i][c].clone());
            let e = a0.extended_gcd(&b0);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (p, q) = (&a0 / &g, &b0 / &g);
            // [x y; −q p] has determinant xp + yq = 1
            for row in [&mut h, &mut u] {
                let (rr, ri) = (row[r].clone(), row[i].clone());
                row[r] = rr.iter().zip(&ri).map(|(s, t)| &x * s + &y * t).collect();
                row[i] = rr.iter().zip(&ri).map(|(s, t)| &p * t - &q * s).collect();
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            h[r] = h[r].iter().map(|x| -x).collect();
            u[r] = u[r].iter().map(|x| -x).collect();
        }
        let piv = h[r][c].clone();
        for i in 0..r {
            let f = h[i][c].div_floor(&piv);
            if !f.is_zero() {
                h[i] = h[i].iter().zip(&h[r]).map(|(s, t)| s - &f * t).collect();
                u[i] = u[i].iter().zip(&u[r]).map(|(s, t)| s - &f * t).collect();
            }
        }
        r += 1;
    }
    (IntMatrix::from_rows(&h), IntMatrix::from_rows(&u))
}

/// Basis (as columns) of the integer kernel {x ∈ Z^n : A x = 0}; the basis
/// is saturated, i.e. it spans the kernel lattice itself.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let (h, u) = hermite_normal_form(&a.transpose());
    let zero_rows: Vec<usize> = (0..h.rows())
        .filter(|&r| h.row(r).iter().all(|x| x.is_zero()))
        .collect();
    let mut k = IntMatrix::zeros(a.cols(), zero_rows.len());
    for (j, &r) in zero_rows.iter().enumerate() {
        for i in 0..a.cols() {
            k[(i, j)] = u[(r, i)].clone();
        }
    }
    k
}

/// Smith normal form of a square matrix: (diagonal d, U, V) with U·A·V = diag(d),
/// d_i | d_{i+1}, U and V unimodular.
pub fn smith_normal_form(a: &IntMatrix) -> (Vec<BigInt>, IntMatrix, IntMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.to_rows();
    let mut u = IntMatrix::identity(m).to_rows();
    let mut v = IntMatrix::identity(n).to_rows();

    fn swap_cols(x: &mut [Vec<BigInt>], i: usize, j: usize) {
        for row in x.iter_mut() {
            row.swap(i, j);
        }
    }
    fn add_col(x: &mut [Vec<BigInt>], dst: usize, src: usize, f: &BigInt) {
        for row in x.iter_mut() {
            let t = &row[src] * f;
            row[dst] += t;
        }
    }
    fn add_row(x: &mut [Vec<BigInt>], dst: usize, src: usize, f: &BigInt) {
        let s = x[src].clone();
        for (a, b) in x[dst].iter_mut().zip(&s) {
            *a += b * f;
        }
    }

    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        let mut dirty = false;
        for i in t + 1..m {
            let q = d[i][t].div_floor(&d[t][t]);
            if !q.is_zero() {
                let nq = -q;
                add_row(&mut d, i, t, &nq);
                add_row(&mut u, i, t, &nq);
            }
            dirty |= !d[i][t].is_zero();
        }
        for j in t + 1..n {
            let q = d[t][j].div_floor(&d[t][t]);
            if !q.is_zero() {
                let nq = -q;
                add_col(&mut d, j, t, &nq);
                add_col(&mut v, j, t, &nq);
            }
            dirty |= !d[t][j].is_zero();
        }
        if dirty {
            continue;
        }
        // divisibility of the remaining block
        let bad = (t + 1..m)
            .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !(&d[i][j] % &d[t][t]).is_zero());
        if let Some((i, _)) = bad {
            let one = BigInt::one();
            add_row(&mut d, t, i, &one);
            add_row(&mut u, t, i, &one);
            continue;
        }
        if d[t][t].is_negative() {
            d[t] = d[t].iter().map(|x| -x).collect();
            u[t] = u[t].iter().map(|x| -x).collect();
        }
        t += 1;
    }
    let diag = (0..m.min(n)).map(|i| d[i][i].clone()).collect();
    (diag, IntMatrix::from_rows(&u), IntMatrix::from_rows(&v))
}

/// Exact congruence diagonalisation of a symmetric rational matrix; returns
/// the diagonal entries (zeros included for degenerate forms).
pub fn congruence_diagonal(g: &[Vec<Rational>]) -> Vec<Rational> {
    let n = g.len();
    let mut a = g.to_vec();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // e_k ← e_k + e_j makes the pivot 2·a_kj ≠ 0
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[k][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][k] += t;
                }
            }
        }
        let piv = a[k][k].clone();
        out.push(piv.clone());
        if piv.is_zero() {
            continue;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
        for i in k + 1..n {
            a[k][i] = Rational::zero();
        }
        for j in k + 1..n {
            a[j][k] = Rational::zero();
        }
    }
    out
}
