//! Exact short-vector enumeration in a shifted ellipsoid.
//!
//! Points x = g + v (v integral) with xᵀGx ≤ B are visited by completing the
//! square, last coordinate first. All bounds are integers: with Δ_i the
//! leading minors of G and D the common denominator of the shift,
//! u_i = E·D·(x_i − c_i) is integral for E = lcm(Δ_i), and the form becomes
//! Σ w_i u_i² with integral weights w_i = Λ·Δ_i/Δ_{i−1}.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::intmat::IntMatrix;
use super::LatticeError;
use crate::arith::{common_denominator, floor, Rational};

pub const DEFAULT_BUDGET: f64 = 1e9;

pub struct ShiftedEllipsoid {
    n: usize,
    /// shift scaled by `den`
    shift: Vec<i128>,
    den: i128,
    /// lcm of leading minors
    e: i128,
    /// M[i][j] = E·m_ij (j > i), integral
    m: Vec<Vec<i128>>,
    /// integral weights
    w: Vec<i128>,
    /// Σ w_i u_i² = scale · xᵀGx
    scale: Rational,
}

fn to_i128(x: &BigInt) -> Result<i128, LatticeError> {
    x.to_i128().ok_or(LatticeError::Overflow)
}

impl ShiftedEllipsoid {
    /// `gram` must be positive definite.
    pub fn new(gram: &IntMatrix, shift: &[Rational]) -> Result<Self, LatticeError> {
        let n = gram.rows();
        assert_eq!(shift.len(), n);
        let minors = gram.leading_minors();
        if minors.iter().any(|d| !d.is_positive()) {
            return Err(LatticeError::NotDefinite);
        }
        // rational LDLᵀ in the Fincke–Pohst layout: q[i][i] = D_i, q[i][j] = m_ij
        let mut q = gram.to_rational();
        for i in 0..n {
            for j in i + 1..n {
                q[j][i] = q[i][j].clone();
                q[i][j] = &q[i][j] / &q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = &q[k][i] * &q[i][l];
                    q[k][l] -= t;
                }
            }
        }
        let e = minors.iter().fold(BigInt::one(), |a, d| a.lcm(d));
        let den = common_denominator(shift.iter());
        let mut m = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = &q[i][j] * Rational::from_integer(e.clone());
                debug_assert!(v.is_integer());
                m[i][j] = to_i128(&v.to_integer())?;
            }
        }
        let dens: Vec<Rational> = (0..n).map(|i| q[i][i].clone()).collect();
        let lam = common_denominator(dens.iter());
        let w: Vec<i128> = dens
            .iter()
            .map(|d| to_i128(&(d * Rational::from_integer(lam.clone())).to_integer()))
            .collect::<Result<_, _>>()?;
        let k = &e * &den;
        let scale = Rational::from_integer(lam * &k * &k);
        let shift = shift
            .iter()
            .map(|g| to_i128(&(g * Rational::from_integer(den.clone())).to_integer()))
            .collect::<Result<_, _>>()?;
        Ok(ShiftedEllipsoid {
            n,
            shift,
            den: to_i128(&den)?,
            e: to_i128(&e)?,
            m,
            w,
            scale,
        })
    }

    /// The factor turning xᵀGx into the integer reported to visitors.
    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    /// Visits every v with (g+v)ᵀG(g+v) ≤ bound, passing v and the scaled
    /// norm Σ w_i u_i². Returns the number of points visited.
    pub fn visit(
        &self,
        bound: &Rational,
        mut f: impl FnMut(&[i64], i128),
    ) -> Result<u64, LatticeError> {
        if bound.is_negative() {
            return Ok(0);
        }
        let wmax = floor(&(bound * &self.scale));
        let wmax = to_i128(&wmax)?;
        // headroom check for the largest intermediate product
        let ed = self.e.checked_mul(self.den).ok_or(LatticeError::Overflow)?;
        let umax = (wmax / self.w.iter().copied().min().unwrap_or(1)).sqrt() + 1;
        let mmax = self
            .m
            .iter()
            .flatten()
            .map(|x| x.abs())
            .max()
            .unwrap_or(0)
            .max(self.e);
        let xmax = umax / ed.max(1) + self.shift.iter().map(|x| x.abs()).max().unwrap_or(0) + 2;
        mmax.checked_mul(xmax)
            .and_then(|x| x.checked_mul(self.n as i128 + 1))
            .and_then(|x| x.checked_mul(x))
            .and_then(|x| x.checked_mul(self.w.iter().copied().max().unwrap_or(1)))
            .ok_or(LatticeError::Overflow)?;

        let n = self.n;
        let mut v = vec![0i64; n];
        let mut xs = vec![0i128; n]; // den·x_i
        let mut count = 0u64;
        if n == 0 {
            f(&v, 0);
            return Ok(1);
        }
        self.rec(n - 1, wmax, 0, &mut v, &mut xs, &mut count, &mut f);
        Ok(count)
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        &self,
        i: usize,
        wmax: i128,
        partial: i128,
        v: &mut [i64],
        xs: &mut [i128],
        count: &mut u64,
        f: &mut impl FnMut(&[i64], i128),
    ) {
        // u_i = E·X_i + s_i with X_i = den·x_i and s_i = Σ_{j>i} M_ij X_j
        let s: i128 = (i + 1..self.n).map(|j| self.m[i][j] * xs[j]).sum();
        let rem = wmax - partial;
        let r = (rem / self.w[i]).sqrt();
        // E·(G_i + den·v) + s ∈ [−r, r]
        let ed = self.e * self.den;
        let base = self.e * self.shift[i] + s;
        let lo = -Integer::div_floor(&(r + base), &ed);
        let hi = Integer::div_floor(&(r - base), &ed);
        for vi in lo..=hi {
            let u = base + ed * vi;
            let t = partial + self.w[i] * u * u;
            if t > wmax {
                continue;
            }
            v[i] = vi as i64;
            xs[i] = self.shift[i] + self.den * vi;
            if i == 0 {
                *count += 1;
                f(v, t);
            } else {
                self.rec(i - 1, wmax, t, v, xs, count, f);
            }
        }
    }
}

/// LLL reduction (δ = 3/4) of a positive-definite Gram matrix. Returns U
/// whose columns form the reduced basis, so UᵀGU is the reduced Gram matrix.
pub fn lll_reduce(gram: &IntMatrix) -> IntMatrix {
    let n = gram.rows();
    let mut g: Vec<Vec<BigInt>> = gram.to_rows();
    let mut u = IntMatrix::identity(n);
    if n < 2 {
        return u;
    }
    let mut mu = vec![vec![Rational::zero(); n]; n];
    let mut b = vec![Rational::zero(); n];
    let gs_row = |g: &Vec<Vec<BigInt>>, mu: &mut Vec<Vec<Rational>>, b: &mut Vec<Rational>, i: usize| {
        for j in 0..i {
            let mut t = Rational::from_integer(g[i][j].clone());
            for l in 0..j {
                t -= &mu[j][l] * &mu[i][l] * &b[l];
            }
            mu[i][j] = t / &b[j];
        }
        let mut t = Rational::from_integer(g[i][i].clone());
        for l in 0..i {
            t -= &mu[i][l] * &mu[i][l] * &b[l];
        }
        b[i] = t;
    };
    gs_row(&g, &mut mu, &mut b, 0);
    gs_row(&g, &mut mu, &mut b, 1);
    let three_quarters = Rational::new(BigInt::from(3), BigInt::from(4));
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let r = floor(&(&mu[k][j] + &half));
            if r.is_zero() {
                continue;
            }
            // b_k ← b_k − r·b_j
            for c in 0..n {
                let t = &g[j][c] * &r;
                g[k][c] -= t;
            }
            for c in 0..n {
                let t = &g[c][j] * &r;
                g[c][k] -= t;
            }
            for row in 0..n {
                let t = &u[(row, j)] * &r;
                u[(row, k)] -= t;
            }
            gs_row(&g, &mut mu, &mut b, k);
        }
        let lhs = &b[k];
        let rhs = (&three_quarters - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if *lhs >= rhs {
            k += 1;
            if k < n {
                gs_row(&g, &mut mu, &mut b, k);
            }
        } else {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            for row in 0..n {
                let t = u[(row, k)].clone();
                u[(row, k)] = u[(row, k - 1)].clone();
                u[(row, k - 1)] = t;
            }
            k = (k - 1).max(1);
            gs_row(&g, &mut mu, &mut b, k - 1);
            gs_row(&g, &mut mu, &mut b, k);
        }
    }
    u
}

/// Rough number of lattice points of a definite form inside xᵀGx ≤ B.
pub fn predicted_count(gram: &IntMatrix, bound: &Rational) -> f64 {
    let n = gram.rows() as f64;
    let det = gram.determinant().to_f64().unwrap_or(f64::INFINITY).abs();
    let b = crate::arith::to_f64(bound).max(0.0);
    // unit ball volume π^{n/2}/Γ(n/2+1)
    let ln_ball = n / 2.0 * std::f64::consts::PI.ln() - ln_gamma(n / 2.0 + 1.0);
    let ln_vol = ln_ball + n / 2.0 * b.ln() - 0.5 * det.ln();
    // boundary layer: scale by (1 + √n/√B)^n to cover small radii
    let fudge = n * (1.0 + n.sqrt() / b.sqrt().max(1e-9)).ln();
    (ln_vol + fudge).exp()
}

fn ln_gamma(x: f64) -> f64 {
    // Stirling with shift, adequate for a budget estimate
    let mut x = x;
    let mut acc = 0.0;
    while x < 8.0 {
        acc -= x.ln();
        x += 1.0;
    }
    acc + (x - 0.5) * x.ln() - x + 0.5 * (std::f64::consts::TAU).ln() + 1.0 / (12.0 * x)
}
