use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::Coeff;

/// Q(ζ_M) presented as Z[x]/Φ_M(x).
#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    conductor: u64,
    /// Φ_M, lowest degree first, monic.
    phi: Vec<i64>,
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact quotient of `num` by the monic `den`.
fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let ql = num.len() - dl + 1;
    let mut q = vec![0i64; ql];
    for i in (0..ql).rev() {
        let c = rem[i + dl - 1];
        q[i] = c;
        for j in 0..dl {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

fn cyclotomic_poly(m: u64) -> Vec<i64> {
    // Φ_m = ∏_{d|m} (x^d − 1)^{μ(m/d)}
    let binomial = |d: u64| {
        let mut p = vec![0i64; d as usize + 1];
        p[0] = -1;
        p[d as usize] = 1;
        p
    };
    let divisors: Vec<u64> = (1..=m).filter(|d| m % d == 0).collect();
    let mut num = vec![1i64];
    for &d in &divisors {
        if super::primes::mobius(m / d) == 1 {
            num = poly_mul(&num, &binomial(d));
        }
    }
    for &d in &divisors {
        if super::primes::mobius(m / d) == -1 {
            num = poly_div_exact(&num, &binomial(d));
        }
    }
    num
}

impl CyclotomicField {
    pub fn new(conductor: u64) -> Arc<Self> {
        assert!(conductor >= 1);
        Arc::new(CyclotomicField {
            conductor,
            phi: cyclotomic_poly(conductor),
        })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn phi(&self) -> &[i64] {
        &self.phi
    }
}

/// An element of Q(ζ_M) (or of R[ζ_M] for a coefficient ring R) in the
/// power basis 1, ζ, …, ζ^{φ(M)−1}.
#[derive(Clone)]
pub struct Cyclotomic<C: Coeff> {
    field: Arc<CyclotomicField>,
    coeffs: Vec<C>,
}

impl<C: Coeff> PartialEq for Cyclotomic<C> {
    fn eq(&self, o: &Self) -> bool {
        self.field.conductor == o.field.conductor && self.coeffs == o.coeffs
    }
}

impl<C: Coeff + fmt::Display> fmt::Debug for Cyclotomic<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})z^{i}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " [M={}]", self.field.conductor)
    }
}

impl<C: Coeff> Cyclotomic<C> {
    fn reduce(field: &Arc<CyclotomicField>, mut v: Vec<C>) -> Self {
        let deg = field.degree();
        if v.len() > deg {
            for i in (deg..v.len()).rev() {
                let c = std::mem::replace(&mut v[i], C::zero());
                if c.is_zero() {
                    continue;
                }
                for j in 0..deg {
                    let pj = field.phi[j];
                    if pj != 0 {
                        let t = c.clone() * C::from_int(pj);
                        let cur = std::mem::replace(&mut v[i - deg + j], C::zero());
                        v[i - deg + j] = cur - t;
                    }
                }
            }
            v.truncate(deg);
        }
        while v.len() < deg {
            v.push(C::zero());
        }
        Cyclotomic {
            field: field.clone(),
            coeffs: v,
        }
    }

    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        Cyclotomic {
            field: field.clone(),
            coeffs: vec![C::zero(); field.degree()],
        }
    }

    pub fn from_scalar(field: &Arc<CyclotomicField>, c: C) -> Self {
        let mut v = vec![C::zero(); field.degree()];
        v[0] = c;
        Cyclotomic {
            field: field.clone(),
            coeffs: v,
        }
    }

    pub fn one(field: &Arc<CyclotomicField>) -> Self {
        Self::from_scalar(field, C::one())
    }

    /// ζ_M^k for any integer k.
    pub fn zeta_pow(field: &Arc<CyclotomicField>, k: i64) -> Self {
        let e = k.mod_floor(&(field.conductor as i64)) as usize;
        let mut v = vec![C::zero(); e + 1];
        v[e] = C::one();
        Self::reduce(field, v)
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Cyclotomic {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Cyclotomic {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.field.conductor, o.field.conductor, "conductor mismatch");
        let n = self.coeffs.len();
        let mut v = vec![C::zero(); 2 * n.max(1) - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let cur = std::mem::replace(&mut v[i + j], C::zero());
                v[i + j] = cur + a.clone() * b.clone();
            }
        }
        Self::reduce(&self.field, v)
    }

    /// Multiplication by ζ^k.
    pub fn mul_zeta(&self, k: i64) -> Self {
        self.mul(&Self::zeta_pow(&self.field, k))
    }

    /// Complex conjugation ζ ↦ ζ^{−1}.
    pub fn conj(&self) -> Self {
        let m = self.field.conductor as i64;
        let mut v = vec![C::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (m - i as i64).mod_floor(&m) as usize;
            let cur = std::mem::replace(&mut v[e], C::zero());
            v[e] = cur + c.clone();
        }
        Self::reduce(&self.field, v)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Cyclotomic<D> {
        Cyclotomic {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Some(c) when the element is the rational (or ring) scalar c.
    pub fn as_scalar(&self) -> Option<&C> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            self.coeffs.first()
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64
    where
        C: ToPrimitive,
    {
        let m = self.field.conductor as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let a = std::f64::consts::TAU * i as f64 / m;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), a)
            })
            .sum()
    }
}
