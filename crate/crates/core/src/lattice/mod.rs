//! Even lattices given by Gram matrices.

pub mod enumerate;
pub mod intmat;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use intmat::{hermite_normal_form, integer_kernel, smith_normal_form, IntMatrix};
pub use enumerate::DEFAULT_BUDGET;

use crate::arith::{common_denominator, floor, Rational};
use enumerate::{lll_reduce, predicted_count, ShiftedEllipsoid};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("unknown lattice name {0:?}")]
    UnknownName(String),
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix has an odd diagonal entry")]
    OddDiagonal,
    #[error("rank1 needs a nonzero even integer, got {0}")]
    BadRank1(i64),
    #[error("degenerate lattice (determinant 0)")]
    DegenerateLattice,
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("vector is not primitive")]
    NotPrimitive,
    #[error("no primitive vector of norm {0} found")]
    NoVectorFound(String),
    #[error("enumeration would visit about {predicted:.3e} points (budget {budget:.1e})")]
    EnumerationBudgetExceeded { predicted: f64, budget: f64 },
    #[error("integer overflow in enumeration bounds")]
    Overflow,
    #[error("bad lattice description: {0}")]
    BadDescription(String),
}

/// Which family a lattice was built as; downstream code may key on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    Lambda2d { d: u64 },
    LambdaCubic,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Named(String),
    DirectSum(Vec<Provenance>),
    Rescale(Box<Provenance>, i64),
    Complement(Box<Provenance>),
    FromFile,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Named(s) => write!(f, "{s}"),
            Provenance::DirectSum(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join(" + "))
            }
            Provenance::Rescale(p, c) => write!(f, "({p})({c})"),
            Provenance::Complement(p) => write!(f, "complement in {p}"),
            Provenance::FromFile => write!(f, "file"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub b_plus: usize,
    pub b_minus: usize,
}

impl Signature {
    pub fn rank(&self) -> usize {
        self.b_plus + self.b_minus
    }

    /// b⁺ − b⁻ as a signed integer.
    pub fn index(&self) -> i64 {
        self.b_plus as i64 - self.b_minus as i64
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct IntegerLattice {
    gram: IntMatrix,
    provenance: Provenance,
    family: Family,
    hyperbolic_planes: usize,
}

impl fmt::Debug for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerLattice({}, rank {})", self.provenance, self.rank())
    }
}

/// Cartan matrix of a simply-laced Dynkin diagram given by its edges (1-based).
fn cartan(n: usize, edges: &[(usize, usize)]) -> IntMatrix {
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = BigInt::from(2);
    }
    for &(a, b) in edges {
        g[(a - 1, b - 1)] = BigInt::from(-1);
        g[(b - 1, a - 1)] = BigInt::from(-1);
    }
    g
}

fn chain(range: std::ops::RangeInclusive<usize>) -> Vec<(usize, usize)> {
    let v: Vec<usize> = range.collect();
    v.windows(2).map(|w| (w[0], w[1])).collect()
}

impl IntegerLattice {
    pub fn from_gram(gram: IntMatrix) -> Result<Self, LatticeError> {
        Self::with_provenance(gram, Provenance::FromFile)
    }

    fn with_provenance(gram: IntMatrix, provenance: Provenance) -> Result<Self, LatticeError> {
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        if (0..gram.rows()).any(|i| gram[(i, i)].is_odd()) {
            return Err(LatticeError::OddDiagonal);
        }
        Ok(IntegerLattice {
            gram,
            provenance,
            family: Family::Other,
            hyperbolic_planes: 0,
        })
    }

    /// Hyperbolic plane U.
    pub fn u() -> Self {
        let mut l = Self::with_provenance(
            IntMatrix::from_rows(&[vec![0i64, 1], vec![1, 0]]),
            Provenance::Named("U".into()),
        )
        .unwrap();
        l.hyperbolic_planes = 1;
        l
    }

    /// A_n in the Bourbaki basis (a path of simple roots).
    pub fn a(n: usize) -> Self {
        assert!(n >= 1);
        Self::with_provenance(cartan(n, &chain(1..=n)), Provenance::Named(format!("A{n}"))).unwrap()
    }

    /// D_n, n ≥ 3: path 1–…–(n−1) with node n attached to n−2.
    pub fn d(n: usize) -> Self {
        assert!(n >= 3);
        let mut e = chain(1..=n - 1);
        e.push((n - 2, n));
        Self::with_provenance(cartan(n, &e), Provenance::Named(format!("D{n}"))).unwrap()
    }

    /// E_n for n = 6, 7, 8 in the Bourbaki numbering: path 1–3–4–…–n,
    /// node 2 attached to node 4.
    pub fn e(n: usize) -> Self {
        assert!((6..=8).contains(&n));
        let mut e = vec![(1, 3)];
        e.extend(chain(3..=n));
        e.push((2, 4));
        Self::with_provenance(cartan(n, &e), Provenance::Named(format!("E{n}"))).unwrap()
    }

    /// The rank-one lattice [[n]], n nonzero and even.
    pub fn rank1(n: i64) -> Result<Self, LatticeError> {
        if n == 0 || n % 2 != 0 {
            return Err(LatticeError::BadRank1(n));
        }
        Self::with_provenance(
            IntMatrix::from_rows(&[vec![n]]),
            Provenance::Named(format!("<{n}>")),
        )
    }

    /// One of U, A2, E6, E7, E8, A<n>, D<n>, rank1(<n>).
    pub fn make_named(name: &str) -> Result<Self, LatticeError> {
        let bad = || LatticeError::UnknownName(name.to_string());
        match name {
            "U" => return Ok(Self::u()),
            "E6" => return Ok(Self::e(6)),
            "E7" => return Ok(Self::e(7)),
            "E8" => return Ok(Self::e(8)),
            _ => {}
        }
        if let Some(arg) = name.strip_prefix("rank1(").and_then(|s| s.strip_suffix(')')) {
            let n: i64 = arg.trim().parse().map_err(|_| bad())?;
            return Self::rank1(n);
        }
        if name.len() < 2 || !name.is_char_boundary(1) {
            return Err(bad());
        }
        let (head, tail) = name.split_at(1);
        let n: usize = tail.parse().map_err(|_| bad())?;
        match head {
            "A" if n >= 1 => Ok(Self::a(n)),
            "D" if n >= 3 => Ok(Self::d(n)),
            _ => Err(bad()),
        }
    }

    pub fn direct_sum(parts: &[IntegerLattice]) -> Self {
        let grams: Vec<&IntMatrix> = parts.iter().map(|p| &p.gram).collect();
        IntegerLattice {
            gram: IntMatrix::block_diag(&grams),
            provenance: Provenance::DirectSum(parts.iter().map(|p| p.provenance.clone()).collect()),
            family: Family::Other,
            hyperbolic_planes: parts.iter().map(|p| p.hyperbolic_planes).sum(),
        }
    }

    /// L(c): the Gram matrix multiplied by c.
    pub fn rescale(&self, c: i64) -> Self {
        assert!(c != 0);
        let mut g = self.gram.clone();
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                g[(i, j)] *= c;
            }
        }
        IntegerLattice {
            gram: g,
            provenance: Provenance::Rescale(Box::new(self.provenance.clone()), c),
            family: Family::Other,
            // U(−1) ≅ U; other rescalings destroy unimodular planes
            hyperbolic_planes: if c.abs() == 1 { self.hyperbolic_planes } else { 0 },
        }
    }

    /// U ⊕ U ⊕ E8(−1) ⊕ E8(−1) ⊕ ⟨−2d⟩.
    pub fn lambda_2d(d: u64) -> Self {
        assert!(d >= 1);
        let e8m = Self::e(8).rescale(-1);
        let mut l = Self::direct_sum(&[
            Self::u(),
            Self::u(),
            e8m.clone(),
            e8m,
            Self::rank1(-2 * d as i64).unwrap(),
        ]);
        l.provenance = Provenance::Named(format!("lambda_2d({d})"));
        l.family = Family::Lambda2d { d };
        l
    }

    /// U ⊕ U ⊕ E8(−1) ⊕ E8(−1) ⊕ A2(−1), rank 22.
    pub fn lambda_cubic() -> Self {
        let e8m = Self::e(8).rescale(-1);
        let mut l = Self::direct_sum(&[
            Self::u(),
            Self::u(),
            e8m.clone(),
            e8m,
            Self::a(2).rescale(-1),
        ]);
        l.provenance = Provenance::Named("lambda_cubic".into());
        l.family = Family::LambdaCubic;
        l
    }

    /// U ⊕ ⟨2⟩ ⊕ E8(−1)² ⊕ ⟨−2⟩, the lattice behind the degree-2 K3 lower bound.
    pub fn k3_degree2_eisenstein() -> Self {
        let e8m = Self::e(8).rescale(-1);
        let mut l = Self::direct_sum(&[
            Self::u(),
            Self::rank1(2).unwrap(),
            e8m.clone(),
            e8m,
            Self::rank1(-2).unwrap(),
        ]);
        l.provenance = Provenance::Named("k3_degree2_eisenstein".into());
        l
    }

    /// U³ ⊕ ⟨2d⟩, signature (4, 3).
    pub fn hodge_eisenstein(d: u64) -> Self {
        let mut l = Self::direct_sum(&[
            Self::u(),
            Self::u(),
            Self::u(),
            Self::rank1(2 * d as i64).unwrap(),
        ]);
        l.provenance = Provenance::Named(format!("hodge_eisenstein({d})"));
        l
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn hyperbolic_planes(&self) -> usize {
        self.hyperbolic_planes
    }

    /// True when the constructors certify two orthogonal hyperbolic planes.
    pub fn splits_two_hyperbolic_planes(&self) -> bool {
        self.hyperbolic_planes >= 2
    }

    pub fn with_hyperbolic_planes(mut self, n: usize) -> Self {
        self.hyperbolic_planes = n;
        self
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant()
    }

    pub fn signature(&self) -> Result<Signature, LatticeError> {
        let d = intmat::congruence_diagonal(&self.gram.to_rational());
        if d.iter().any(|x| x.is_zero()) {
            return Err(LatticeError::DegenerateLattice);
        }
        Ok(Signature {
            b_plus: d.iter().filter(|x| x.is_positive()).count(),
            b_minus: d.iter().filter(|x| x.is_negative()).count(),
        })
    }

    pub fn is_positive_definite(&self) -> bool {
        self.gram.leading_minors().iter().all(|d| d.is_positive())
    }

    pub fn is_negative_definite(&self) -> bool {
        self.gram.neg().leading_minors().iter().all(|d| d.is_positive())
    }

    pub fn gram_inverse(&self) -> Result<Vec<Vec<Rational>>, LatticeError> {
        self.gram.inverse_rational().ok_or(LatticeError::DegenerateLattice)
    }

    /// Smallest N with N·G⁻¹ integral and N·diag(G⁻¹) even.
    pub fn level(&self) -> Result<BigInt, LatticeError> {
        let inv = self.gram_inverse()?;
        let mut n = common_denominator(inv.iter().flatten());
        for (i, row) in inv.iter().enumerate() {
            let half = &row[i] / Rational::from_integer(BigInt::from(2));
            n = n.lcm(half.denom());
        }
        Ok(n)
    }

    /// xᵀGy for rational coordinate vectors.
    pub fn pair(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.gram.bilinear(x, y)
    }

    pub fn norm(&self, x: &[Rational]) -> Rational {
        self.pair(x, x)
    }

    /// The sublattice orthogonal to `v`, with basis from the integer kernel
    /// of x ↦ ⟨x, v⟩. Returns the complement and its basis as columns.
    pub fn orthogonal_complement_with_basis(
        &self,
        v: &[BigInt],
    ) -> Result<(IntegerLattice, IntMatrix), LatticeError> {
        let g = v.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
        if !g.is_one() {
            return Err(LatticeError::NotPrimitive);
        }
        let w = self.gram.mul_vec(v);
        let row = IntMatrix::from_rows(&[w]);
        let k = integer_kernel(&row);
        let gram = k.transpose().mul(&self.gram).mul(&k);
        let l = IntegerLattice::with_provenance(gram, Provenance::Complement(Box::new(self.provenance.clone())))?;
        Ok((l, k))
    }

    pub fn orthogonal_complement(&self, v: &[BigInt]) -> Result<IntegerLattice, LatticeError> {
        self.orthogonal_complement_with_basis(v).map(|p| p.0)
    }

    /// Visits all x ∈ shift + Z^n with |xᵀGx| ≤ |bound| in a definite lattice,
    /// reporting the exact norm xᵀGx. Refuses when the predicted count
    /// exceeds `budget`.
    pub fn visit_short_vectors(
        &self,
        shift: &[Rational],
        bound: &Rational,
        budget: f64,
        mut f: impl FnMut(&[i64], &Rational),
    ) -> Result<u64, LatticeError> {
        self.visit_short_vectors_raw(shift, bound, budget, |v, t, scale| {
            let q = Rational::from_integer(BigInt::from(t)) / scale;
            f(v, &q)
        })
    }

    /// Like `visit_short_vectors`, reporting the signed integer t and the
    /// fixed scale with xᵀGx = t/scale.
    pub fn visit_short_vectors_raw(
        &self,
        shift: &[Rational],
        bound: &Rational,
        budget: f64,
        mut f: impl FnMut(&[i64], i128, &Rational),
    ) -> Result<u64, LatticeError> {
        let (gram, sign) = if self.is_positive_definite() {
            (self.gram.clone(), 1)
        } else if self.is_negative_definite() {
            (self.gram.neg(), -1)
        } else {
            return Err(LatticeError::NotDefinite);
        };
        let b = bound.abs();
        let predicted = predicted_count(&gram, &b);
        if predicted > budget {
            return Err(LatticeError::EnumerationBudgetExceeded { predicted, budget });
        }
        // enumerate in an LLL-reduced basis x = U·y, translating back to v = x − shift
        let u = lll_reduce(&gram);
        let reduced = u.transpose().mul(&gram).mul(&u);
        let uinv = u.inverse_rational().expect("unimodular");
        let n = self.rank();
        let y: Vec<Rational> = (0..n)
            .map(|r| (0..n).fold(Rational::zero(), |a, c| a + &uinv[r][c] * &shift[c]))
            .collect();
        let t: Vec<BigInt> = y.iter().map(floor).collect();
        let s: Vec<Rational> = y.iter().zip(&t).map(|(a, b)| a - Rational::from_integer(b.clone())).collect();
        let u64s = u.to_i64_rows().ok_or(LatticeError::Overflow)?;
        let t64: Vec<i64> = t.iter().map(|x| x.to_i64()).collect::<Option<_>>().ok_or(LatticeError::Overflow)?;
        let ell = ShiftedEllipsoid::new(&reduced, &s)?;
        let scale = ell.scale().clone();
        let sgn = sign as i128;
        let mut v = vec![0i64; n];
        ell.visit(&b, |w, tt| {
            for (r, row) in u64s.iter().enumerate() {
                v[r] = row.iter().zip(w.iter().zip(&t64)).map(|(a, (x, y))| a * (x - y)).sum();
            }
            f(&v, sgn * tt, &scale)
        })
    }

    /// A primitive vector of the given norm in a definite lattice.
    pub fn find_primitive_vector(&self, norm: i64) -> Result<Vec<BigInt>, LatticeError> {
        let pos = self.is_positive_definite();
        if !pos && !self.is_negative_definite() {
            return Err(LatticeError::NotDefinite);
        }
        let target = Rational::from_integer(BigInt::from(norm));
        if (norm > 0) != pos {
            return Err(LatticeError::NoVectorFound(norm.to_string()));
        }
        let zero = vec![Rational::zero(); self.rank()];
        let mut found: Option<Vec<i64>> = None;
        self.visit_short_vectors(&zero, &target, DEFAULT_BUDGET, |v, q| {
            if found.is_none() && q == &target {
                let g = v.iter().fold(0i64, |a, b| a.gcd(b));
                if g == 1 {
                    found = Some(v.to_vec());
                }
            }
        })?;
        found
            .map(|v| v.into_iter().map(BigInt::from).collect())
            .ok_or_else(|| LatticeError::NoVectorFound(norm.to_string()))
    }

    /// Gram matrix of the basis change AᵀGA (A square, unimodular).
    pub fn change_basis(&self, a: &IntMatrix) -> Self {
        IntegerLattice {
            gram: a.transpose().mul(&self.gram).mul(a),
            provenance: self.provenance.clone(),
            family: self.family.clone(),
            hyperbolic_planes: self.hyperbolic_planes,
        }
    }
}

/// Lattice file / command-line description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Gram {
        gram: Vec<Vec<i64>>,
        #[serde(default)]
        hyperbolic_planes: usize,
    },
    Named {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<u64>,
    },
}

impl LatticeSpec {
    pub fn build(&self) -> Result<IntegerLattice, LatticeError> {
        match self {
            LatticeSpec::Gram {
                gram,
                hyperbolic_planes,
            } => {
                let n = gram.len();
                if gram.iter().any(|r| r.len() != n) || n == 0 {
                    return Err(LatticeError::BadDescription("gram must be square and nonempty".into()));
                }
                Ok(IntegerLattice::from_gram(IntMatrix::from_rows(gram))?
                    .with_hyperbolic_planes(*hyperbolic_planes))
            }
            LatticeSpec::Named { name, d } => {
                let need_d = || {
                    d.filter(|&x| x >= 1)
                        .ok_or_else(|| LatticeError::BadDescription(format!("{name} needs d >= 1")))
                };
                match name.as_str() {
                    "lambda_2d" => Ok(IntegerLattice::lambda_2d(need_d()?)),
                    "lambda_cubic" => Ok(IntegerLattice::lambda_cubic()),
                    "hodge_eisenstein" => Ok(IntegerLattice::hodge_eisenstein(need_d()?)),
                    "k3_degree2_eisenstein" => Ok(IntegerLattice::k3_degree2_eisenstein()),
                    other => IntegerLattice::make_named(other),
                }
            }
        }
    }

    pub fn of(l: &IntegerLattice) -> Self {
        match (l.family(), l.provenance()) {
            (Family::Lambda2d { d }, _) => LatticeSpec::Named {
                name: "lambda_2d".into(),
                d: Some(*d),
            },
            (Family::LambdaCubic, _) => LatticeSpec::Named {
                name: "lambda_cubic".into(),
                d: None,
            },
            _ => LatticeSpec::Gram {
                gram: l.gram().to_i64_rows().expect("gram fits i64"),
                hyperbolic_planes: l.hyperbolic_planes(),
            },
        }
    }
}

/// The integer vector as i64 when it fits.
pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}
