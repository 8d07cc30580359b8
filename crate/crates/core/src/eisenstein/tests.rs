use super::*;
use crate::arith::rat;
use crate::lattice::IntegerLattice;

fn element_with_q(d: &DiscriminantForm, q: Rational) -> DiscElement {
    d.elements()
        .into_iter()
        .find(|e| d.q(e).into_value() == q)
        .expect("element with the requested norm")
}

#[test]
fn lambda6_gold_coefficients() {
    let e = Eisenstein::new(&IntegerLattice::lambda_2d(3), 21).unwrap();
    let g = DiscElement(vec![2]);
    assert_eq!(e.disc().q(&g).into_value(), rat(2, 3));
    assert_eq!(e.coefficient(&rat(1, 3), &g).unwrap(), rat(-523777, 206215591));
    let c = e.coefficient(&rat(4, 3), &g).unwrap();
    assert_eq!(c, Rational::new(BigInt::from(-274609995265i64), BigInt::from(206215591)));
    let c = e.coefficient(&rat(7, 3), &g).unwrap();
    assert_eq!(c, Rational::new(BigInt::from(-55921251768096i64), BigInt::from(206215591)));
}

#[test]
fn f2_gold_coefficient() {
    let e = Eisenstein::new(&IntegerLattice::k3_degree2_eisenstein(), 20).unwrap();
    let ell = element_with_q(e.disc(), rat(3, 4));
    assert_eq!(e.coefficient(&rat(1, 4), &ell).unwrap(), rat(-1, 1984));
}

#[test]
fn hodge_lattice_coefficients() {
    let e = Eisenstein::new(&IntegerLattice::hodge_eisenstein(1), 7).unwrap();
    let ell = element_with_q(e.disc(), rat(1, 4));
    assert_eq!(e.coefficient(&rat(1, 1), &e.disc().zero()).unwrap(), rat(126, 1));
    assert_eq!(e.coefficient(&rat(3, 4), &ell).unwrap(), rat(56, 1));
}

#[test]
fn constant_term_and_support() {
    let e = Eisenstein::new(&IntegerLattice::lambda_2d(3), 21).unwrap();
    let d = e.disc().clone();
    for g in d.elements() {
        let want = if g == d.zero() { Rational::one() } else { Rational::zero() };
        assert_eq!(e.coefficient(&Rational::zero(), &g).unwrap(), want);
    }
    // 1/3 is not ≡ −q(0)
    assert_eq!(e.coefficient(&rat(1, 3), &d.zero()).unwrap(), Rational::zero());
}

#[test]
fn preconditions() {
    let l = IntegerLattice::lambda_2d(3);
    assert!(matches!(Eisenstein::new(&l, 20), Err(EisensteinError::PreconditionFailed(_))));
    // U ⊕ U ⊕ ⟨2⟩ ⊕ ⟨−2⟩: 2k = 6, b⁻ − b⁺ = 0, parity fails
    let bad = IntegerLattice::direct_sum(&[
        IntegerLattice::u(),
        IntegerLattice::u(),
        IntegerLattice::rank1(2).unwrap(),
        IntegerLattice::rank1(-2).unwrap(),
    ]);
    assert!(matches!(Eisenstein::new(&bad, 6), Err(EisensteinError::PreconditionFailed(_))));
}

#[test]
fn numeric_route_reconstructs_at_two_precisions() {
    let e = Eisenstein::new(&IntegerLattice::lambda_2d(3), 21).unwrap();
    let g = DiscElement(vec![2]);
    for n in [rat(1, 3), rat(4, 3)] {
        let exact = e.coefficient(&n, &g).unwrap();
        let lo = e.coefficient_via(&n, &g, Route::Numeric { bits: 160 }).unwrap();
        let hi = e.coefficient_via(&n, &g, Route::Numeric { bits: 160 + 34 }).unwrap();
        assert_eq!(lo, hi);
        assert_eq!(lo, exact);
    }
}

#[test]
fn agrees_with_direct_series_oracle() {
    use crate::weil::{numeric_eisenstein, NumericOptions, WeilRep};
    let l = IntegerLattice::lambda_2d(3);
    let e = Eisenstein::new(&l, 21).unwrap();
    let w = WeilRep::new(&l).unwrap();
    let g = DiscElement(vec![2]);
    let idx = vec![(rat(1, 3), g.clone()), (rat(4, 3), g.clone())];
    let opts = NumericOptions { cutoff: 40, ..Default::default() };
    let got = numeric_eisenstein(&w, 21, &idx, &opts).unwrap();
    for (c, (n, mu)) in got.iter().zip(&idx) {
        let exact = e.coefficient(n, mu).unwrap();
        assert!(c.contains(&exact), "{n}: oracle {c:?} vs exact {exact}");
    }
}

#[test]
fn k3_family_coefficients_are_positive() {
    for d in 1..=10u64 {
        let e = Eisenstein::new(&IntegerLattice::hodge_eisenstein(d), 7).unwrap();
        let disc = e.disc().clone();
        for g in disc.elements() {
            let n = frac(&-disc.q(&g).into_value());
            let n = if n.is_zero() { Rational::one() } else { n };
            let c = e.coefficient(&n, &g).unwrap();
            assert!(c.is_positive(), "d = {d}, γ = {g}: {c}");
        }
    }
}

#[test]
fn densities_match_direct_counts() {
    // a = 1 counts on U² ⊕ ⟨2⟩ ⊕ ... against the stabilized values at good primes
    let l = IntegerLattice::hodge_eisenstein(3);
    let e = Eisenstein::new(&l, 7).unwrap();
    let d = e.disc().clone();
    for g in d.elements() {
        let n = frac(&-d.q(&g).into_value()) + Rational::one();
        let good = GoodFactor::new(7, &l.determinant(), &n);
        for p in [5u64, 7, 11, 13] {
            if e.bad_primes(&n).contains(&p) {
                continue;
            }
            assert_eq!(e.local_density(&g, &n, p).unwrap().value, good.at(p), "p = {p}, γ = {g}");
        }
    }
}
