use std::sync::Arc;

use fqhyper_core::cyclotomic::{CycloNumber, Rational};
use fqhyper_core::field::{make_field, FqField};
use fqhyper_core::lseries::*;
use fqhyper_core::varieties::*;

fn spec(k: &Arc<FqField>, fam: Family, d: u64, ex: Vec<i64>, lam: Vec<u32>) -> VarietySpec {
    VarietySpec::new(k, fam, d, ex, lam).unwrap()
}

fn big_limits() -> Limits {
    Limits {
        enumeration: 50_000_000,
        field_bound: 6_000_000,
    }
}

/// L(X_D, χ^m) is a polynomial of degree exactly n + 1 with reciprocal roots of modulus √q.
fn check_degree(v: &VarietySpec, r_max: u32) {
    let n = v.n();
    let lim = big_limits();
    for m in 1..v.d() as i64 {
        let l = artin_l(v, m, r_max, Route::CharSum, &lim).unwrap();
        let poly = detect_polynomial(&l, n + 1).unwrap().expect("vanishing tail");
        assert_eq!(poly.degree, n + 1, "m = {m}");
        if r_max as usize >= n + 3 {
            assert!(detect_polynomial(&l, n).unwrap().is_none());
        }
        let report = weil_check(&poly, v.field().q() as u64, 1, 1e-9).unwrap();
        assert!(report.pass, "m = {m}: {report:?}");
    }
}

#[test]
fn smooth_curve_l_functions_are_polynomials() {
    let k = make_field(7, 1).unwrap();
    check_degree(&spec(&k, Family::XD, 3, vec![1, 1, 1, 1], vec![2, 3]), 6);
    check_degree(&spec(&k, Family::XD, 2, vec![1, 1, 1], vec![3]), 6);
}

fn corollary_instances() -> Vec<VarietySpec> {
    let f3 = make_field(3, 1).unwrap();
    let f4 = make_field(2, 2).unwrap();
    let g = f4.generator();
    let g2 = f4.mul(g, g);
    vec![
        spec(&f3, Family::CD, 2, vec![1, 1, 1], vec![2]),
        spec(&f3, Family::SD, 2, vec![1, 1, 1, 1], vec![2, 2]),
        spec(&f4, Family::SA, 3, vec![1, 1, 2, 1, 2], vec![g, g2]),
        spec(&f4, Family::SB, 3, vec![1, 2, 1, 1, 1], vec![g, g2]),
        spec(&f4, Family::SC, 3, vec![1, 1, 1, 2], vec![g, g2]),
        spec(&f4, Family::S4, 3, vec![1, 1, 3, 3], vec![g, g2]),
    ]
}

#[test]
fn corollary_assemblies_match_counts() {
    let lim = Limits::default();
    for v in corollary_instances() {
        for m in 0..v.d() as i64 {
            let theorem = l_from_theorem(&v, m, 3, &lim).unwrap();
            let counted = artin_l(&v, m, 3, Route::CharSum, &lim).unwrap();
            assert_eq!(theorem, counted, "{:?} m = {m}", v.descriptor());
        }
    }
}

#[test]
fn s4_factor_enters_inverted() {
    let lim = Limits::default();
    let v = corollary_instances().pop().unwrap();
    let counted = artin_l(&v, 1, 3, Route::CharSum, &lim).unwrap();
    let direct = l_from_theorem_with(&v, 1, 3, &lim, S4Factor::Direct).unwrap();
    assert_ne!(direct, counted);
}

#[test]
fn product_of_l_functions_is_zeta() {
    let lim = Limits::default();
    let f5 = make_field(5, 1).unwrap();
    let f7 = make_field(7, 1).unwrap();
    let cases = [
        (spec(&f5, Family::CD, 2, vec![1, 1, 1], vec![2]), 4),
        (spec(&f7, Family::XD, 3, vec![1, 1, 1, 1], vec![2, 3]), 3),
        (spec(&f5, Family::SD, 2, vec![1, 1, 1, 1], vec![2, 3]), 2),
        (spec(&f7, Family::S4, 3, vec![1, 1, 3, 3], vec![2, 3]), 2),
    ];
    for (v, r) in cases {
        let z = zeta(&v, r, &lim).unwrap();
        let zs = z.rationals().unwrap();
        assert!(zs.iter().all(|c| c.is_integer() && *c > Rational::from_integer(0.into())));
        let prod = product_of_l(&v, r, Route::CharSum, &lim).unwrap();
        let z_d = TruncSeries {
            coeffs: z.coeffs.iter().map(|c| c.embed(v.d()).unwrap()).collect(),
        };
        assert_eq!(prod, z_d, "{:?}", v.descriptor());
    }
}

#[test]
fn trivial_character_l_functions() {
    let lim = Limits::default();
    let f5 = make_field(5, 1).unwrap();
    let cd = spec(&f5, Family::CD, 2, vec![1, 1, 1], vec![2]);
    let l = artin_l(&cd, 0, 4, Route::FixedPoint, &lim).unwrap();
    for (i, c) in l.coeffs.iter().enumerate() {
        assert_eq!(c, &CycloNumber::from_int(2, 5i64.pow(i as u32)));
    }
    let sd = spec(&f5, Family::SD, 2, vec![1, 1, 1, 1], vec![2, 3]);
    let l = artin_l(&sd, 0, 2, Route::FixedPoint, &lim).unwrap();
    assert_eq!(l, l_from_theorem(&sd, 0, 2, &lim).unwrap());
    assert_eq!(l.coeffs[2], CycloNumber::from_int(2, 625));
}
