use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use fqhyper_core::character::MultChar;
use fqhyper_core::charsum::{gauss_table, gauss_table_twisted, jacobi_direct, jacobi_via_gauss};
use fqhyper_core::cyclotomic::{CycloNumber, Rational};
use fqhyper_core::field::{extend, make_field};
use fqhyper_core::hypergeometric::{hgf_naive, Hypergeometric, LauricellaParams};
use fqhyper_core::lseries::{exp_series, TruncSeries};
use fqhyper_core::varieties::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

const FIELDS: [(u64, u32); 6] = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)];

fn cyclo(order: u64) -> impl Strategy<Value = CycloNumber> {
    (
        prop::collection::vec(-20i64..20, order as usize),
        1i64..6,
    )
        .prop_map(move |(c, den)| {
            let coeffs: Vec<Rational> = c
                .into_iter()
                .map(|x| Rational::new(BigInt::from(x), BigInt::from(den)))
                .collect();
            CycloNumber::from_rationals(order, &coeffs)
        })
}

fn order_and_two() -> impl Strategy<Value = (CycloNumber, CycloNumber, CycloNumber)> {
    prop::sample::select(vec![1u64, 3, 4, 5, 6, 8, 12, 15, 20])
        .prop_flat_map(|n| (cyclo(n), cyclo(n), cyclo(n)))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn cyclotomic_ring_laws((x, y, z) in order_and_two()) {
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
    }

    #[test]
    fn inverses_and_embeddings((x, y, _z) in order_and_two(), k in 2u64..4) {
        let n = x.order();
        if !x.is_zero() {
            prop_assert!((&x * &x.invert().unwrap()).is_one());
        }
        let big = x.embed(n * k).unwrap();
        prop_assert_eq!(big.descend(n), Some(x.clone()));
        prop_assert_eq!(&big * &y.embed(n * k).unwrap(), (&x * &y).embed(n * k).unwrap());
        let zx = x.complex_value(15) * y.complex_value(15);
        let zxy = (&x * &y).complex_value(15);
        prop_assert!((zx - zxy).norm() < 1e-6 * (1.0 + zx.norm()));
    }

    #[test]
    fn galois_action_is_a_ring_map((x, y, _z) in order_and_two(), u in 1u64..40) {
        let n = x.order();
        prop_assume!(u.gcd(&n) == 1);
        prop_assert_eq!((&x * &y).galois(u), &x.galois(u) * &y.galois(u));
        prop_assert_eq!((&x + &y).galois(u), &x.galois(u) + &y.galois(u));
    }

    #[test]
    fn field_axioms(fi in 0usize..FIELDS.len(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let (p, f) = FIELDS[fi];
        let k = make_field(p, f).unwrap();
        let (a, b, c) = (a % k.q(), b % k.q(), c % k.q());
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.sub(k.add(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
            prop_assert_eq!(k.exp(k.dlog(a).unwrap() as i64), a);
        }
        let frob = |x| k.pow(x, p);
        prop_assert_eq!(frob(k.add(a, b)), k.add(frob(a), frob(b)));
        prop_assert_eq!(k.trace(k.add(a, b)), (k.trace(a) + k.trace(b)) % p as u32);
    }

    #[test]
    fn characters_are_multiplicative(fi in 0usize..FIELDS.len(), e in 0i64..200, x in any::<u32>(), y in any::<u32>()) {
        let (p, f) = FIELDS[fi];
        let k = make_field(p, f).unwrap();
        let (x, y) = (1 + x % (k.q() - 1), 1 + y % (k.q() - 1));
        let chi = MultChar::new(&k, e);
        prop_assert_eq!(chi.eval(k.mul(x, y)), &chi.eval(x) * &chi.eval(y));
        prop_assert_eq!(chi.conj().eval(x), chi.eval(x).conj());
    }

    #[test]
    fn gauss_sums_have_absolute_value_sqrt_q(fi in 0usize..FIELDS.len(), e in 1i64..200) {
        let (p, f) = FIELDS[fi];
        let k = make_field(p, f).unwrap();
        let q1 = k.order() as i64;
        prop_assume!(e % q1 != 0);
        let t = gauss_table(&k);
        let g = t.g(e);
        prop_assert_eq!(g * &g.conj(), CycloNumber::from_int(g.order(), k.q() as i64));
    }

    #[test]
    fn jacobi_routes_agree(fi in 0usize..FIELDS.len(), es in prop::collection::vec(0i64..200, 2..4)) {
        let (p, f) = FIELDS[fi];
        let k = make_field(p, f).unwrap();
        let chars: Vec<MultChar> = es.iter().map(|&e| MultChar::new(&k, e)).collect();
        prop_assert_eq!(jacobi_direct(&chars).unwrap(), jacobi_via_gauss(&chars).unwrap());
    }

    #[test]
    fn davenport_hasse_lifting(e in 1i64..4, r in 2u32..4) {
        let k = make_field(5, 1).unwrap();
        let tower = extend(&k, r).unwrap();
        let lifted = MultChar::new(&k, e).norm_pullback(&tower).unwrap();
        let g = gauss_table(&k).g(e).clone();
        let gr = gauss_table(tower.ext()).g(lifted.exponent() as i64).clone();
        prop_assert_eq!(gr.clone(), g.pow(r as i64).unwrap().embed(gr.order()).unwrap());
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn hypergeometric_values_ignore_psi_and_lie_in_q_zeta(
        qi in 0usize..3,
        a in prop::collection::vec(0i64..12, 3),
        lam in any::<u32>(),
        twist in any::<u32>(),
    ) {
        let q = [5u64, 7, 13][qi];
        let k = make_field(q, 1).unwrap();
        let q1 = q - 1;
        let lam = lam % q as u32;
        let twist = 1 + twist % (q as u32 - 1);
        let plain = Hypergeometric::new(&k).hgf(&a[..2], &a[2..], lam).unwrap();
        let twisted = Hypergeometric::with_twist(&k, twist).unwrap().hgf(&a[..2], &a[2..], lam).unwrap();
        prop_assert_eq!(&plain, &twisted);
        prop_assert_eq!(plain.order(), q1);
        let naive = hgf_naive(&gauss_table_twisted(&k, twist).unwrap(), &a[..2], &a[2..], lam).unwrap();
        prop_assert!(naive.lies_in(q1));
        prop_assert_eq!(naive, plain);
    }

    #[test]
    fn lauricella_d_ignores_psi(
        b in prop::collection::vec(0i64..6, 2),
        a in 0i64..6,
        c in 0i64..6,
        l1 in 1u32..7,
        l2 in 1u32..7,
        twist in 2u32..7,
    ) {
        let k = make_field(7, 1).unwrap();
        let p = LauricellaParams::fd(a, b, c);
        let x = Hypergeometric::new(&k).lauricella(&p, &[l1, l2]).unwrap();
        let y = Hypergeometric::with_twist(&k, twist).unwrap().lauricella(&p, &[l1, l2]).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn characters_decompose_point_counts(
        ex in prop::collection::vec(1i64..3, 3),
        lam in 2u32..5,
    ) {
        let k = make_field(5, 1).unwrap();
        let v = VarietySpec::new(&k, Family::CD, 2, ex, vec![lam]).unwrap();
        let lim = Limits::default();
        let counts: Vec<ChiCount> = (0..2)
            .map(|m| chi_char_sum(&v, m, 1, &lim).unwrap())
            .collect();
        prop_assert_eq!(sum_over_m(&counts), Some(brute_count(&v, 1, &lim).unwrap().into()));
        let fixed: Vec<ChiCount> = (0..2)
            .map(|m| chi_fixed_point(&v, m, 1, &lim).unwrap())
            .collect();
        prop_assert_eq!(
            counts.iter().map(|c| &c.value).collect::<Vec<_>>(),
            fixed.iter().map(|c| &c.value).collect::<Vec<_>>()
        );
    }

    #[test]
    fn conjugate_characters_conjugate_counts(
        ex in prop::collection::vec(1i64..3, 4),
        l1 in 2u32..7,
        l2 in 2u32..7,
        m in 1i64..3,
    ) {
        prop_assume!(l1 != l2);
        let k = make_field(7, 1).unwrap();
        let v = VarietySpec::new(&k, Family::CD, 3, ex, vec![l1, l2]).unwrap();
        let lim = Limits::default();
        let a = chi_char_sum(&v, m, 1, &lim).unwrap().value;
        let b = chi_char_sum(&v, 3 - m, 1, &lim).unwrap().value;
        prop_assert_eq!(a.conj(), b);
    }

    #[test]
    fn exp_series_is_multiplicative(
        xs in prop::collection::vec(-30i64..30, 5),
        ys in prop::collection::vec(-30i64..30, 5),
    ) {
        let c = |v: &[i64]| v.iter().map(|&x| CycloNumber::from_int(1, x)).collect::<Vec<_>>();
        let sum: Vec<i64> = xs.iter().zip(&ys).map(|(x, y)| x + y).collect();
        let ex = exp_series(&c(&xs));
        prop_assert_eq!(ex.mul(&exp_series(&c(&ys))), exp_series(&c(&sum)));
        let inv = ex.inverse().unwrap();
        prop_assert_eq!(ex.mul(&inv), TruncSeries::one(1, 5));
        let neg: Vec<i64> = xs.iter().map(|x| -x).collect();
        prop_assert_eq!(inv, exp_series(&c(&neg)));
    }
}
