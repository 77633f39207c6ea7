use proptest::prelude::*;
use twistcalc_core::arith::{rat, Field, QPoly, RatFunc, Scalar, XPoly};

fn qpoly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec(-4i64..=4, 0..4)
        .prop_map(|cs| QPoly::from_coeffs(cs.into_iter().map(|c| rat(c, 1)).collect()))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop_oneof![
        (-6i64..=6, 1i64..=5).prop_map(|(n, d)| Scalar::rational(n, d)),
        (qpoly(), qpoly()).prop_filter_map("nonzero denominator", |(n, d)| {
            RatFunc::new(n, d).ok().map(Scalar::from_func)
        }),
    ]
}

fn xpoly() -> impl Strategy<Value = XPoly> {
    prop::collection::vec(scalar(), 0..4).prop_map(XPoly::from_coeffs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.plus(&b), b.plus(&a));
        prop_assert_eq!(a.times(&b), b.times(&a));
        prop_assert_eq!(a.plus(&b).plus(&c), a.plus(&b.plus(&c)));
        prop_assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        prop_assert_eq!(a.minus(&a), Scalar::zero());
        if let Some(inv) = a.inverse() {
            prop_assert!(a.times(&inv).is_one());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn canonical_form_is_idempotent(n in qpoly(), d in qpoly()) {
        if let Ok(f) = RatFunc::new(n, d) {
            prop_assert_eq!(f.normalized(), f.clone());
            let den = f.den();
            prop_assert!(den.leading_coeff().is_some_and(|c| *c == rat(1, 1)));
            prop_assert!(f.num().gcd(den).is_one() || f.num().is_zero());
        }
    }

    #[test]
    fn exact_division_and_remainder(a in xpoly(), b in xpoly()) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a.clone());
        prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
        let prod = &a * &b;
        prop_assert_eq!(prod.div_exact(&b).unwrap(), a.clone());
        prop_assert!(prod.rem(&b).unwrap().is_zero());
    }

    #[test]
    fn gcd_divides_both(a in xpoly(), b in xpoly(), c in xpoly()) {
        let g = (&a * &c).gcd(&(&b * &c));
        prop_assert!(g.divides(&(&a * &c)));
        prop_assert!(g.divides(&(&b * &c)));
        if !c.is_zero() {
            prop_assert!(c.divides(&g));
        }
        if !g.is_zero() {
            prop_assert_eq!(g.leading_coeff().unwrap(), &Scalar::one());
        }
    }

    #[test]
    fn composition_is_a_homomorphism(a in xpoly(), b in xpoly(), s in xpoly()) {
        prop_assert_eq!((&a * &b).compose(&s), &a.compose(&s) * &b.compose(&s));
        prop_assert_eq!((&a + &b).compose(&s), &a.compose(&s) + &b.compose(&s));
    }
}

#[test]
fn printing() {
    let f = RatFunc::new(
        QPoly::one(),
        QPoly::from_coeffs(vec![rat(-1, 1), rat(1, 1)]),
    )
    .unwrap();
    assert_eq!(Scalar::from_func(f).to_string(), "1/(q-1)");
    assert_eq!(Scalar::rational(6, 4).to_string(), "3/2");
}

#[test]
fn division_by_zero_is_an_error() {
    assert!(RatFunc::new(QPoly::one(), QPoly::zero()).is_err());
    assert!(XPoly::one().div_rem(&XPoly::zero()).is_err());
}
