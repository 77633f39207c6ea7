use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twistcalc_core::algebra::{Algebra, MatAlgebra, MatEndo, PolyAlgebra, Subst};
use twistcalc_core::arith::{Field, Scalar, XPoly};
use twistcalc_core::deriv::{
    inner_decompose, is_symmetric, presets, verify_twisted_leibniz, DerivError, HlsGenerator,
    LeibnizStyle, TwistPair, TwistedDerivation,
};
use twistcalc_core::linalg::Matrix;
use twistcalc_core::{Bounds, Dimension};

fn int_poly(max_len: usize) -> impl Strategy<Value = XPoly> {
    prop::collection::vec(-3i64..=3, 0..max_len)
        .prop_map(|cs| XPoly::from_coeffs(cs.into_iter().map(Scalar::from_int).collect()))
}

fn invertible_2x2() -> impl Strategy<Value = Matrix> {
    prop::array::uniform4(-3i64..=3)
        .prop_filter("invertible", |e| e[0] * e[3] - e[1] * e[2] != 0)
        .prop_map(|e| Matrix::from_ints(&[&[e[0], e[1]], &[e[2], e[3]]]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn substitutions_are_multiplicative(s in int_poly(3), f in int_poly(4), g in int_poly(4)) {
        let e = Subst::new(s);
        prop_assert_eq!(PolyAlgebra.apply(&e, &(&f * &g)), &PolyAlgebra.apply(&e, &f) * &PolyAlgebra.apply(&e, &g));
        prop_assert!(PolyAlgebra.apply(&e, &XPoly::one()).is_one());
    }

    #[test]
    fn affine_inverse_round_trips(a in 1i64..=4, b in -3i64..=3, f in int_poly(5)) {
        let e = Subst::affine(Scalar::from_int(a), Scalar::from_int(b));
        let inv = PolyAlgebra.inverse_endo(&e).unwrap();
        prop_assert_eq!(PolyAlgebra.apply(&inv, &PolyAlgebra.apply(&e, &f)), f);
    }

    #[test]
    fn conjugation_is_multiplicative(u in invertible_2x2(), a in invertible_2x2(), b in invertible_2x2()) {
        let alg = MatAlgebra::new(2);
        let e = alg.conj(u).unwrap();
        prop_assert_eq!(alg.apply(&e, &a.mul(&b)), alg.apply(&e, &a).mul(&alg.apply(&e, &b)));
        let inv = alg.inverse_endo(&e).unwrap();
        prop_assert_eq!(alg.apply(&inv, &alg.apply(&e, &a)), a);
    }

    #[test]
    fn generator_recursion_defines_a_derivation(s in int_poly(3), t in int_poly(3), f0 in int_poly(3)) {
        let pair = TwistPair::new(PolyAlgebra, Subst::new(s), Subst::new(t)).unwrap();
        let x = TwistedDerivation::from_generator_image(pair, f0);
        prop_assert!(verify_twisted_leibniz(&x, LeibnizStyle::SigmaTau, 4).holds());
        prop_assert!(is_symmetric(&x, 4).symmetric());
    }

    #[test]
    fn inner_iff_divisible(s in int_poly(3), f0 in int_poly(3)) {
        let pair = TwistPair::new(PolyAlgebra, Subst::new(s), Subst::identity()).unwrap();
        let dx = pair.delta(&XPoly::var());
        prop_assume!(!dx.is_zero());
        let x = TwistedDerivation::from_generator_image(pair, f0.clone());
        let decomposed = inner_decompose(&x, &Bounds::default());
        prop_assert_eq!(decomposed.is_ok(), dx.divides(&f0));
        if let Ok(d) = decomposed {
            prop_assert_eq!(&d.m0 * &dx, f0);
        }
    }

    #[test]
    fn inner_matrix_derivations(s in invertible_2x2(), t in invertible_2x2(), m0 in invertible_2x2()) {
        let alg = MatAlgebra::new(2);
        let pair = TwistPair::new(alg, alg.conj(s).unwrap(), alg.conj(t).unwrap()).unwrap();
        let x = TwistedDerivation::inner(pair, m0).unwrap();
        prop_assert!(verify_twisted_leibniz(&x, LeibnizStyle::SigmaTau, 0).holds());
        let tab = x.tabulated();
        let d = inner_decompose(&tab, &Bounds::default()).unwrap();
        prop_assert!(d.verified);
    }
}

#[test]
fn jackson_is_outer_and_not_inner() {
    let x = presets::jackson();
    assert!(matches!(
        inner_decompose(&x, &Bounds::default()),
        Err(DerivError::NotInner { .. })
    ));
}

#[test]
fn translation_decomposition_is_unique() {
    let pair = presets::translation_pair(Scalar::from_int(2));
    let x = TwistedDerivation::from_generator_image(pair, XPoly::var());
    let d = inner_decompose(&x, &Bounds::default()).unwrap();
    assert_eq!(d.solution_dim, Dimension::Finite(0));
    // X(x) = m₀·δ(x) with δ(x) = 2
    assert_eq!(d.m0, XPoly::var().scale(&Scalar::rational(1, 2)));
}

#[test]
fn hls_rejects_equal_twists() {
    let pair = TwistPair::new(PolyAlgebra, Subst::identity(), Subst::identity()).unwrap();
    assert_eq!(
        HlsGenerator::new(pair).unwrap_err(),
        DerivError::SigmaEqualsTau
    );
}

#[test]
fn untwisted_matrix_derivations_are_inner() {
    let alg = MatAlgebra::new(2);
    let pair = TwistPair::new(alg, MatEndo::Identity, MatEndo::Identity).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m0 = alg.random_elem(&mut rng, 0);
    let x = TwistedDerivation::inner(pair, m0).unwrap().tabulated();
    let d = inner_decompose(&x, &Bounds::default()).unwrap();
    assert!(d.verified);
    // the commutator with the identity is zero, so m₀ is only fixed up to the centre
    assert_eq!(d.solution_dim, Dimension::Finite(1));
}
