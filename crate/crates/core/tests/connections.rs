use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twistcalc_core::algebra::{Algebra, MatAlgebra, MatEndo, PolyAlgebra};
use twistcalc_core::arith::{Field, Scalar, XPoly};
use twistcalc_core::deriv::{presets, TwistPair, TwistedDerivation};
use twistcalc_core::geometry::commutative::{CommutativeConnection, CommutativeLie};
use twistcalc_core::geometry::{
    check_connection_axioms, curvature, is_flat, search_nonzero_unique_curvature,
    twisted_linearity_check, unique_symmetric_connection, Connection, ConnectionRule,
    GeometryError, LieStructure, MatrixExample, SigmaAlgebra, SigmaModule,
};
use twistcalc_core::linalg::Matrix;
use twistcalc_core::Bounds;

fn bounds() -> Bounds {
    Bounds {
        degree_bound: 4,
        ..Bounds::default()
    }
}

#[test]
fn random_connections_satisfy_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let s = SigmaAlgebra::new(PolyAlgebra, vec![presets::jackson()]).unwrap();
    let md = SigmaModule::canonical_free(&s, 2);
    for seed in 0..10 {
        let gamma = vec![(0..2).map(|_| md.random(&mut rng, 2)).collect()];
        let conn = Connection::new(
            s.clone(),
            md.clone(),
            ConnectionRule::Christoffel { gamma },
            &bounds(),
        )
        .unwrap();
        let b = Bounds { seed, ..bounds() };
        assert!(check_connection_axioms(&conn, &b).holds());
    }
}

#[test]
fn projective_module_connection() {
    let alg = MatAlgebra::new(2);
    let pair = presets::mat_pair(
        alg,
        alg.conj(Matrix::from_ints(&[&[1, 0], &[0, 3]])).unwrap(),
        MatEndo::Identity,
    );
    let s = SigmaAlgebra::new(alg, vec![TwistedDerivation::delta(pair)]).unwrap();
    let p = Matrix::from_ints(&[&[1, 0], &[0, 0]]);
    let md = SigmaModule::projective(&s, p).unwrap();
    assert!(md.check_module_maps(&s, 0));
    let conn = unique_symmetric_connection(&s, &md, &bounds()).unwrap();
    assert!(check_connection_axioms(&conn, &bounds()).holds());
}

#[test]
fn non_symmetric_family_is_rejected() {
    let alg = MatAlgebra::new(2);
    let pair = presets::matrix_pair();
    let x = TwistedDerivation::inner(pair, alg.unit(0, 1)).unwrap();
    let s = SigmaAlgebra::new(alg, vec![x]).unwrap();
    let md = SigmaModule::canonical_free(&s, 1);
    assert_eq!(
        unique_symmetric_connection(&s, &md, &bounds()).unwrap_err(),
        GeometryError::NotSymmetricAlgebra { index: 0 }
    );
}

#[test]
fn twisted_tau_hat_breaks_hypotheses() {
    let alg = MatAlgebra::new(2);
    let pair = TwistPair::new(
        alg,
        alg.conj(Matrix::from_ints(&[&[1, 0], &[0, 2]])).unwrap(),
        alg.conj(Matrix::from_ints(&[&[1, 1], &[0, 1]])).unwrap(),
    )
    .unwrap();
    let x = TwistedDerivation::delta(pair);
    let s = SigmaAlgebra::new(alg, vec![x.clone(), x]).unwrap();
    let md = SigmaModule::canonical_free(&s, 1);
    let gamma = vec![vec![vec![alg.unit(0, 1)]], vec![vec![alg.unit(1, 0)]]];
    let conn = Connection::new(s, md, ConnectionRule::Christoffel { gamma }, &bounds()).unwrap();
    let report = twisted_linearity_check(&conn, &LieStructure::flip(2), &bounds()).unwrap();
    assert!(!report.hypotheses_hold());
    assert!(matches!(
        report.into_result(),
        Err(GeometryError::HypothesesFail { .. })
    ));
}

#[test]
fn untwisted_gamma_zero_connection_is_flat() {
    let alg = MatAlgebra::new(2);
    let ex = MatrixExample::new(
        alg,
        vec![
            Matrix::from_ints(&[&[1, 0], &[0, 2]]),
            Matrix::from_ints(&[&[1, 0], &[0, 5]]),
        ],
        vec![alg.one(), alg.one()],
    )
    .unwrap();
    assert!(is_flat(&ex.connection(), &LieStructure::flip(2), 0).unwrap());
}

#[test]
fn seeded_search_is_deterministic() {
    let a = search_nonzero_unique_curvature(2, &Bounds::default())
        .unwrap()
        .unwrap();
    let b = search_nonzero_unique_curvature(2, &Bounds::default())
        .unwrap()
        .unwrap();
    assert_eq!(a, b);
    let conn = a.0.connection();
    let r = curvature(
        &conn,
        &LieStructure::flip(2),
        0,
        1,
        std::slice::from_ref(&a.1),
    )
    .unwrap();
    assert_eq!(r[0], a.2);
}

#[test]
fn gamma_connection_curvature_is_generally_nonzero() {
    let lie = CommutativeLie::new(presets::translation_pair(Scalar::one())).unwrap();
    let table = twistcalc_core::algebra::MonomialTable::from_fn(10, |k| {
        XPoly::monomial(Scalar::from_int(k as i64 + 1), 0)
    });
    let conn = CommutativeConnection::GammaRank1(table);
    let mut nonzero = 0;
    for i in 0..4 {
        for j in 0..4 {
            let (f, g) = (
                XPoly::monomial(Scalar::one(), i),
                XPoly::monomial(Scalar::one(), j),
            );
            let r = conn.curvature(&lie, &f, &g, &XPoly::one()).unwrap();
            assert_eq!(r, conn.curvature_closed_form(&lie, &f, &g).unwrap());
            nonzero += usize::from(!r.is_zero());
        }
    }
    assert!(nonzero > 0);
}
