use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistcalc_core::algebra::{Algebra, MatAlgebra, MatEndo};
use twistcalc_core::arith::Field;
use twistcalc_core::deriv::{presets, TwistPair};
use twistcalc_core::hochschild::{leibniz_solution_dim, HochschildError, TwistedBimodule};
use twistcalc_core::linalg::Matrix;

fn random_invertible<R: Rng>(alg: &MatAlgebra, rng: &mut R) -> Matrix {
    loop {
        let m = alg.random_elem(rng, 0);
        if m.determinant().is_ok_and(|d| !d.is_zero()) {
            return m;
        }
    }
}

fn random_pair<R: Rng>(n: usize, rng: &mut R) -> TwistPair<MatAlgebra> {
    let alg = MatAlgebra::new(n);
    let s = MatEndo::conj(random_invertible(&alg, rng)).unwrap();
    let t = MatEndo::conj(random_invertible(&alg, rng)).unwrap();
    TwistPair::new(alg, s, t).unwrap()
}

#[test]
fn differential_squares_to_zero_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let m = TwistedBimodule::new(random_pair(2, &mut rng), 1).unwrap();
        assert!(m.check_axioms());
        assert!(m.square_zero(1).unwrap());
        assert!(m.square_zero(2).unwrap());
    }
}

#[test]
fn degree_zero_is_one_dimensional() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [2, 3] {
        for _ in 0..3 {
            let pair = random_pair(n, &mut rng);
            let m = TwistedBimodule::new(pair.clone(), 1).unwrap();
            let h0 = m.cohomology(0).unwrap();
            assert_eq!(h0.dim_h, 1);
            let rep = m.zero_cochain_as_matrix(&h0.representatives[0]);
            let expected = pair
                .sigma
                .matrix(n)
                .mul(&pair.tau.matrix(n).inverse().unwrap());
            assert!(rep.is_proportional_to(&expected));
        }
    }
}

#[test]
fn first_cocycles_match_leibniz_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let pair = random_pair(2, &mut rng);
        let m = TwistedBimodule::new(pair.clone(), 1).unwrap();
        assert_eq!(m.cohomology(1).unwrap().dim_z, leibniz_solution_dim(&pair));
    }
}

#[test]
fn untwisted_matrix_algebra() {
    let alg = MatAlgebra::new(2);
    let pair = TwistPair::new(alg, MatEndo::Identity, MatEndo::Identity).unwrap();
    let m = TwistedBimodule::new(pair, 1).unwrap();
    assert_eq!(m.cohomology(0).unwrap().dim_h, 1);
    assert_eq!(m.cohomology(1).unwrap().dim_h, 0);
    assert_eq!(m.cohomology(2).unwrap().dim_h, 0);
}

#[test]
fn copies_multiply_dimensions() {
    let m = TwistedBimodule::new(presets::matrix_pair(), 2).unwrap();
    assert_eq!(m.cohomology(0).unwrap().dim_h, 2);
    assert_eq!(m.cohomology(1).unwrap().dim_h, 0);
}

#[test]
fn budget_is_enforced() {
    let m = TwistedBimodule::new(presets::matrix_pair(), 1)
        .unwrap()
        .with_budget(100);
    assert!(matches!(
        m.build_differential(2),
        Err(HochschildError::DimensionBudgetExceeded { .. })
    ));
    assert!(matches!(
        m.cohomology(3),
        Err(HochschildError::DegreeOutOfRange { .. })
    ));
}
