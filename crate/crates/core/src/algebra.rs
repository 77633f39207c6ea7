//! The two concrete algebras `K[x]` and `M_N(K)`, their endomorphisms and
//! linear maps on them.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::arith::{Field, Scalar, XPoly};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("handle mismatch: expected {expected}, found {found}")]
    HandleMismatch { expected: String, found: String },
    #[error("endomorphism is not invertible: {0}")]
    NotInvertible(String),
    #[error("degree {degree} exceeds the table bound {bound}")]
    DegreeBoundExceeded { degree: usize, bound: usize },
}

/// A unital associative algebra over `Q` or `Q(q)` with a finite
/// verification basis.
pub trait Algebra: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync;
    type Endo: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn describe(&self) -> String;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }

    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(&self.mul(a, b), &self.mul(b, a))
    }

    /// Rejects elements whose shape does not belong to this algebra.
    fn check_elem(&self, a: &Self::Elem) -> Result<(), AlgebraError>;
    fn check_endo(&self, e: &Self::Endo) -> Result<(), AlgebraError>;

    /// Algebra generators: `x`, or all matrix units.
    fn generators(&self) -> Vec<Self::Elem>;
    /// Linear verification basis: monomials up to `degree_bound`, or all
    /// matrix units (the bound is ignored for matrices).
    fn basis(&self, degree_bound: usize) -> Vec<Self::Elem>;

    fn apply(&self, e: &Self::Endo, a: &Self::Elem) -> Self::Elem;
    fn identity_endo(&self) -> Self::Endo;
    /// `e1 ∘ e2`, applying `e2` first.
    fn compose(&self, e1: &Self::Endo, e2: &Self::Endo) -> Self::Endo;
    fn inverse_endo(&self, e: &Self::Endo) -> Result<Self::Endo, AlgebraError>;

    /// Algebra endomorphisms agree iff they agree on generators.
    fn endo_eq(&self, e1: &Self::Endo, e2: &Self::Endo) -> bool {
        self.generators()
            .iter()
            .all(|g| self.apply(e1, g) == self.apply(e2, g))
    }

    fn is_invertible(&self, a: &Self::Elem) -> bool;
    /// True when `a` is a zero divisor (including zero itself).
    fn is_zero_divisor(&self, a: &Self::Elem) -> bool;

    fn center_contains(&self, a: &Self::Elem) -> bool {
        self.generators()
            .iter()
            .all(|g| self.is_zero(&self.commutator(a, g)))
    }

    /// Random element with small integer coefficients.
    fn random_elem<R: Rng>(&self, rng: &mut R, degree_bound: usize) -> Self::Elem;
}

pub(crate) fn small_int<R: Rng>(rng: &mut R) -> Scalar {
    Scalar::from_int(rng.gen_range(-3..=3))
}

pub(crate) fn small_nonzero<R: Rng>(rng: &mut R) -> Scalar {
    let v = rng.gen_range(1..=3);
    Scalar::from_int(if rng.gen_bool(0.5) { v } else { -v })
}

/// `K[x]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PolyAlgebra;

/// Unital endomorphism of `K[x]`, determined by the image of `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subst {
    pub image: XPoly,
}

impl Subst {
    pub fn new(image: XPoly) -> Self {
        Self { image }
    }

    pub fn identity() -> Self {
        Self::new(XPoly::var())
    }

    /// `x ↦ a·x + b`.
    pub fn affine(a: Scalar, b: Scalar) -> Self {
        Self::new(XPoly::from_coeffs(vec![b, a]))
    }

    pub fn is_affine_invertible(&self) -> bool {
        self.image.degree() == Some(1)
    }
}

impl Algebra for PolyAlgebra {
    type Elem = XPoly;
    type Endo = Subst;

    fn describe(&self) -> String {
        "poly".to_string()
    }
    fn zero(&self) -> XPoly {
        XPoly::zero()
    }
    fn one(&self) -> XPoly {
        XPoly::one()
    }
    fn add(&self, a: &XPoly, b: &XPoly) -> XPoly {
        a + b
    }
    fn sub(&self, a: &XPoly, b: &XPoly) -> XPoly {
        a - b
    }
    fn mul(&self, a: &XPoly, b: &XPoly) -> XPoly {
        a * b
    }
    fn neg(&self, a: &XPoly) -> XPoly {
        -a
    }
    fn scale(&self, c: &Scalar, a: &XPoly) -> XPoly {
        a.scale(c)
    }
    fn is_zero(&self, a: &XPoly) -> bool {
        a.is_zero()
    }
    fn commutator(&self, _a: &XPoly, _b: &XPoly) -> XPoly {
        XPoly::zero()
    }
    fn check_elem(&self, _a: &XPoly) -> Result<(), AlgebraError> {
        Ok(())
    }
    fn check_endo(&self, _e: &Subst) -> Result<(), AlgebraError> {
        Ok(())
    }
    fn generators(&self) -> Vec<XPoly> {
        vec![XPoly::var()]
    }
    fn basis(&self, degree_bound: usize) -> Vec<XPoly> {
        (0..=degree_bound)
            .map(|k| XPoly::monomial(Scalar::one(), k))
            .collect()
    }
    fn apply(&self, e: &Subst, a: &XPoly) -> XPoly {
        a.compose(&e.image)
    }
    fn identity_endo(&self) -> Subst {
        Subst::identity()
    }
    fn compose(&self, e1: &Subst, e2: &Subst) -> Subst {
        Subst::new(self.apply(e1, &e2.image))
    }
    fn inverse_endo(&self, e: &Subst) -> Result<Subst, AlgebraError> {
        if !e.is_affine_invertible() {
            return Err(AlgebraError::NotInvertible(format!(
                "x -> {} is not an affine substitution",
                e.image
            )));
        }
        // x -> (x - b)/a
        let a = e.image.coeff(1);
        let b = e.image.coeff(0);
        let inv_a = a.inverse().expect("degree one");
        Ok(Subst::affine(inv_a.clone(), b.times(&inv_a).negated()))
    }
    fn endo_eq(&self, e1: &Subst, e2: &Subst) -> bool {
        e1.image == e2.image
    }
    fn is_invertible(&self, a: &XPoly) -> bool {
        a.is_unit()
    }
    fn is_zero_divisor(&self, a: &XPoly) -> bool {
        a.is_zero()
    }
    fn center_contains(&self, _a: &XPoly) -> bool {
        true
    }
    fn random_elem<R: Rng>(&self, rng: &mut R, degree_bound: usize) -> XPoly {
        XPoly::from_coeffs((0..=degree_bound).map(|_| small_int(rng)).collect())
    }
}

/// `M_N(K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatAlgebra {
    n: usize,
}

impl MatAlgebra {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "matrix size must be positive");
        Self { n }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Matrix unit `E_ij`.
    pub fn unit(&self, i: usize, j: usize) -> Matrix {
        Matrix::unit(self.n, i, j)
    }

    /// Row-major coordinates of `a`.
    pub fn vectorize(&self, a: &Matrix) -> Vec<Scalar> {
        a.entries().to_vec()
    }

    pub fn devectorize(&self, v: &[Scalar]) -> Matrix {
        Matrix::from_rows(v.chunks(self.n).map(<[Scalar]>::to_vec).collect())
            .expect("vector has N^2 entries")
    }

    pub fn conj(&self, u: Matrix) -> Result<MatEndo, AlgebraError> {
        self.check_elem(&u)?;
        MatEndo::conj(u)
    }
}

/// Endomorphism of `M_N`: identity, or `A ↦ U·A·U⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub enum MatEndo {
    Identity,
    Conj { u: Matrix, u_inv: Matrix },
}

impl MatEndo {
    pub fn conj(u: Matrix) -> Result<Self, AlgebraError> {
        let u_inv = u
            .inverse()
            .map_err(|_| AlgebraError::NotInvertible(format!("{u} is singular")))?;
        Ok(MatEndo::Conj { u, u_inv })
    }

    /// Conjugating matrix (the identity for `Identity`).
    pub fn matrix(&self, n: usize) -> Matrix {
        match self {
            MatEndo::Identity => Matrix::identity(n),
            MatEndo::Conj { u, .. } => u.clone(),
        }
    }
}

impl Algebra for MatAlgebra {
    type Elem = Matrix;
    type Endo = MatEndo;

    fn describe(&self) -> String {
        format!("mat{}", self.n)
    }
    fn zero(&self) -> Matrix {
        Matrix::zeros(self.n, self.n)
    }
    fn one(&self) -> Matrix {
        Matrix::identity(self.n)
    }
    fn add(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.add(b)
    }
    fn sub(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.sub(b)
    }
    fn mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.mul(b)
    }
    fn neg(&self, a: &Matrix) -> Matrix {
        a.neg()
    }
    fn scale(&self, c: &Scalar, a: &Matrix) -> Matrix {
        a.scale(c)
    }
    fn is_zero(&self, a: &Matrix) -> bool {
        a.is_zero()
    }
    fn check_elem(&self, a: &Matrix) -> Result<(), AlgebraError> {
        if a.shape() == (self.n, self.n) {
            Ok(())
        } else {
            Err(AlgebraError::HandleMismatch {
                expected: self.describe(),
                found: format!("{}x{} matrix", a.rows(), a.cols()),
            })
        }
    }
    fn check_endo(&self, e: &MatEndo) -> Result<(), AlgebraError> {
        match e {
            MatEndo::Identity => Ok(()),
            MatEndo::Conj { u, .. } => self.check_elem(u),
        }
    }
    fn generators(&self) -> Vec<Matrix> {
        self.basis(0)
    }
    fn basis(&self, _degree_bound: usize) -> Vec<Matrix> {
        (0..self.n * self.n)
            .map(|k| self.unit(k / self.n, k % self.n))
            .collect()
    }
    fn apply(&self, e: &MatEndo, a: &Matrix) -> Matrix {
        match e {
            MatEndo::Identity => a.clone(),
            MatEndo::Conj { u, u_inv } => u.mul(a).mul(u_inv),
        }
    }
    fn identity_endo(&self) -> MatEndo {
        MatEndo::Identity
    }
    fn compose(&self, e1: &MatEndo, e2: &MatEndo) -> MatEndo {
        match (e1, e2) {
            (MatEndo::Identity, e) | (e, MatEndo::Identity) => e.clone(),
            (MatEndo::Conj { u: u1, u_inv: i1 }, MatEndo::Conj { u: u2, u_inv: i2 }) => {
                MatEndo::Conj {
                    u: u1.mul(u2),
                    u_inv: i2.mul(i1),
                }
            }
        }
    }
    fn inverse_endo(&self, e: &MatEndo) -> Result<MatEndo, AlgebraError> {
        Ok(match e {
            MatEndo::Identity => MatEndo::Identity,
            MatEndo::Conj { u, u_inv } => MatEndo::Conj {
                u: u_inv.clone(),
                u_inv: u.clone(),
            },
        })
    }
    fn is_invertible(&self, a: &Matrix) -> bool {
        !a.determinant().expect("square").is_zero()
    }
    fn is_zero_divisor(&self, a: &Matrix) -> bool {
        !self.is_invertible(a)
    }
    fn random_elem<R: Rng>(&self, rng: &mut R, _degree_bound: usize) -> Matrix {
        Matrix::from_rows(
            (0..self.n)
                .map(|_| (0..self.n).map(|_| small_int(rng)).collect())
                .collect(),
        )
        .expect("square")
    }
}

/// K-linear map on `K[x]` given by the images of `x⁰..x^D`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialTable {
    images: Vec<XPoly>,
}

impl MonomialTable {
    pub fn new(images: Vec<XPoly>) -> Self {
        Self { images }
    }

    pub fn from_fn(degree_bound: usize, f: impl Fn(usize) -> XPoly) -> Self {
        Self::new((0..=degree_bound).map(f).collect())
    }

    pub fn degree_bound(&self) -> usize {
        self.images.len().saturating_sub(1)
    }

    pub fn apply(&self, a: &XPoly) -> Result<XPoly, AlgebraError> {
        let Some(deg) = a.degree() else {
            return Ok(XPoly::zero());
        };
        if deg >= self.images.len() {
            return Err(AlgebraError::DegreeBoundExceeded {
                degree: deg,
                bound: self.degree_bound(),
            });
        }
        Ok(a.coeffs()
            .iter()
            .zip(&self.images)
            .filter(|(c, _)| !c.is_zero())
            .fold(XPoly::zero(), |acc, (c, img)| &acc + &img.scale(c)))
    }
}

/// K-linear map on `M_N` as an `N²×N²` matrix on row-major coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLinearMap {
    alg: MatAlgebra,
    matrix: Matrix,
}

impl MatrixLinearMap {
    pub fn new(alg: MatAlgebra, matrix: Matrix) -> Result<Self, AlgebraError> {
        let d = alg.size() * alg.size();
        if matrix.shape() != (d, d) {
            return Err(AlgebraError::HandleMismatch {
                expected: format!("{d}x{d} map table"),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        Ok(Self { alg, matrix })
    }

    /// Tabulates `f` on the matrix units.
    pub fn from_fn(alg: MatAlgebra, f: impl Fn(&Matrix) -> Matrix) -> Self {
        let images: Vec<Vec<Scalar>> = alg.basis(0).iter().map(|u| alg.vectorize(&f(u))).collect();
        let d = images.len();
        Self {
            alg,
            matrix: Matrix::from_columns(d, &images),
        }
    }

    pub fn algebra(&self) -> MatAlgebra {
        self.alg
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, a: &Matrix) -> Matrix {
        self.alg
            .devectorize(&self.matrix.mul_vec(&self.alg.vectorize(a)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::RatFunc;

    fn xp(c: &[i64]) -> XPoly {
        XPoly::from_coeffs(c.iter().map(|&v| Scalar::from_int(v)).collect())
    }

    #[test]
    fn subst_applies_by_substitution() {
        let q = Scalar::q();
        let sigma = Subst::affine(q.clone(), Scalar::zero());
        let x2 = xp(&[0, 0, 1]);
        assert_eq!(
            PolyAlgebra.apply(&sigma, &x2),
            XPoly::monomial(q.times(&q), 2)
        );
        assert_eq!(PolyAlgebra.apply(&sigma, &XPoly::one()), XPoly::one());
    }

    #[test]
    fn subst_composition_applies_right_factor_first() {
        let q = Scalar::q();
        let qx = Subst::affine(q.clone(), Scalar::zero());
        let shift = Subst::affine(Scalar::one(), Scalar::one());
        // (qx ∘ shift)(x) = qx(x+1) = qx + 1
        let c = PolyAlgebra.compose(&qx, &shift);
        assert_eq!(c.image, XPoly::from_coeffs(vec![Scalar::one(), q.clone()]));
        // the other order gives q(x+1) = qx + q
        let d = PolyAlgebra.compose(&shift, &qx);
        assert_eq!(d.image, XPoly::from_coeffs(vec![q.clone(), q]));
        let x3 = xp(&[1, 2, 0, 1]);
        assert_eq!(
            PolyAlgebra.apply(&c, &x3),
            PolyAlgebra.apply(&qx, &PolyAlgebra.apply(&shift, &x3))
        );
    }

    #[test]
    fn affine_inverse_and_obstruction() {
        let shift = Subst::affine(Scalar::one(), Scalar::one());
        let inv = PolyAlgebra.inverse_endo(&shift).unwrap();
        assert_eq!(inv.image, xp(&[-1, 1]));
        let qx = Subst::affine(Scalar::q(), Scalar::zero());
        let qinv = PolyAlgebra.inverse_endo(&qx).unwrap();
        let q_inv = Scalar::from_func(RatFunc::q().inverse().unwrap());
        assert_eq!(qinv.image, XPoly::monomial(q_inv, 1));
        assert!(matches!(
            PolyAlgebra.inverse_endo(&Subst::new(xp(&[0, 0, 1]))),
            Err(AlgebraError::NotInvertible(_))
        ));
    }

    #[test]
    fn conjugation_on_matrix_units() {
        let alg = MatAlgebra::new(2);
        let e = alg
            .conj(Matrix::diagonal(vec![Scalar::one(), Scalar::from_int(2)]))
            .unwrap();
        assert_eq!(
            alg.apply(&e, &alg.unit(0, 1)),
            alg.unit(0, 1).scale(&Scalar::rational(1, 2))
        );
        assert!(alg.conj(Matrix::from_ints(&[&[1, 2], &[2, 4]])).is_err());
        assert!(matches!(
            alg.conj(Matrix::identity(3)),
            Err(AlgebraError::HandleMismatch { .. })
        ));
    }

    #[test]
    fn conj_composition_is_matrix_product() {
        let alg = MatAlgebra::new(2);
        let u = Matrix::from_ints(&[&[1, 1], &[0, 1]]);
        let v = Matrix::from_ints(&[&[2, 0], &[1, 1]]);
        let c = alg.compose(&alg.conj(u.clone()).unwrap(), &alg.conj(v.clone()).unwrap());
        assert_eq!(c, alg.conj(u.mul(&v)).unwrap());
        let inv = alg.inverse_endo(&c).unwrap();
        for b in alg.basis(0) {
            assert_eq!(alg.apply(&alg.compose(&inv, &c), &b), b);
        }
    }

    #[test]
    fn center_of_matrices() {
        let alg = MatAlgebra::new(2);
        assert!(!alg.center_contains(&alg.unit(0, 1)));
        assert!(alg.center_contains(&Matrix::identity(2).scale(&Scalar::from_int(3))));
        assert!(PolyAlgebra.center_contains(&xp(&[1, 2, 3])));
    }

    #[test]
    fn monomial_table_rejects_high_degree() {
        let t = MonomialTable::from_fn(2, |k| XPoly::monomial(Scalar::one(), k + 1));
        assert_eq!(t.apply(&xp(&[1, 1])).unwrap(), xp(&[0, 1, 1]));
        assert_eq!(
            t.apply(&xp(&[0, 0, 0, 1])),
            Err(AlgebraError::DegreeBoundExceeded {
                degree: 3,
                bound: 2
            })
        );
    }

    #[test]
    fn matrix_linear_map_tabulates() {
        let alg = MatAlgebra::new(2);
        let t = MatrixLinearMap::from_fn(alg, |a| a.transpose());
        let a = Matrix::from_ints(&[&[1, 2], &[3, 4]]);
        assert_eq!(t.apply(&a), a.transpose());
    }
}
