//! Twisted derivations: construction, Leibniz verification, symmetry,
//! regularity of twist pairs, inner decomposition and the rank-one generator
//! on `K[x]`.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{
    Algebra, AlgebraError, MatAlgebra, MatEndo, MatrixLinearMap, PolyAlgebra, Subst,
};
use crate::arith::{ArithError, Field, Scalar, XPoly};
use crate::linalg::Matrix;
use crate::{sweep, Bounds, Dimension};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DerivError {
    #[error("derivation is not inner (obstruction {residue})")]
    NotInner { residue: String },
    #[error("derivation is not symmetric")]
    NotSymmetric,
    #[error("sigma equals tau")]
    SigmaEqualsTau,
    #[error("twisted Leibniz rule fails at f = {f}, g = {g}")]
    InvalidDerivation { f: String, g: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The endomorphisms `σ, τ` of a twisted derivation.
#[derive(Clone, Debug)]
pub struct TwistPair<A: Algebra> {
    pub alg: A,
    pub sigma: A::Endo,
    pub tau: A::Endo,
}

impl<A: Algebra> TwistPair<A> {
    pub fn new(alg: A, sigma: A::Endo, tau: A::Endo) -> Result<Self, DerivError> {
        alg.check_endo(&sigma)?;
        alg.check_endo(&tau)?;
        Ok(Self { alg, sigma, tau })
    }

    pub fn sigma_of(&self, a: &A::Elem) -> A::Elem {
        self.alg.apply(&self.sigma, a)
    }

    pub fn tau_of(&self, a: &A::Elem) -> A::Elem {
        self.alg.apply(&self.tau, a)
    }

    /// `δ(a) = τ(a) − σ(a)`.
    pub fn delta(&self, a: &A::Elem) -> A::Elem {
        self.alg.sub(&self.tau_of(a), &self.sigma_of(a))
    }

    pub fn sigma_equals_tau(&self) -> bool {
        self.alg.endo_eq(&self.sigma, &self.tau)
    }

    /// The pair `(τ, σ)`.
    pub fn swapped(&self) -> Self {
        Self {
            alg: self.alg.clone(),
            sigma: self.tau.clone(),
            tau: self.sigma.clone(),
        }
    }
}

/// Verdict of the regularity classification.
#[derive(Clone, Debug, PartialEq)]
pub enum Regularity<E> {
    StronglyRegular { witness: E },
    RegularNotStrong { witness: E },
    NotRegular,
    Unknown { search_bound: usize },
}

impl<E> Regularity<E> {
    pub fn name(&self) -> &'static str {
        match self {
            Regularity::StronglyRegular { .. } => "StronglyRegular",
            Regularity::RegularNotStrong { .. } => "RegularNotStrong",
            Regularity::NotRegular => "NotRegular",
            Regularity::Unknown { .. } => "Unknown",
        }
    }

    pub fn is_strongly_regular(&self) -> bool {
        matches!(self, Regularity::StronglyRegular { .. })
    }

    pub fn is_regular(&self) -> bool {
        matches!(
            self,
            Regularity::StronglyRegular { .. } | Regularity::RegularNotStrong { .. }
        )
    }

    pub fn witness(&self) -> Option<&E> {
        match self {
            Regularity::StronglyRegular { witness } | Regularity::RegularNotStrong { witness } => {
                Some(witness)
            }
            _ => None,
        }
    }
}

/// Result of solving `X(f) = m₀τ(f) − σ(f)m₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerDecomposition<E> {
    pub m0: E,
    /// Dimension of the space of all admissible `m₀` (0 means unique).
    pub solution_dim: Dimension,
    /// Whether the pair is strongly regular and the derivation symmetric,
    /// in which case commutation with `σ(f)` and `τ(f)` was imposed.
    pub hypotheses: bool,
    /// `[m₀, σ(g)] = [m₀, τ(g)] = 0` on generators.
    pub commutes: bool,
    /// `X(f) = m₀τ(f) − σ(f)m₀` re-checked on the verification basis.
    pub verified: bool,
}

/// Algebras that carry a concrete representation of twisted derivations.
pub trait Derivable: Algebra {
    type Rule: Clone + fmt::Debug + fmt::Display + Send + Sync;

    fn eval_rule(&self, pair: &TwistPair<Self>, rule: &Self::Rule, a: &Self::Elem) -> Self::Elem;
    /// Rule of `X = τ − σ`.
    fn delta_rule(&self, pair: &TwistPair<Self>) -> Self::Rule;
    fn classify_pair(&self, pair: &TwistPair<Self>, bounds: &Bounds) -> Regularity<Self::Elem>;
    fn decompose(
        &self,
        x: &TwistedDerivation<Self>,
        bounds: &Bounds,
    ) -> Result<InnerDecomposition<Self::Elem>, DerivError>;
}

/// A `(σ,τ)`-derivation `X(fg) = σ(f)X(g) + X(f)τ(g)`.
#[derive(Clone, Debug)]
pub struct TwistedDerivation<A: Derivable> {
    pub pair: TwistPair<A>,
    pub rule: A::Rule,
}

impl<A: Derivable> TwistedDerivation<A> {
    pub fn apply(&self, a: &A::Elem) -> A::Elem {
        self.pair.alg.eval_rule(&self.pair, &self.rule, a)
    }

    /// `X = τ − σ`.
    pub fn delta(pair: TwistPair<A>) -> Self {
        let rule = pair.alg.delta_rule(&pair);
        Self { pair, rule }
    }

    pub fn alg(&self) -> &A {
        &self.pair.alg
    }
}

impl TwistedDerivation<PolyAlgebra> {
    /// The derivation with `X(x) = f0`.
    pub fn from_generator_image(pair: TwistPair<PolyAlgebra>, f0: XPoly) -> Self {
        Self {
            pair,
            rule: PolyRule(f0),
        }
    }

    pub fn generator_image(&self) -> &XPoly {
        &self.rule.0
    }
}

impl TwistedDerivation<MatAlgebra> {
    /// `X(f) = m₀τ(f) − σ(f)m₀`.
    pub fn inner(pair: TwistPair<MatAlgebra>, m0: Matrix) -> Result<Self, DerivError> {
        pair.alg.check_elem(&m0)?;
        Ok(Self {
            pair,
            rule: MatRule::Inner(m0),
        })
    }

    /// A general linear map, rejected unless it satisfies twisted Leibniz on
    /// all matrix-unit pairs.
    pub fn linear(pair: TwistPair<MatAlgebra>, map: MatrixLinearMap) -> Result<Self, DerivError> {
        if map.algebra() != pair.alg {
            return Err(AlgebraError::HandleMismatch {
                expected: pair.alg.describe(),
                found: map.algebra().describe(),
            }
            .into());
        }
        let x = Self {
            pair,
            rule: MatRule::Linear(map),
        };
        let report = verify_twisted_leibniz(&x, LeibnizStyle::SigmaTau, 0);
        match report.counterexample {
            None => Ok(x),
            Some(c) => Err(DerivError::InvalidDerivation {
                f: c.f.to_string(),
                g: c.g.to_string(),
            }),
        }
    }

    /// The same derivation stored as a tabulated linear map.
    pub fn tabulated(&self) -> Self {
        let map = MatrixLinearMap::from_fn(self.pair.alg, |a| self.apply(a));
        Self {
            pair: self.pair.clone(),
            rule: MatRule::Linear(map),
        }
    }
}

/// A derivation on `K[x]` is determined by `X(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRule(pub XPoly);

impl fmt::Display for PolyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X(x) = {}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatRule {
    Inner(Matrix),
    Linear(MatrixLinearMap),
}

impl fmt::Display for MatRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatRule::Inner(m0) => write!(f, "inner m0 = {m0}"),
            MatRule::Linear(map) => write!(f, "linear map {}", map.matrix()),
        }
    }
}

impl Derivable for PolyAlgebra {
    type Rule = PolyRule;

    fn eval_rule(&self, pair: &TwistPair<Self>, rule: &PolyRule, a: &XPoly) -> XPoly {
        let Some(deg) = a.degree() else {
            return XPoly::zero();
        };
        let sx = &pair.sigma.image;
        let tx = &pair.tau.image;
        let mut acc = XPoly::zero();
        // X(x^k) = σ(x)X(x^(k-1)) + X(x)τ(x)^(k-1)
        let mut xk = XPoly::zero();
        let mut tpow = XPoly::one();
        for k in 1..=deg {
            xk = &(sx * &xk) + &(&rule.0 * &tpow);
            tpow = &tpow * tx;
            let c = a.coeff(k);
            if !c.is_zero() {
                acc = &acc + &xk.scale(&c);
            }
        }
        acc
    }

    fn delta_rule(&self, pair: &TwistPair<Self>) -> PolyRule {
        PolyRule(pair.delta(&XPoly::var()))
    }

    fn classify_pair(&self, pair: &TwistPair<Self>, _bounds: &Bounds) -> Regularity<XPoly> {
        // v − u divides f(v) − f(u), so δ(x) divides every δ(f): the pair is
        // strongly regular iff δ(x) is a nonzero constant.
        let dx = pair.delta(&XPoly::var());
        if dx.is_zero() {
            Regularity::NotRegular
        } else if dx.is_unit() {
            Regularity::StronglyRegular {
                witness: XPoly::var(),
            }
        } else {
            Regularity::RegularNotStrong {
                witness: XPoly::var(),
            }
        }
    }

    fn decompose(
        &self,
        x: &TwistedDerivation<Self>,
        bounds: &Bounds,
    ) -> Result<InnerDecomposition<XPoly>, DerivError> {
        let pair = &x.pair;
        let f0 = x.generator_image();
        let dx = pair.delta(&XPoly::var());
        let (m0, solution_dim) = if dx.is_zero() {
            if !f0.is_zero() {
                return Err(DerivError::NotInner {
                    residue: f0.to_string(),
                });
            }
            (XPoly::zero(), Dimension::Infinite)
        } else {
            let (m0, r) = f0.div_rem(&dx)?;
            if !r.is_zero() {
                return Err(DerivError::NotInner {
                    residue: r.to_string(),
                });
            }
            (m0, Dimension::Finite(0))
        };
        let basis = self.basis(bounds.degree_bound);
        let verified = sweep::all(&basis, |b| x.apply(b) == &m0 * &pair.delta(b));
        Ok(InnerDecomposition {
            m0,
            solution_dim,
            hypotheses: dx.is_unit(),
            commutes: true,
            verified,
        })
    }
}

impl Derivable for MatAlgebra {
    type Rule = MatRule;

    fn eval_rule(&self, pair: &TwistPair<Self>, rule: &MatRule, a: &Matrix) -> Matrix {
        match rule {
            MatRule::Inner(m0) => m0.mul(&pair.tau_of(a)).sub(&pair.sigma_of(a).mul(m0)),
            MatRule::Linear(map) => map.apply(a),
        }
    }

    fn delta_rule(&self, _pair: &TwistPair<Self>) -> MatRule {
        MatRule::Inner(self.one())
    }

    fn classify_pair(&self, pair: &TwistPair<Self>, bounds: &Bounds) -> Regularity<Matrix> {
        if pair.sigma_equals_tau() {
            return Regularity::NotRegular;
        }
        // Over M_N a non-zero-divisor is invertible, so regular and strongly
        // regular coincide; search for f with det δ(f) ≠ 0.
        let mut candidates = self.basis(0);
        candidates.push(self.one());
        let n = self.size();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    candidates.push(self.unit(i, j).add(&self.unit(j, i)));
                    candidates.push(self.one().add(&self.unit(i, j)));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
        candidates.extend((0..bounds.search_bound).map(|_| self.random_elem(&mut rng, 0)));
        match sweep::find_first(&candidates, |f| {
            self.is_invertible(&pair.delta(f)).then(|| f.clone())
        }) {
            Some(witness) => Regularity::StronglyRegular { witness },
            None => Regularity::Unknown {
                search_bound: bounds.search_bound,
            },
        }
    }

    fn decompose(
        &self,
        x: &TwistedDerivation<Self>,
        bounds: &Bounds,
    ) -> Result<InnerDecomposition<Matrix>, DerivError> {
        let pair = &x.pair;
        let basis = self.basis(0);
        let hypotheses = self.classify_pair(pair, bounds).is_strongly_regular()
            && is_symmetric(x, bounds.degree_bound).symmetric();

        // Unknown m₀ in row-major coordinates; one block of N² equations per
        // basis element and condition.
        let mut blocks = Vec::new();
        let mut rhs = Vec::new();
        for e in &basis {
            let (s, t) = (pair.sigma_of(e), pair.tau_of(e));
            let cols: Vec<Vec<Scalar>> = basis
                .iter()
                .map(|u| self.vectorize(&u.mul(&t).sub(&s.mul(u))))
                .collect();
            blocks.push(Matrix::from_columns(basis.len(), &cols));
            rhs.extend(self.vectorize(&x.apply(e)));
            if hypotheses {
                for img in [&s, &t] {
                    let cols: Vec<Vec<Scalar>> = basis
                        .iter()
                        .map(|u| self.vectorize(&u.commutator(img)))
                        .collect();
                    blocks.push(Matrix::from_columns(basis.len(), &cols));
                    rhs.extend(std::iter::repeat_with(Scalar::zero).take(basis.len()));
                }
            }
        }
        let system = Matrix::vstack(&blocks).expect("blocks share the column count");
        let solution = system
            .solve(&rhs)
            .expect("right-hand side matches the system")
            .ok_or_else(|| DerivError::NotInner {
                residue: "inconsistent linear system".to_string(),
            })?;
        let m0 = self.devectorize(&solution.particular);
        let verified = basis
            .iter()
            .all(|e| x.apply(e) == m0.mul(&pair.tau_of(e)).sub(&pair.sigma_of(e).mul(&m0)));
        let commutes = basis.iter().all(|e| {
            m0.commutator(&pair.sigma_of(e)).is_zero() && m0.commutator(&pair.tau_of(e)).is_zero()
        });
        Ok(InnerDecomposition {
            m0,
            solution_dim: Dimension::Finite(solution.kernel.len()),
            hypotheses,
            commutes,
            verified,
        })
    }
}

pub fn classify_regularity<A: Derivable>(
    pair: &TwistPair<A>,
    bounds: &Bounds,
) -> Regularity<A::Elem> {
    pair.alg.classify_pair(pair, bounds)
}

/// Finds `m₀` with `X(f) = m₀τ(f) − σ(f)m₀`, or reports `NotInner`.
pub fn inner_decompose<A: Derivable>(
    x: &TwistedDerivation<A>,
    bounds: &Bounds,
) -> Result<InnerDecomposition<A::Elem>, DerivError> {
    x.pair.alg.decompose(x, bounds)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeibnizStyle {
    /// `X(fg) = σ(f)X(g) + X(f)τ(g)`
    SigmaTau,
    /// `X(fg) = τ(f)X(g) + X(f)σ(g)`
    TauSigma,
}

/// A failing pair together with both sides of the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample<E> {
    pub f: E,
    pub g: E,
    pub lhs: E,
    pub rhs: E,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport<E> {
    pub checked: usize,
    pub counterexample: Option<Counterexample<E>>,
}

impl<E> CheckReport<E> {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Runs `identity(i, j)` over all basis pairs and keeps the first failure.
fn check_pairs<E, F>(basis: &[E], identity: F) -> CheckReport<E>
where
    E: Clone + Send + Sync,
    F: Fn(usize, usize) -> Option<(E, E)> + Sync + Send,
{
    let pairs = sweep::pairs(basis.len());
    let counterexample = sweep::find_first(&pairs, |&(i, j)| {
        identity(i, j).map(|(lhs, rhs)| Counterexample {
            f: basis[i].clone(),
            g: basis[j].clone(),
            lhs,
            rhs,
        })
    });
    CheckReport {
        checked: pairs.len(),
        counterexample,
    }
}

/// Exhaustive twisted Leibniz check on basis pairs.
pub fn verify_twisted_leibniz<A: Derivable>(
    x: &TwistedDerivation<A>,
    style: LeibnizStyle,
    degree_bound: usize,
) -> CheckReport<A::Elem> {
    let alg = x.alg();
    let basis = alg.basis(degree_bound);
    let xs = sweep::map(&basis, |b| x.apply(b));
    let (left, right) = match style {
        LeibnizStyle::SigmaTau => (&x.pair.sigma, &x.pair.tau),
        LeibnizStyle::TauSigma => (&x.pair.tau, &x.pair.sigma),
    };
    let ls: Vec<_> = basis.iter().map(|b| alg.apply(left, b)).collect();
    let rs: Vec<_> = basis.iter().map(|b| alg.apply(right, b)).collect();
    check_pairs(&basis, |i, j| {
        let lhs = x.apply(&alg.mul(&basis[i], &basis[j]));
        let rhs = alg.add(&alg.mul(&ls[i], &xs[j]), &alg.mul(&xs[i], &rs[j]));
        (lhs != rhs).then_some((lhs, rhs))
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport<E> {
    pub sigma_tau: CheckReport<E>,
    pub tau_sigma: CheckReport<E>,
}

impl<E> SymmetryReport<E> {
    pub fn symmetric(&self) -> bool {
        self.sigma_tau.holds() && self.tau_sigma.holds()
    }
}

pub fn is_symmetric<A: Derivable>(
    x: &TwistedDerivation<A>,
    degree_bound: usize,
) -> SymmetryReport<A::Elem> {
    SymmetryReport {
        sigma_tau: verify_twisted_leibniz(x, LeibnizStyle::SigmaTau, degree_bound),
        tau_sigma: verify_twisted_leibniz(x, LeibnizStyle::TauSigma, degree_bound),
    }
}

/// `X(f)δ(g) = δ(f)X(g)` on basis pairs, without the symmetry precondition.
pub fn lemma_xd_dx_unchecked<A: Derivable>(
    x: &TwistedDerivation<A>,
    degree_bound: usize,
) -> CheckReport<A::Elem> {
    let alg = x.alg();
    let basis = alg.basis(degree_bound);
    let xs = sweep::map(&basis, |b| x.apply(b));
    let ds: Vec<_> = basis.iter().map(|b| x.pair.delta(b)).collect();
    check_pairs(&basis, |i, j| {
        let lhs = alg.mul(&xs[i], &ds[j]);
        let rhs = alg.mul(&ds[i], &xs[j]);
        (lhs != rhs).then_some((lhs, rhs))
    })
}

/// `X(f)δ(g) = δ(f)X(g)`; the identity is only claimed for symmetric `X`.
pub fn lemma_xd_dx<A: Derivable>(
    x: &TwistedDerivation<A>,
    degree_bound: usize,
) -> Result<CheckReport<A::Elem>, DerivError> {
    if !is_symmetric(x, degree_bound).symmetric() {
        return Err(DerivError::NotSymmetric);
    }
    Ok(lemma_xd_dx_unchecked(x, degree_bound))
}

/// The generator `Δ = δ/ĝ` of all `(σ,τ)`-derivations on `K[x]`, with `ĝ`
/// the monic associate of `δ(x)`.
#[derive(Clone, Debug)]
pub struct HlsGenerator {
    pub pair: TwistPair<PolyAlgebra>,
    pub g_hat: XPoly,
}

impl HlsGenerator {
    pub fn new(pair: TwistPair<PolyAlgebra>) -> Result<Self, DerivError> {
        let dx = pair.delta(&XPoly::var());
        if dx.is_zero() {
            return Err(DerivError::SigmaEqualsTau);
        }
        Ok(Self {
            g_hat: dx.monic(),
            pair,
        })
    }

    /// `Δ(f) = δ(f)/ĝ`; the division is exact because `δ(x) | δ(f)`.
    pub fn apply(&self, f: &XPoly) -> Result<XPoly, DerivError> {
        Ok(self.pair.delta(f).div_exact(&self.g_hat)?)
    }

    pub fn as_derivation(&self) -> TwistedDerivation<PolyAlgebra> {
        let dx = self.apply(&XPoly::var()).expect("ĝ divides δ(x)");
        TwistedDerivation::from_generator_image(self.pair.clone(), dx)
    }

    /// `δ(x) | δ(xⁿ)` for all `n ≤ max_degree`.
    pub fn divisibility_chain(&self, max_degree: usize) -> bool {
        let dx = self.pair.delta(&XPoly::var());
        let degrees: Vec<usize> = (0..=max_degree).collect();
        sweep::all(&degrees, |&n| {
            dx.divides(&self.pair.delta(&XPoly::monomial(Scalar::one(), n)))
        })
    }

    /// Writes `X = p·Δ` and re-checks `X(f) = p·Δ(f)` on monomials.
    pub fn factor(
        &self,
        x: &TwistedDerivation<PolyAlgebra>,
        degree_bound: usize,
    ) -> Result<Factorization, DerivError> {
        let dx = self.apply(&XPoly::var())?;
        let p = x.generator_image().div_exact(&dx)?;
        let basis = PolyAlgebra.basis(degree_bound);
        let verified = sweep::all(&basis, |b| {
            self.apply(b)
                .map(|d| &p * &d == x.apply(b))
                .unwrap_or(false)
        });
        Ok(Factorization { p, verified })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub p: XPoly,
    pub verified: bool,
}

/// Presets shared with the command line.
pub mod presets {
    use super::*;
    use crate::algebra::MatAlgebra;

    /// `σ(x) = qx`, `τ = Id`.
    pub fn jackson_pair() -> TwistPair<PolyAlgebra> {
        TwistPair::new(
            PolyAlgebra,
            Subst::affine(Scalar::q(), Scalar::zero()),
            Subst::identity(),
        )
        .expect("poly endomorphisms")
    }

    /// The Jackson rule `X(x) = 1` on the pair above.
    pub fn jackson() -> TwistedDerivation<PolyAlgebra> {
        TwistedDerivation::from_generator_image(jackson_pair(), XPoly::one())
    }

    /// `σ(x) = x − h`, `τ = Id`.
    pub fn translation_pair(h: Scalar) -> TwistPair<PolyAlgebra> {
        TwistPair::new(
            PolyAlgebra,
            Subst::affine(Scalar::one(), h.negated()),
            Subst::identity(),
        )
        .expect("poly endomorphisms")
    }

    /// `σ = Conj [[1,1],[0,1]]`, `τ = Conj diag(1,2)` on `M_2`.
    pub fn matrix_pair() -> TwistPair<MatAlgebra> {
        let alg = MatAlgebra::new(2);
        let s = alg
            .conj(Matrix::from_ints(&[&[1, 1], &[0, 1]]))
            .expect("invertible");
        let t = alg
            .conj(Matrix::from_ints(&[&[1, 0], &[0, 2]]))
            .expect("invertible");
        TwistPair::new(alg, s, t).expect("same handle")
    }

    pub fn mat_pair(alg: MatAlgebra, sigma: MatEndo, tau: MatEndo) -> TwistPair<MatAlgebra> {
        TwistPair::new(alg, sigma, tau).expect("same handle")
    }
}
