//! The rank-one module `TΣ_ĝ = K[x]·Δ` of twisted vector fields on `K[x]`,
//! its twisted bracket and connections on it.
//!
//! A field `X_f` acts by `X_f(a) = f·Δ(a)` and is stored as the coefficient
//! `f`.

use crate::algebra::{Algebra, MonomialTable, PolyAlgebra, Subst};
use crate::arith::{Field, Scalar, XPoly};
use crate::deriv::{DerivError, HlsGenerator, TwistPair};
use crate::sweep;

use super::GeometryError;

/// Degrees below this get their `Δ(xᵏ)` precomputed.
const TABLE_DEGREE: usize = 64;

#[derive(Clone, Debug)]
pub struct TangentModule {
    hls: HlsGenerator,
    table: Vec<XPoly>,
}

impl TangentModule {
    pub fn new(pair: TwistPair<PolyAlgebra>) -> Result<Self, DerivError> {
        let hls = HlsGenerator::new(pair)?;
        let table = (0..TABLE_DEGREE)
            .map(|k| hls.apply(&XPoly::monomial(Scalar::one(), k)))
            .collect::<Result<_, _>>()?;
        Ok(Self { hls, table })
    }

    pub fn pair(&self) -> &TwistPair<PolyAlgebra> {
        &self.hls.pair
    }

    pub fn g_hat(&self) -> &XPoly {
        &self.hls.g_hat
    }

    /// `Δ(a)`, using linearity and the cached monomial images.
    pub fn generator(&self, a: &XPoly) -> XPoly {
        match a.degree() {
            Some(d) if d >= TABLE_DEGREE => self.hls.apply(a).expect("ĝ divides δ(a)"),
            _ => a
                .coeffs()
                .iter()
                .zip(&self.table)
                .filter(|(c, _)| !c.is_zero())
                .fold(XPoly::zero(), |acc, (c, d)| &acc + &d.scale(c)),
        }
    }

    /// `X_f(a) = f·Δ(a)`.
    pub fn field_apply(&self, f: &XPoly, a: &XPoly) -> XPoly {
        f * &self.generator(a)
    }

    /// `f·X_g = X_{fg}`, and `f·Δ(x)` vanishes only for `f = 0`, so the
    /// coefficient is unique. Returns the nonzero value `Δ(x)`.
    pub fn independence_certificate(&self) -> XPoly {
        self.generator(&XPoly::var())
    }

    /// `σ̂(f·X_g) = σ(f)σ̂(X_g)` and the same for `τ̂`, on monomials.
    pub fn check_module_maps(&self, degree_bound: usize) -> bool {
        let basis = PolyAlgebra.basis(degree_bound);
        let pair = self.pair();
        basis.iter().all(|f| {
            basis.iter().all(|g| {
                let fg = f * g;
                pair.sigma_of(&fg) == &pair.sigma_of(f) * &pair.sigma_of(g)
                    && pair.tau_of(&fg) == &pair.tau_of(f) * &pair.tau_of(g)
            })
        })
    }
}

/// The braiding `R(X_f⊗X_g) = X_{σ(g)}⊗X_{σ⁻¹(f)}` and the bracket it
/// induces; needs `τ = Id` and an invertible affine `σ`.
#[derive(Clone, Debug)]
pub struct CommutativeLie {
    module: TangentModule,
    sigma_inv: Subst,
}

impl CommutativeLie {
    pub fn new(pair: TwistPair<PolyAlgebra>) -> Result<Self, GeometryError> {
        if pair.tau != Subst::identity() {
            return Err(GeometryError::Unsupported("tau = Id".into()));
        }
        let sigma_inv = PolyAlgebra.inverse_endo(&pair.sigma)?;
        Ok(Self {
            module: TangentModule::new(pair)?,
            sigma_inv,
        })
    }

    pub fn module(&self) -> &TangentModule {
        &self.module
    }

    pub fn sigma(&self, f: &XPoly) -> XPoly {
        self.module.pair().sigma_of(f)
    }

    pub fn sigma_inv(&self, f: &XPoly) -> XPoly {
        PolyAlgebra.apply(&self.sigma_inv, f)
    }

    pub fn braid(&self, f: &XPoly, g: &XPoly) -> (XPoly, XPoly) {
        (self.sigma(g), self.sigma_inv(f))
    }

    /// `R(R(X_f⊗X_g)) = X_f⊗X_g`.
    pub fn braid_is_involutive(&self, f: &XPoly, g: &XPoly) -> bool {
        let (p, q) = self.braid(f, g);
        self.braid(&p, &q) == (f.clone(), g.clone())
    }

    /// `c` with `X_fX_g − X_{σ(g)}X_{σ⁻¹(f)} = X_c`.
    pub fn bracket(&self, f: &XPoly, g: &XPoly) -> XPoly {
        let (p, q) = self.braid(f, g);
        &self.module.field_apply(f, g) - &self.module.field_apply(&p, &q)
    }

    /// Compares the bracket against the composition of fields on monomials.
    pub fn bracket_matches_composition(&self, f: &XPoly, g: &XPoly, degree_bound: usize) -> bool {
        let c = self.bracket(f, g);
        let (p, q) = self.braid(f, g);
        let m = &self.module;
        PolyAlgebra.basis(degree_bound).iter().all(|a| {
            let lhs =
                &m.field_apply(f, &m.field_apply(g, a)) - &m.field_apply(&p, &m.field_apply(&q, a));
            lhs == m.field_apply(&c, a)
        })
    }
}

/// Connections on `TΣ_ĝ`, written on the coefficient of a section `h·X_1`.
#[derive(Clone, Debug)]
pub enum CommutativeConnection {
    /// `∇_{X_f}X_h = X_{f·Δ(h)}`.
    Canonical,
    /// `∇_{X_f}(h·X_1) = (σ(h)γ(f) + f·Δ(h))·X_1` for a linear `γ`.
    GammaRank1(MonomialTable),
}

impl CommutativeConnection {
    fn gamma(&self, f: &XPoly) -> Result<XPoly, GeometryError> {
        match self {
            CommutativeConnection::Canonical => Ok(XPoly::zero()),
            CommutativeConnection::GammaRank1(t) => Ok(t.apply(f)?),
        }
    }

    pub fn nabla(
        &self,
        lie: &CommutativeLie,
        f: &XPoly,
        h: &XPoly,
    ) -> Result<XPoly, GeometryError> {
        let twist = &lie.sigma(h) * &self.gamma(f)?;
        Ok(&twist + &lie.module.field_apply(f, h))
    }

    /// `∇_f∇_g h − ∇_{σ(g)}∇_{σ⁻¹(f)} h − ∇_{[f,g]} h`.
    pub fn curvature(
        &self,
        lie: &CommutativeLie,
        f: &XPoly,
        g: &XPoly,
        h: &XPoly,
    ) -> Result<XPoly, GeometryError> {
        let (p, q) = lie.braid(f, g);
        let c = lie.bracket(f, g);
        let first = self.nabla(lie, f, &self.nabla(lie, g, h)?)?;
        let second = self.nabla(lie, &p, &self.nabla(lie, &q, h)?)?;
        Ok(&(&first - &second) - &self.nabla(lie, &c, h)?)
    }

    /// Curvature on `X_1` in closed form.
    pub fn curvature_closed_form(
        &self,
        lie: &CommutativeLie,
        f: &XPoly,
        g: &XPoly,
    ) -> Result<XPoly, GeometryError> {
        let (p, q) = lie.braid(f, g);
        let m = lie.module();
        let (gg, gq) = (self.gamma(g)?, self.gamma(&q)?);
        let quadratic =
            &(&lie.sigma(&gg) * &self.gamma(f)?) - &(&lie.sigma(&gq) * &self.gamma(&p)?);
        let linear = &m.field_apply(f, &gg) - &m.field_apply(&p, &gq);
        Ok(&(&quadratic + &linear) - &self.gamma(&lie.bracket(f, g))?)
    }

    /// `∇_{X_f}(ah) = σ(a)∇_{X_f}h + X_f(a)h` on monomials.
    pub fn check_leibniz(
        &self,
        lie: &CommutativeLie,
        degree_bound: usize,
    ) -> Result<bool, GeometryError> {
        let basis = PolyAlgebra.basis(degree_bound);
        for f in &basis {
            for a in &basis {
                for h in &basis {
                    let lhs = self.nabla(lie, f, &(a * h))?;
                    let rhs = &(&lie.sigma(a) * &self.nabla(lie, f, h)?)
                        + &(&lie.module.field_apply(f, a) * h);
                    if lhs != rhs {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `∇_{a·X_f} = a·∇_{X_f}` on monomials.
    pub fn check_lower_linearity(
        &self,
        lie: &CommutativeLie,
        degree_bound: usize,
    ) -> Result<bool, GeometryError> {
        let basis = PolyAlgebra.basis(degree_bound);
        for a in &basis {
            for f in &basis {
                for h in &basis {
                    if self.nabla(lie, &(a * f), h)? != a * &self.nabla(lie, f, h)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Monomial triples `(f, g, h)` of degree at most `degree_bound`.
pub fn monomial_triples(degree_bound: usize) -> Vec<(XPoly, XPoly, XPoly)> {
    let mono = |k| XPoly::monomial(Scalar::one(), k);
    sweep::triples(degree_bound + 1)
        .into_iter()
        .map(|(i, j, k)| (mono(i), mono(j), mono(k)))
        .collect()
}

/// Is the canonical connection flat on every monomial triple?
pub fn canonical_is_flat(lie: &CommutativeLie, degree_bound: usize) -> Result<bool, GeometryError> {
    let triples = monomial_triples(degree_bound);
    let failures = sweep::find_first(&triples, |(f, g, h)| match CommutativeConnection::Canonical
        .curvature(lie, f, g, h)
    {
        Ok(r) if r.is_zero() => None,
        other => Some(other),
    });
    match failures {
        None => Ok(true),
        Some(Ok(_)) => Ok(false),
        Some(Err(e)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deriv::presets;

    fn mono(k: usize) -> XPoly {
        XPoly::monomial(Scalar::one(), k)
    }

    #[test]
    fn jackson_fields() {
        let lie = CommutativeLie::new(presets::jackson_pair()).unwrap();
        assert_eq!(lie.module().g_hat(), &XPoly::var());
        // Δ(x³) = (1 − q³)x²
        let expected = mono(2)
            .scale(&Scalar::one().minus((&Scalar::q().times(&Scalar::q()).times(&Scalar::q()))));
        assert_eq!(lie.module().generator(&mono(3)), expected);
        assert!(!lie.module().independence_certificate().is_zero());
    }

    #[test]
    fn bracket_and_braid() {
        let lie = CommutativeLie::new(presets::jackson_pair()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(lie.braid_is_involutive(&mono(i), &mono(j)));
                assert!(lie.bracket_matches_composition(&mono(i), &mono(j), 5));
            }
        }
    }

    #[test]
    fn canonical_flat_small() {
        let lie = CommutativeLie::new(presets::translation_pair(Scalar::one())).unwrap();
        assert!(canonical_is_flat(&lie, 3).unwrap());
        let conn = CommutativeConnection::Canonical;
        assert!(conn.check_leibniz(&lie, 3).unwrap());
        assert!(conn.check_lower_linearity(&lie, 3).unwrap());
    }

    #[test]
    fn gamma_closed_form_matches() {
        let lie = CommutativeLie::new(presets::jackson_pair()).unwrap();
        let table = MonomialTable::from_fn(12, |k| {
            XPoly::from_coeffs(vec![Scalar::from_int(k as i64 % 3), Scalar::one()])
        });
        let conn = CommutativeConnection::GammaRank1(table);
        assert!(conn.check_leibniz(&lie, 3).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let r = conn
                    .curvature(&lie, &mono(i), &mono(j), &XPoly::one())
                    .unwrap();
                assert_eq!(
                    r,
                    conn.curvature_closed_form(&lie, &mono(i), &mono(j))
                        .unwrap()
                );
            }
        }
    }

    #[test]
    fn requires_identity_tau() {
        let pair = presets::jackson_pair().swapped();
        assert!(matches!(
            CommutativeLie::new(pair),
            Err(GeometryError::Unsupported(_))
        ));
    }
}
