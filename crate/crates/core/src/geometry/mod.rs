//! Σ-modules over Σ-algebras, with twisted connections and their curvature.
//!
//! A module element of a rank-`n` module is a vector of `n` algebra
//! elements; projective modules keep the vectors inside the image of a
//! right multiplication by an idempotent.

pub mod commutative;

use rand::Rng;
use thiserror::Error;

use crate::algebra::{small_int, Algebra, AlgebraError, MatAlgebra, MatEndo};
use crate::arith::{Field, Scalar};
use crate::deriv::{
    classify_regularity, inner_decompose, is_symmetric, DerivError, Derivable, TwistPair,
    TwistedDerivation,
};
use crate::linalg::Matrix;
use crate::{sweep, Bounds};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("index {index} out of range for a family of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("family of derivations is empty")]
    EmptyFamily,
    #[error("projector is not idempotent")]
    NotIdempotent,
    #[error("expected {expected} entries, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("derivation {index} does not come from a strongly regular pair")]
    NotStronglyRegular { index: usize },
    #[error("derivation {index} is not symmetric")]
    NotSymmetricAlgebra { index: usize },
    #[error("connection rule is invalid: {0}")]
    InvalidConnection(String),
    #[error("hypotheses fail: {}", which.join(", "))]
    HypothesesFail { which: Vec<String> },
    #[error("operation needs {0}")]
    Unsupported(String),
    #[error(transparent)]
    Deriv(#[from] DerivError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type ModElem<A> = Vec<<A as Algebra>::Elem>;

/// A finite family of twisted derivations `X_a` on one algebra.
#[derive(Clone, Debug)]
pub struct SigmaAlgebra<A: Derivable> {
    alg: A,
    derivations: Vec<TwistedDerivation<A>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigmaFlags {
    pub symmetric: bool,
    pub regular: bool,
    pub strongly_regular: bool,
}

impl<A: Derivable> SigmaAlgebra<A> {
    pub fn new(alg: A, derivations: Vec<TwistedDerivation<A>>) -> Result<Self, GeometryError> {
        if derivations.is_empty() {
            return Err(GeometryError::EmptyFamily);
        }
        for x in &derivations {
            if x.alg() != &alg {
                return Err(AlgebraError::HandleMismatch {
                    expected: alg.describe(),
                    found: x.alg().describe(),
                }
                .into());
            }
        }
        Ok(Self { alg, derivations })
    }

    pub fn alg(&self) -> &A {
        &self.alg
    }

    pub fn len(&self) -> usize {
        self.derivations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derivations.is_empty()
    }

    pub fn derivation(&self, a: usize) -> Result<&TwistedDerivation<A>, GeometryError> {
        self.derivations
            .get(a)
            .ok_or(GeometryError::IndexOutOfRange {
                index: a,
                len: self.derivations.len(),
            })
    }

    pub fn derivations(&self) -> &[TwistedDerivation<A>] {
        &self.derivations
    }

    pub fn pair(&self, a: usize) -> &TwistPair<A> {
        &self.derivations[a].pair
    }

    pub fn flags(&self, bounds: &Bounds) -> SigmaFlags {
        let symmetric = self
            .derivations
            .iter()
            .all(|x| is_symmetric(x, bounds.degree_bound).symmetric());
        let verdicts: Vec<_> = self
            .derivations
            .iter()
            .map(|x| classify_regularity(&x.pair, bounds))
            .collect();
        SigmaFlags {
            symmetric,
            regular: verdicts.iter().all(|v| v.is_regular()),
            strongly_regular: verdicts.iter().all(|v| v.is_strongly_regular()),
        }
    }
}

/// `m ↦ (φ(mⁱ)·t)ᵢ` for an endomorphism `φ` and an optional right factor `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct HatMap<A: Algebra> {
    pub endo: A::Endo,
    pub twist: Option<A::Elem>,
}

impl<A: Algebra> HatMap<A> {
    pub fn plain(endo: A::Endo) -> Self {
        Self { endo, twist: None }
    }

    pub fn twisted(endo: A::Endo, twist: A::Elem) -> Self {
        Self {
            endo,
            twist: Some(twist),
        }
    }

    pub fn apply(&self, alg: &A, m: &[A::Elem]) -> ModElem<A> {
        m.iter()
            .map(|c| {
                let image = alg.apply(&self.endo, c);
                match &self.twist {
                    Some(t) => alg.mul(&image, t),
                    None => image,
                }
            })
            .collect()
    }
}

/// A left module with maps `σ̂_a, τ̂_a` compatible with `σ_a, τ_a`.
#[derive(Clone, Debug)]
pub struct SigmaModule<A: Derivable> {
    alg: A,
    rank: usize,
    sigma_hat: Vec<HatMap<A>>,
    tau_hat: Vec<HatMap<A>>,
    projector: Option<A::Elem>,
}

impl<A: Derivable> SigmaModule<A> {
    /// `Aⁿ` with `σ̂_a, τ̂_a` acting componentwise.
    pub fn canonical_free(s: &SigmaAlgebra<A>, rank: usize) -> Self {
        let (sigma_hat, tau_hat) = s
            .derivations
            .iter()
            .map(|x| {
                (
                    HatMap::plain(x.pair.sigma.clone()),
                    HatMap::plain(x.pair.tau.clone()),
                )
            })
            .unzip();
        Self {
            alg: s.alg.clone(),
            rank,
            sigma_hat,
            tau_hat,
            projector: None,
        }
    }

    /// Free module with caller supplied hat maps.
    pub fn with_hat_maps(
        s: &SigmaAlgebra<A>,
        rank: usize,
        sigma_hat: Vec<HatMap<A>>,
        tau_hat: Vec<HatMap<A>>,
    ) -> Result<Self, GeometryError> {
        for hats in [&sigma_hat, &tau_hat] {
            if hats.len() != s.len() {
                return Err(GeometryError::RankMismatch {
                    expected: s.len(),
                    found: hats.len(),
                });
            }
        }
        for h in sigma_hat.iter().chain(&tau_hat) {
            s.alg.check_endo(&h.endo)?;
            if let Some(t) = &h.twist {
                s.alg.check_elem(t)?;
            }
        }
        Ok(Self {
            alg: s.alg.clone(),
            rank,
            sigma_hat,
            tau_hat,
            projector: None,
        })
    }

    /// The projective module `A·p` with `σ̂_a(m) = σ_a(m)p`, `τ̂_a(m) = τ_a(m)p`.
    pub fn projective(s: &SigmaAlgebra<A>, p: A::Elem) -> Result<Self, GeometryError> {
        s.alg.check_elem(&p)?;
        if s.alg.mul(&p, &p) != p {
            return Err(GeometryError::NotIdempotent);
        }
        let (sigma_hat, tau_hat) = s
            .derivations
            .iter()
            .map(|x| {
                (
                    HatMap::twisted(x.pair.sigma.clone(), p.clone()),
                    HatMap::twisted(x.pair.tau.clone(), p.clone()),
                )
            })
            .unzip();
        Ok(Self {
            alg: s.alg.clone(),
            rank: 1,
            sigma_hat,
            tau_hat,
            projector: Some(p),
        })
    }

    pub fn alg(&self) -> &A {
        &self.alg
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn projector(&self) -> Option<&A::Elem> {
        self.projector.as_ref()
    }

    pub fn check(&self, m: &[A::Elem]) -> Result<(), GeometryError> {
        if m.len() != self.rank {
            return Err(GeometryError::RankMismatch {
                expected: self.rank,
                found: m.len(),
            });
        }
        for c in m {
            self.alg.check_elem(c)?;
        }
        Ok(())
    }

    pub fn sigma_hat(&self, a: usize, m: &[A::Elem]) -> ModElem<A> {
        self.sigma_hat[a].apply(&self.alg, m)
    }

    pub fn tau_hat(&self, a: usize, m: &[A::Elem]) -> ModElem<A> {
        self.tau_hat[a].apply(&self.alg, m)
    }

    pub fn zero(&self) -> ModElem<A> {
        vec![self.alg.zero(); self.rank]
    }

    pub fn is_zero(&self, m: &[A::Elem]) -> bool {
        m.iter().all(|c| self.alg.is_zero(c))
    }

    pub fn add(&self, m: &[A::Elem], n: &[A::Elem]) -> ModElem<A> {
        m.iter().zip(n).map(|(a, b)| self.alg.add(a, b)).collect()
    }

    pub fn sub(&self, m: &[A::Elem], n: &[A::Elem]) -> ModElem<A> {
        m.iter().zip(n).map(|(a, b)| self.alg.sub(a, b)).collect()
    }

    pub fn scale(&self, c: &Scalar, m: &[A::Elem]) -> ModElem<A> {
        m.iter().map(|a| self.alg.scale(c, a)).collect()
    }

    /// `f·m`.
    pub fn left(&self, f: &A::Elem, m: &[A::Elem]) -> ModElem<A> {
        m.iter().map(|a| self.alg.mul(f, a)).collect()
    }

    /// `m·f`, the right action used for bimodule checks.
    pub fn right(&self, m: &[A::Elem], f: &A::Elem) -> ModElem<A> {
        m.iter().map(|a| self.alg.mul(a, f)).collect()
    }

    fn project(&self, m: ModElem<A>) -> ModElem<A> {
        match &self.projector {
            Some(p) => self.right(&m, p),
            None => m,
        }
    }

    /// Unit vector `eᵢ` (or `p` for the projective module).
    pub fn unit(&self, i: usize) -> ModElem<A> {
        let mut m = self.zero();
        m[i] = self.projector.clone().unwrap_or_else(|| self.alg.one());
        m
    }

    /// Spanning set: basis elements in each slot, projected when needed.
    pub fn basis(&self, degree_bound: usize) -> Vec<ModElem<A>> {
        let mut out: Vec<ModElem<A>> = Vec::new();
        for i in 0..self.rank {
            for b in self.alg.basis(degree_bound) {
                let mut m = self.zero();
                m[i] = b;
                let m = self.project(m);
                if !self.is_zero(&m) && !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        out
    }

    pub fn random<R: Rng>(&self, rng: &mut R, degree_bound: usize) -> ModElem<A> {
        let m = (0..self.rank)
            .map(|_| self.alg.random_elem(rng, degree_bound))
            .collect();
        self.project(m)
    }

    /// `σ̂_a(fm) = σ_a(f)σ̂_a(m)` and the same for `τ̂_a`, on basis elements.
    pub fn check_module_maps(&self, s: &SigmaAlgebra<A>, degree_bound: usize) -> bool {
        let fs = self.alg.basis(degree_bound);
        let ms = self.basis(degree_bound);
        (0..s.len()).all(|a| {
            let pair = s.pair(a);
            fs.iter().all(|f| {
                ms.iter().all(|m| {
                    let fm = self.left(f, m);
                    self.sigma_hat(a, &fm) == self.left(&pair.sigma_of(f), &self.sigma_hat(a, m))
                        && self.tau_hat(a, &fm) == self.left(&pair.tau_of(f), &self.tau_hat(a, m))
                })
            })
        })
    }
}

/// How `∇_a` acts on a module element.
#[derive(Clone, Debug)]
pub enum ConnectionRule<A: Algebra> {
    /// `∇_a m = Σᵢ σ_a(mⁱ)γ_{ai} + X_a(mⁱ)τ̂_a(eᵢ)`, with `gamma[a][i]` a module element.
    Christoffel { gamma: Vec<Vec<ModElem<A>>> },
    /// `∇_a m = f_a τ̂_a(m) − σ̂_a(m) f_a`.
    Inner { f: Vec<A::Elem> },
    /// `∇_a m = f_a (τ̂_a − σ̂_a)(m)`.
    SymmetricDelta { f: Vec<A::Elem> },
    /// `∇_a m = Σᵢ mⁱγ_{ai}`; ignores the twist and is not a connection.
    Untwisted { gamma: Vec<Vec<ModElem<A>>> },
    /// `base + σ̂_a(m)·Π_a`, where `pi[a][i][k]` is a matrix over `A`.
    Perturbed {
        base: Box<ConnectionRule<A>>,
        pi: Vec<Vec<Vec<A::Elem>>>,
    },
}

#[derive(Clone, Debug)]
pub struct Connection<A: Derivable> {
    pub sigma: SigmaAlgebra<A>,
    pub module: SigmaModule<A>,
    pub rule: ConnectionRule<A>,
}

/// Failing instance of a connection identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionWitness<E> {
    pub index: usize,
    pub f: E,
    pub m: Vec<E>,
    pub lhs: Vec<E>,
    pub rhs: Vec<E>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCheck<E> {
    pub checked: usize,
    pub witness: Option<ConnectionWitness<E>>,
}

impl<E> ConnectionCheck<E> {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionAxioms<E> {
    pub additive: bool,
    pub homogeneous: bool,
    pub leibniz: ConnectionCheck<E>,
}

impl<E> ConnectionAxioms<E> {
    pub fn holds(&self) -> bool {
        self.additive && self.homogeneous && self.leibniz.holds()
    }
}

impl<A: Derivable> Connection<A> {
    /// Builds a connection and rejects rules that break the left Leibniz rule.
    pub fn new(
        sigma: SigmaAlgebra<A>,
        module: SigmaModule<A>,
        rule: ConnectionRule<A>,
        bounds: &Bounds,
    ) -> Result<Self, GeometryError> {
        let conn = Self::unchecked(sigma, module, rule)?;
        let report = check_connection_axioms(&conn, bounds);
        if let Some(w) = report.leibniz.witness {
            return Err(GeometryError::InvalidConnection(format!(
                "Leibniz rule fails for index {} at f = {}",
                w.index, w.f
            )));
        }
        Ok(conn)
    }

    /// Shape checks only; used for deliberately broken rules.
    pub fn unchecked(
        sigma: SigmaAlgebra<A>,
        module: SigmaModule<A>,
        rule: ConnectionRule<A>,
    ) -> Result<Self, GeometryError> {
        if module.sigma_hat.len() != sigma.len() {
            return Err(GeometryError::RankMismatch {
                expected: sigma.len(),
                found: module.sigma_hat.len(),
            });
        }
        check_rule_shape(&rule, sigma.len(), module.rank)?;
        Ok(Self {
            sigma,
            module,
            rule,
        })
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// `∇_{X_a} m`.
    pub fn apply(&self, a: usize, m: &[A::Elem]) -> ModElem<A> {
        self.apply_rule(&self.rule, a, m)
    }

    fn apply_rule(&self, rule: &ConnectionRule<A>, a: usize, m: &[A::Elem]) -> ModElem<A> {
        let md = &self.module;
        let alg = md.alg();
        match rule {
            ConnectionRule::Christoffel { gamma } => {
                let x = &self.sigma.derivations[a];
                let mut out = md.zero();
                for (i, mi) in m.iter().enumerate() {
                    let s = x.pair.sigma_of(mi);
                    out = md.add(&out, &md.left(&s, &gamma[a][i]));
                    let xm = x.apply(mi);
                    out = md.add(&out, &md.left(&xm, &md.tau_hat(a, &md.unit(i))));
                }
                out
            }
            ConnectionRule::Inner { f } => {
                let t = md.left(&f[a], &md.tau_hat(a, m));
                let s = md.right(&md.sigma_hat(a, m), &f[a]);
                md.sub(&t, &s)
            }
            ConnectionRule::SymmetricDelta { f } => {
                let d = md.sub(&md.tau_hat(a, m), &md.sigma_hat(a, m));
                md.left(&f[a], &d)
            }
            ConnectionRule::Untwisted { gamma } => {
                let mut out = md.zero();
                for (i, mi) in m.iter().enumerate() {
                    out = md.add(&out, &md.left(mi, &gamma[a][i]));
                }
                out
            }
            ConnectionRule::Perturbed { base, pi } => {
                let b = self.apply_rule(base, a, m);
                let s = md.sigma_hat(a, m);
                let p: ModElem<A> = (0..md.rank)
                    .map(|k| {
                        s.iter().enumerate().fold(alg.zero(), |acc, (i, si)| {
                            alg.add(&acc, &alg.mul(si, &pi[a][i][k]))
                        })
                    })
                    .collect();
                md.add(&b, &md.project(p))
            }
        }
    }
}

fn check_rule_shape<A: Algebra>(
    rule: &ConnectionRule<A>,
    len: usize,
    rank: usize,
) -> Result<(), GeometryError> {
    let mismatch = |expected, found| Err(GeometryError::RankMismatch { expected, found });
    match rule {
        ConnectionRule::Christoffel { gamma } | ConnectionRule::Untwisted { gamma } => {
            if gamma.len() != len {
                return mismatch(len, gamma.len());
            }
            for row in gamma {
                if row.len() != rank {
                    return mismatch(rank, row.len());
                }
                for v in row {
                    if v.len() != rank {
                        return mismatch(rank, v.len());
                    }
                }
            }
        }
        ConnectionRule::Inner { f } | ConnectionRule::SymmetricDelta { f } => {
            if f.len() != len {
                return mismatch(len, f.len());
            }
        }
        ConnectionRule::Perturbed { base, pi } => {
            check_rule_shape(base, len, rank)?;
            if pi.len() != len {
                return mismatch(len, pi.len());
            }
            for m in pi {
                if m.len() != rank || m.iter().any(|r| r.len() != rank) {
                    return mismatch(rank, m.len());
                }
            }
        }
    }
    Ok(())
}

/// Runs `identity(a, f, m)` over every index and pair of basis elements.
fn check_triples<A, F>(
    conn: &Connection<A>,
    bounds: &Bounds,
    identity: F,
) -> ConnectionCheck<A::Elem>
where
    A: Derivable,
    F: Fn(usize, &A::Elem, &ModElem<A>) -> Option<(ModElem<A>, ModElem<A>)> + Sync + Send,
{
    let fs = conn.module.alg().basis(bounds.degree_bound);
    let ms = conn.module.basis(bounds.degree_bound);
    let (nf, nm) = (fs.len(), ms.len());
    let cases: Vec<(usize, usize, usize)> = (0..conn.len())
        .flat_map(|a| (0..nf).flat_map(move |i| (0..nm).map(move |j| (a, i, j))))
        .collect();
    let witness = sweep::find_first(&cases, |&(a, i, j)| {
        identity(a, &fs[i], &ms[j]).map(|(lhs, rhs)| ConnectionWitness {
            index: a,
            f: fs[i].clone(),
            m: ms[j].clone(),
            lhs,
            rhs,
        })
    });
    ConnectionCheck {
        checked: cases.len(),
        witness,
    }
}

/// Additivity and scalar linearity on seeded random elements, plus the left
/// Leibniz rule `∇(fm) = σ(f)∇m + X(f)τ̂(m)` on basis elements.
pub fn check_connection_axioms<A: Derivable>(
    conn: &Connection<A>,
    bounds: &Bounds,
) -> ConnectionAxioms<A::Elem> {
    use rand::SeedableRng;
    let md = &conn.module;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(bounds.seed);
    let mut additive = true;
    let mut homogeneous = true;
    for _ in 0..8 {
        let m = md.random(&mut rng, 3);
        let n = md.random(&mut rng, 3);
        let c = small_int(&mut rng).plus(&Scalar::q());
        for a in 0..conn.len() {
            let lhs = conn.apply(a, &md.add(&m, &n));
            additive &= lhs == md.add(&conn.apply(a, &m), &conn.apply(a, &n));
            homogeneous &= conn.apply(a, &md.scale(&c, &m)) == md.scale(&c, &conn.apply(a, &m));
        }
    }
    let leibniz = check_triples(conn, bounds, |a, f, m| {
        let x = &conn.sigma.derivations[a];
        let lhs = conn.apply(a, &md.left(f, m));
        let rhs = md.add(
            &md.left(&x.pair.sigma_of(f), &conn.apply(a, m)),
            &md.left(&x.apply(f), &md.tau_hat(a, m)),
        );
        (lhs != rhs).then_some((lhs, rhs))
    });
    ConnectionAxioms {
        additive,
        homogeneous,
        leibniz,
    }
}

/// The symmetric rule `∇(fm) = τ(f)∇m + X(f)σ̂(m)`.
pub fn is_symmetric_connection<A: Derivable>(
    conn: &Connection<A>,
    bounds: &Bounds,
) -> ConnectionCheck<A::Elem> {
    let md = &conn.module;
    check_triples(conn, bounds, |a, f, m| {
        let x = &conn.sigma.derivations[a];
        let lhs = conn.apply(a, &md.left(f, m));
        let rhs = md.add(
            &md.left(&x.pair.tau_of(f), &conn.apply(a, m)),
            &md.left(&x.apply(f), &md.sigma_hat(a, m)),
        );
        (lhs != rhs).then_some((lhs, rhs))
    })
}

/// Right rule `∇(mf) = σ̂(m)X(f) + ∇(m)τ(f)` for bimodule connections.
pub fn check_right_leibniz<A: Derivable>(
    conn: &Connection<A>,
    bounds: &Bounds,
) -> ConnectionCheck<A::Elem> {
    let md = &conn.module;
    check_triples(conn, bounds, |a, f, m| {
        let x = &conn.sigma.derivations[a];
        let lhs = conn.apply(a, &md.right(m, f));
        let rhs = md.add(
            &md.right(&md.sigma_hat(a, m), &x.apply(f)),
            &md.right(&conn.apply(a, m), &x.pair.tau_of(f)),
        );
        (lhs != rhs).then_some((lhs, rhs))
    })
}

/// The connection `∇_a = f_a(τ̂_a − σ̂_a)` with `X_a = f_aτ_a − σ_af_a`,
/// unique among symmetric connections when every pair is strongly regular.
pub fn unique_symmetric_connection<A: Derivable>(
    sigma: &SigmaAlgebra<A>,
    module: &SigmaModule<A>,
    bounds: &Bounds,
) -> Result<Connection<A>, GeometryError> {
    let mut f = Vec::with_capacity(sigma.len());
    for (index, x) in sigma.derivations.iter().enumerate() {
        if !classify_regularity(&x.pair, bounds).is_strongly_regular() {
            return Err(GeometryError::NotStronglyRegular { index });
        }
        if !is_symmetric(x, bounds.degree_bound).symmetric() {
            return Err(GeometryError::NotSymmetricAlgebra { index });
        }
        f.push(inner_decompose(x, bounds)?.m0);
    }
    Connection::new(
        sigma.clone(),
        module.clone(),
        ConnectionRule::SymmetricDelta { f },
        bounds,
    )
}

/// Adds `σ̂_a(m)·Π_a` to a connection, which keeps the left Leibniz rule.
pub fn perturb<A: Derivable>(
    conn: &Connection<A>,
    pi: Vec<Vec<Vec<A::Elem>>>,
) -> Result<Connection<A>, GeometryError> {
    Connection::unchecked(
        conn.sigma.clone(),
        conn.module.clone(),
        ConnectionRule::Perturbed {
            base: Box::new(conn.rule.clone()),
            pi,
        },
    )
}

/// Seeded perturbation matrices that change `∇` on at least one basis element.
pub fn random_perturbation<A: Derivable, R: Rng>(
    conn: &Connection<A>,
    rng: &mut R,
    degree_bound: usize,
) -> Result<Connection<A>, GeometryError> {
    let alg = conn.module.alg().clone();
    let rank = conn.module.rank();
    loop {
        let pi: Vec<Vec<Vec<A::Elem>>> = (0..conn.len())
            .map(|_| {
                (0..rank)
                    .map(|_| (0..rank).map(|_| alg.random_elem(rng, 2)).collect())
                    .collect()
            })
            .collect();
        let candidate = perturb(conn, pi)?;
        let basis = conn.module.basis(degree_bound);
        let changed = (0..conn.len()).any(|a| {
            basis
                .iter()
                .any(|m| candidate.apply(a, m) != conn.apply(a, m))
        });
        if changed {
            return Ok(candidate);
        }
    }
}

/// Coefficients `R_{ab}^{pq}` and `C_{ab}^p` of the relation
/// `X_aX_b = Σ R_{ab}^{pq} X_pX_q + Σ C_{ab}^p X_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieStructure {
    k: usize,
    r: Vec<Scalar>,
    c: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieReport {
    pub involutive: bool,
    pub closed: bool,
}

impl LieStructure {
    /// `R(X_a⊗X_b) = X_b⊗X_a`, `C = 0`.
    pub fn flip(k: usize) -> Self {
        let mut r = vec![Scalar::zero(); k * k * k * k];
        for a in 0..k {
            for b in 0..k {
                r[((a * k + b) * k + b) * k + a] = Scalar::one();
            }
        }
        Self {
            k,
            r,
            c: vec![Scalar::zero(); k * k * k],
        }
    }

    pub fn from_fn(
        k: usize,
        r: impl Fn(usize, usize, usize, usize) -> Scalar,
        c: impl Fn(usize, usize, usize) -> Scalar,
    ) -> Self {
        let mut rs = Vec::with_capacity(k.pow(4));
        let mut cs = Vec::with_capacity(k.pow(3));
        for a in 0..k {
            for b in 0..k {
                for p in 0..k {
                    cs.push(c(a, b, p));
                    for q in 0..k {
                        rs.push(r(a, b, p, q));
                    }
                }
            }
        }
        Self { k, r: rs, c: cs }
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn r(&self, a: usize, b: usize, p: usize, q: usize) -> &Scalar {
        let k = self.k;
        &self.r[((a * k + b) * k + p) * k + q]
    }

    pub fn c(&self, a: usize, b: usize, p: usize) -> &Scalar {
        let k = self.k;
        &self.c[(a * k + b) * k + p]
    }

    /// `R² = id` on `span{X_a⊗X_b}`.
    pub fn is_involutive(&self) -> bool {
        let k = self.k;
        sweep::pairs(k).iter().all(|&(a, b)| {
            sweep::pairs(k).iter().all(|&(c, d)| {
                let sum = sweep::pairs(k).iter().fold(Scalar::zero(), |acc, &(p, q)| {
                    acc.plus(&self.r(a, b, p, q).times(self.r(p, q, c, d)))
                });
                let expected = if (a, b) == (c, d) {
                    Scalar::one()
                } else {
                    Scalar::zero()
                };
                sum == expected
            })
        })
    }

    /// Checks `R² = id` and the defining relation on basis elements.
    pub fn validate<A: Derivable>(&self, s: &SigmaAlgebra<A>, degree_bound: usize) -> LieReport {
        let alg = s.alg();
        let basis = alg.basis(degree_bound);
        let closed = self.k == s.len()
            && sweep::all(&sweep::pairs(self.k), |&(a, b)| {
                basis.iter().all(|f| {
                    let x = |i: usize, g: &A::Elem| s.derivations[i].apply(g);
                    let mut rhs = alg.zero();
                    for (p, q) in sweep::pairs(self.k) {
                        let r = self.r(a, b, p, q);
                        if !r.is_zero() {
                            rhs = alg.add(&rhs, &alg.scale(r, &x(p, &x(q, f))));
                        }
                    }
                    for p in 0..self.k {
                        let c = self.c(a, b, p);
                        if !c.is_zero() {
                            rhs = alg.add(&rhs, &alg.scale(c, &x(p, f)));
                        }
                    }
                    x(a, &x(b, f)) == rhs
                })
            });
        LieReport {
            involutive: self.is_involutive(),
            closed,
        }
    }
}

/// `∇_a∇_b m − Σ R_{ab}^{pq}∇_p∇_q m − Σ C_{ab}^p∇_p m`.
pub fn curvature<A: Derivable>(
    conn: &Connection<A>,
    lie: &LieStructure,
    a: usize,
    b: usize,
    m: &[A::Elem],
) -> Result<ModElem<A>, GeometryError> {
    let k = conn.len();
    for index in [a, b] {
        if index >= k {
            return Err(GeometryError::IndexOutOfRange { index, len: k });
        }
    }
    if lie.size() != k {
        return Err(GeometryError::RankMismatch {
            expected: k,
            found: lie.size(),
        });
    }
    let md = &conn.module;
    let mut out = conn.apply(a, &conn.apply(b, m));
    for (p, q) in sweep::pairs(k) {
        let r = lie.r(a, b, p, q);
        if !r.is_zero() {
            out = md.sub(&out, &md.scale(r, &conn.apply(p, &conn.apply(q, m))));
        }
    }
    for p in 0..k {
        let c = lie.c(a, b, p);
        if !c.is_zero() {
            out = md.sub(&out, &md.scale(c, &conn.apply(p, m)));
        }
    }
    Ok(out)
}

/// Is the curvature zero on every index pair and module basis element?
pub fn is_flat<A: Derivable>(
    conn: &Connection<A>,
    lie: &LieStructure,
    degree_bound: usize,
) -> Result<bool, GeometryError> {
    let ms = conn.module.basis(degree_bound);
    for (a, b) in sweep::pairs(conn.len()) {
        for m in &ms {
            if !conn.module.is_zero(&curvature(conn, lie, a, b, m)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub const HYPOTHESIS_SIGMA: &str = "[sigma_a, sigma_b] = 0";
pub const HYPOTHESIS_SIGMA_X: &str = "[sigma_a, X_b] = 0";
pub const HYPOTHESIS_TAU_HAT: &str = "[tau_hat_a, tau_hat_b] = 0";
pub const HYPOTHESIS_TAU_HAT_NABLA: &str = "[tau_hat_a, nabla_b] = 0";

#[derive(Clone, Debug, PartialEq)]
pub struct TwistedLinearityReport<E> {
    /// Each hypothesis with its verdict, in a fixed order.
    pub hypotheses: Vec<(&'static str, bool)>,
    /// `Curv(fm) = σ_aσ_b(f)Curv(m)`; only evaluated when all hypotheses hold.
    pub linearity: Option<ConnectionCheck<E>>,
}

impl<E> TwistedLinearityReport<E> {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|(_, ok)| *ok)
    }

    pub fn holds(&self) -> bool {
        self.hypotheses_hold() && self.linearity.as_ref().is_some_and(ConnectionCheck::holds)
    }

    pub fn into_result(self) -> Result<Self, GeometryError> {
        if self.hypotheses_hold() {
            Ok(self)
        } else {
            Err(GeometryError::HypothesesFail {
                which: self
                    .hypotheses
                    .iter()
                    .filter(|(_, ok)| !ok)
                    .map(|(h, _)| h.to_string())
                    .collect(),
            })
        }
    }
}

/// Checks the commutation hypotheses and then the twisted linearity of the
/// curvature in the module argument.
pub fn twisted_linearity_check<A: Derivable>(
    conn: &Connection<A>,
    lie: &LieStructure,
    bounds: &Bounds,
) -> Result<TwistedLinearityReport<A::Elem>, GeometryError> {
    let s = &conn.sigma;
    let md = &conn.module;
    let alg = s.alg();
    let k = s.len();
    let gens = alg.generators();
    let basis = alg.basis(bounds.degree_bound);
    let ms = md.basis(bounds.degree_bound);
    let pairs = sweep::pairs(k);

    let sigma = pairs.iter().all(|&(a, b)| {
        gens.iter().all(|g| {
            let (pa, pb) = (s.pair(a), s.pair(b));
            pa.sigma_of(&pb.sigma_of(g)) == pb.sigma_of(&pa.sigma_of(g))
        })
    });
    let sigma_x = pairs.iter().all(|&(a, b)| {
        basis.iter().all(|f| {
            let xb = &s.derivations[b];
            s.pair(a).sigma_of(&xb.apply(f)) == xb.apply(&s.pair(a).sigma_of(f))
        })
    });
    let tau_hat = pairs.iter().all(|&(a, b)| {
        ms.iter()
            .all(|m| md.tau_hat(a, &md.tau_hat(b, m)) == md.tau_hat(b, &md.tau_hat(a, m)))
    });
    let tau_hat_nabla = pairs.iter().all(|&(a, b)| {
        ms.iter()
            .all(|m| md.tau_hat(a, &conn.apply(b, m)) == conn.apply(b, &md.tau_hat(a, m)))
    });
    let hypotheses = vec![
        (HYPOTHESIS_SIGMA, sigma),
        (HYPOTHESIS_SIGMA_X, sigma_x),
        (HYPOTHESIS_TAU_HAT, tau_hat),
        (HYPOTHESIS_TAU_HAT_NABLA, tau_hat_nabla),
    ];
    if !hypotheses.iter().all(|(_, ok)| *ok) {
        return Ok(TwistedLinearityReport {
            hypotheses,
            linearity: None,
        });
    }

    let mut checked = 0;
    let mut witness = None;
    'outer: for &(a, b) in &pairs {
        for f in &basis {
            let sf = s.pair(a).sigma_of(&s.pair(b).sigma_of(f));
            for m in &ms {
                checked += 1;
                let lhs = curvature(conn, lie, a, b, &md.left(f, m))?;
                let rhs = md.left(&sf, &curvature(conn, lie, a, b, m)?);
                if lhs != rhs {
                    witness = Some(ConnectionWitness {
                        index: a * k + b,
                        f: f.clone(),
                        m: m.clone(),
                        lhs,
                        rhs,
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(TwistedLinearityReport {
        hypotheses,
        linearity: Some(ConnectionCheck { checked, witness }),
    })
}

/// Rank-one module over `M_N` with `X_a = Id − Conj(U_a)`,
/// `σ̂_a(A) = U_aAU_a⁻¹Γ_a` and `τ̂_a = Id`, so `∇_a A = A − U_aAU_a⁻¹Γ_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixExample {
    pub alg: MatAlgebra,
    pub us: Vec<Matrix>,
    pub u_invs: Vec<Matrix>,
    pub gammas: Vec<Matrix>,
}

impl MatrixExample {
    pub fn new(
        alg: MatAlgebra,
        us: Vec<Matrix>,
        gammas: Vec<Matrix>,
    ) -> Result<Self, GeometryError> {
        if us.len() != gammas.len() {
            return Err(GeometryError::RankMismatch {
                expected: us.len(),
                found: gammas.len(),
            });
        }
        if us.is_empty() {
            return Err(GeometryError::EmptyFamily);
        }
        let mut u_invs = Vec::with_capacity(us.len());
        for (u, g) in us.iter().zip(&gammas) {
            alg.check_elem(u)?;
            alg.check_elem(g)?;
            match alg.conj(u.clone())? {
                MatEndo::Conj { u_inv, .. } => u_invs.push(u_inv),
                MatEndo::Identity => unreachable!("conj always yields Conj"),
            }
        }
        Ok(Self {
            alg,
            us,
            u_invs,
            gammas,
        })
    }

    /// Diagonal `U_a = diag(1, a+2, (a+2)², …)` with seeded random `Γ_a`.
    pub fn seeded<R: Rng>(n: usize, k: usize, rng: &mut R) -> Self {
        let alg = MatAlgebra::new(n);
        let us = (0..k)
            .map(|a| {
                let base = Scalar::from_int(a as i64 + 2);
                let mut d = Vec::with_capacity(n);
                let mut v = Scalar::one();
                for _ in 0..n {
                    d.push(v.clone());
                    v = v.times(&base);
                }
                Matrix::diagonal(d)
            })
            .collect();
        let gammas = (0..k).map(|_| alg.random_elem(rng, 0)).collect();
        Self::new(alg, us, gammas).expect("diagonal matrices are invertible")
    }

    pub fn sigma_algebra(&self) -> SigmaAlgebra<MatAlgebra> {
        let derivations = self
            .us
            .iter()
            .map(|u| {
                let pair = TwistPair::new(
                    self.alg,
                    self.alg.conj(u.clone()).expect("invertible"),
                    MatEndo::Identity,
                )
                .expect("same handle");
                TwistedDerivation::delta(pair)
            })
            .collect();
        SigmaAlgebra::new(self.alg, derivations).expect("nonempty family")
    }

    pub fn module(&self) -> SigmaModule<MatAlgebra> {
        let s = self.sigma_algebra();
        let sigma_hat = self
            .us
            .iter()
            .zip(&self.gammas)
            .map(|(u, g)| HatMap::twisted(self.alg.conj(u.clone()).expect("invertible"), g.clone()))
            .collect();
        let tau_hat = self
            .us
            .iter()
            .map(|_| HatMap::plain(MatEndo::Identity))
            .collect();
        SigmaModule::with_hat_maps(&s, 1, sigma_hat, tau_hat).expect("consistent shapes")
    }

    pub fn connection(&self) -> Connection<MatAlgebra> {
        let f = vec![self.alg.one(); self.us.len()];
        Connection::unchecked(
            self.sigma_algebra(),
            self.module(),
            ConnectionRule::SymmetricDelta { f },
        )
        .expect("consistent shapes")
    }

    /// `U_aU_bA[U_b⁻¹Γ_b, U_a⁻¹Γ_a]`.
    pub fn curvature_closed_form(&self, a: usize, b: usize, m: &Matrix) -> Matrix {
        let pa = self.u_invs[a].mul(&self.gammas[a]);
        let pb = self.u_invs[b].mul(&self.gammas[b]);
        self.us[a].mul(&self.us[b]).mul(m).mul(&pb.commutator(&pa))
    }
}

/// Searches seeded matrix examples for one whose unique symmetric connection
/// has nonzero curvature; returns the example and a nonzero value.
pub fn search_nonzero_unique_curvature(
    n: usize,
    bounds: &Bounds,
) -> Result<Option<(MatrixExample, Matrix, Matrix)>, GeometryError> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(bounds.seed);
    for _ in 0..bounds.search_bound.max(1) {
        let ex = MatrixExample::seeded(n, 2, &mut rng);
        let s = ex.sigma_algebra();
        let conn = match unique_symmetric_connection(&s, &ex.module(), bounds) {
            Ok(c) => c,
            Err(GeometryError::NotStronglyRegular { .. }) => continue,
            Err(e) => return Err(e),
        };
        let lie = LieStructure::flip(2);
        for m in conn.module.basis(bounds.degree_bound) {
            let r = curvature(&conn, &lie, 0, 1, &m)?;
            if !conn.module.is_zero(&r) {
                return Ok(Some((ex, m[0].clone(), r[0].clone())));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PolyAlgebra;
    use crate::arith::XPoly;
    use crate::deriv::presets;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bounds() -> Bounds {
        Bounds::default()
    }

    fn jackson_sigma() -> SigmaAlgebra<PolyAlgebra> {
        SigmaAlgebra::new(PolyAlgebra, vec![presets::jackson()]).unwrap()
    }

    #[test]
    fn canonical_free_module_maps() {
        let s = jackson_sigma();
        let m = SigmaModule::canonical_free(&s, 2);
        assert!(m.check_module_maps(&s, 4));
        assert_eq!(m.basis(3).len(), 8);
    }

    #[test]
    fn projective_requires_idempotent() {
        let ex = MatrixExample::seeded(2, 1, &mut ChaCha8Rng::seed_from_u64(1));
        let s = ex.sigma_algebra();
        let p = Matrix::from_ints(&[&[1, 0], &[0, 0]]);
        assert!(SigmaModule::projective(&s, p).is_ok());
        let bad = Matrix::from_ints(&[&[1, 1], &[0, 0]]).scale(&Scalar::from_int(2));
        assert_eq!(
            SigmaModule::projective(&s, bad).unwrap_err(),
            GeometryError::NotIdempotent
        );
    }

    #[test]
    fn christoffel_connection_is_valid() {
        let s = jackson_sigma();
        let md = SigmaModule::canonical_free(&s, 1);
        let gamma = vec![vec![vec![XPoly::from_coeffs(vec![
            Scalar::one(),
            Scalar::q(),
        ])]]];
        let conn =
            Connection::new(s, md, ConnectionRule::Christoffel { gamma }, &bounds()).unwrap();
        assert!(check_connection_axioms(&conn, &bounds()).holds());
    }

    #[test]
    fn untwisted_rule_is_rejected() {
        let s = jackson_sigma();
        let md = SigmaModule::canonical_free(&s, 1);
        let gamma = vec![vec![vec![XPoly::one()]]];
        let rule = ConnectionRule::Untwisted { gamma };
        assert!(matches!(
            Connection::new(s.clone(), md.clone(), rule.clone(), &bounds()),
            Err(GeometryError::InvalidConnection(_))
        ));
        let conn = Connection::unchecked(s, md, rule).unwrap();
        assert!(check_connection_axioms(&conn, &bounds())
            .leibniz
            .witness
            .is_some());
    }

    #[test]
    fn unique_connection_on_translation() {
        let pair = presets::translation_pair(Scalar::one());
        let x = TwistedDerivation::from_generator_image(pair, XPoly::constant(Scalar::from_int(3)));
        let s = SigmaAlgebra::new(PolyAlgebra, vec![x]).unwrap();
        let md = SigmaModule::canonical_free(&s, 2);
        let conn = unique_symmetric_connection(&s, &md, &bounds()).unwrap();
        assert!(is_symmetric_connection(&conn, &bounds()).holds());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bad = random_perturbation(&conn, &mut rng, 8).unwrap();
        assert!(check_connection_axioms(&bad, &bounds()).holds());
        assert!(!is_symmetric_connection(&bad, &bounds()).holds());
    }

    #[test]
    fn unique_connection_needs_strong_regularity() {
        let s = jackson_sigma();
        let md = SigmaModule::canonical_free(&s, 1);
        assert_eq!(
            unique_symmetric_connection(&s, &md, &bounds()).unwrap_err(),
            GeometryError::NotStronglyRegular { index: 0 }
        );
    }

    #[test]
    fn inner_connection_is_bimodule() {
        let pair = presets::matrix_pair();
        let m0 = Matrix::from_ints(&[&[1, 2], &[0, 1]]);
        let x = TwistedDerivation::inner(pair, m0.clone()).unwrap();
        let s = SigmaAlgebra::new(MatAlgebra::new(2), vec![x]).unwrap();
        let md = SigmaModule::canonical_free(&s, 1);
        let conn =
            Connection::new(s, md, ConnectionRule::Inner { f: vec![m0] }, &bounds()).unwrap();
        assert!(check_right_leibniz(&conn, &bounds()).holds());
    }

    #[test]
    fn matrix_example_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ex = MatrixExample::seeded(2, 2, &mut rng);
        let conn = ex.connection();
        assert!(check_connection_axioms(&conn, &bounds()).holds());
        let lie = LieStructure::flip(2);
        assert_eq!(
            lie.validate(&conn.sigma, 0),
            LieReport {
                involutive: true,
                closed: true
            }
        );
        for m in conn.module.basis(0) {
            let r = curvature(&conn, &lie, 0, 1, &m).unwrap();
            assert_eq!(r[0], ex.curvature_closed_form(0, 1, &m[0]));
        }
        let report = twisted_linearity_check(&conn, &lie, &bounds()).unwrap();
        assert!(report.holds(), "{report:?}");
    }

    #[test]
    fn nonzero_curvature_found() {
        let found = search_nonzero_unique_curvature(2, &bounds()).unwrap();
        assert!(found.is_some());
    }
}
