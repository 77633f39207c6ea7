//! Subcommand implementations. Each returns a flat JSON report and whether
//! the answer is a mathematical negative.

use clap::{Args, Subcommand};
use serde_json::{json, Map, Value as Json};
use twistcalc_core::acceptance::run_all;
use twistcalc_core::algebra::{Algebra, MatAlgebra, MatrixLinearMap, PolyAlgebra};
use twistcalc_core::arith::XPoly;
use twistcalc_core::deriv::{
    classify_regularity, inner_decompose, is_symmetric, verify_twisted_leibniz, CheckReport,
    DerivError, Derivable, HlsGenerator, LeibnizStyle, MatRule, Regularity, TwistPair,
    TwistedDerivation,
};
use twistcalc_core::geometry::commutative::{canonical_is_flat, CommutativeLie};
use twistcalc_core::geometry::{
    check_connection_axioms, curvature, is_symmetric_connection, random_perturbation,
    search_nonzero_unique_curvature, twisted_linearity_check, unique_symmetric_connection,
    Connection, ConnectionCheck, ConnectionRule, GeometryError, LieStructure, MatrixExample,
    SigmaAlgebra, SigmaModule,
};
use twistcalc_core::hochschild::{
    classify_cocycle, h0_poly, h1_poly, CocycleClass, CohomologyReport, TwistedBimodule,
};
use twistcalc_core::Dimension;

use crate::session::{kernel, matrix_example, AnyPair, CliError, PairArgs, Preset, Session};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Negative,
}

pub struct Report {
    pub session: Session,
    pub outcome: Outcome,
    pub body: Map<String, Json>,
}

fn report(session: Session, negative: bool, body: Json) -> Result<Report, CliError> {
    let Json::Object(body) = body else {
        unreachable!("reports are objects")
    };
    Ok(Report {
        session,
        outcome: if negative {
            Outcome::Negative
        } else {
            Outcome::Success
        },
        body,
    })
}

fn dim_json(d: Dimension) -> Json {
    match d {
        Dimension::Finite(n) => json!(n),
        Dimension::Infinite => json!("infinite"),
    }
}

fn strings<T: ToString>(items: &[T]) -> Json {
    Json::Array(items.iter().map(|t| Json::String(t.to_string())).collect())
}

fn counterexample_json<E: ToString>(r: &CheckReport<E>) -> Json {
    match &r.counterexample {
        None => Json::Null,
        Some(c) => json!({
            "f": c.f.to_string(), "g": c.g.to_string(),
            "lhs": c.lhs.to_string(), "rhs": c.rhs.to_string(),
        }),
    }
}

fn witness_json<E: ToString>(c: &ConnectionCheck<E>) -> Json {
    match &c.witness {
        None => Json::Null,
        Some(w) => json!({
            "index": w.index,
            "f": w.f.to_string(),
            "m": strings(&w.m),
            "lhs": strings(&w.lhs),
            "rhs": strings(&w.rhs),
        }),
    }
}

#[derive(Args, Clone, Debug)]
pub struct DerivArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// X(x) for a derivation on K[x]
    #[arg(long)]
    pub fx: Option<String>,
    /// m0 of the inner derivation X(f) = m0 tau(f) - sigma(f) m0 on M_N
    #[arg(long)]
    pub m0: Option<String>,
    /// N^2 x N^2 matrix whose column k is X of the k-th matrix unit (row-major)
    #[arg(long)]
    pub table: Option<String>,
}

pub enum AnyDeriv {
    Poly(TwistedDerivation<PolyAlgebra>),
    Mat(TwistedDerivation<MatAlgebra>),
}

impl DerivArgs {
    /// Builds the derivation without validating a user supplied table.
    fn derivation(&self) -> Result<(Session, Option<Preset>, AnyDeriv), CliError> {
        let (s, preset, pair) = self.pair.pair()?;
        let x = match pair {
            AnyPair::Poly(pair) => {
                if self.m0.is_some() || self.table.is_some() {
                    return Err(CliError::Usage(
                        "--m0 and --table need a matrix algebra".into(),
                    ));
                }
                let fx = match (&self.fx, preset) {
                    (Some(src), _) => Some(s.poly("fx", src)?),
                    (None, Some(Preset::Jackson | Preset::Translation)) => Some(XPoly::one()),
                    (None, _) => None,
                };
                AnyDeriv::Poly(match fx {
                    Some(f0) => TwistedDerivation::from_generator_image(pair, f0),
                    None => TwistedDerivation::delta(pair),
                })
            }
            AnyPair::Mat(pair) => {
                if self.fx.is_some() {
                    return Err(CliError::Usage("--fx needs the polynomial algebra".into()));
                }
                let n = pair.alg.size();
                AnyDeriv::Mat(match (&self.m0, &self.table) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::Usage(
                            "give at most one of --m0 and --table".into(),
                        ))
                    }
                    (Some(src), None) => {
                        let m0 = s.matrix("m0", src, n)?;
                        TwistedDerivation::inner(pair, m0).map_err(kernel)?
                    }
                    (None, Some(src)) => {
                        let table = s.matrix("table", src, n * n)?;
                        let map = MatrixLinearMap::new(pair.alg, table).map_err(kernel)?;
                        TwistedDerivation {
                            pair,
                            rule: MatRule::Linear(map),
                        }
                    }
                    (None, None) => TwistedDerivation::delta(pair),
                })
            }
        };
        Ok((s, preset, x))
    }
}

fn pair_json<A: Derivable>(x: &TwistedDerivation<A>) -> Json {
    json!({ "rule": x.rule.to_string() })
}

/// Rejects rules that are not `(σ,τ)`-derivations, as a negative answer.
fn invalid_derivation<A: Derivable>(
    s: &Session,
    x: &TwistedDerivation<A>,
) -> Option<Result<Report, CliError>> {
    let r = verify_twisted_leibniz(x, LeibnizStyle::SigmaTau, s.bounds.degree_bound);
    (!r.holds()).then(|| {
        report(
            s.clone(),
            true,
            json!({
                "valid": false,
                "reason": "twisted Leibniz rule fails",
                "counterexample": counterexample_json(&r),
            }),
        )
    })
}

#[derive(Subcommand, Clone, Debug)]
pub enum DerivCmd {
    /// Evaluate X(f)
    Apply {
        #[command(flatten)]
        args: DerivArgs,
        /// Argument f
        #[arg(long)]
        f: String,
    },
    /// Verify the twisted Leibniz rules on the verification basis
    Check(DerivArgs),
    /// Classify the regularity of the twist pair
    Classify(PairArgs),
    /// Write X(f) = m0 tau(f) - sigma(f) m0
    Decompose(DerivArgs),
}

pub fn deriv(cmd: &DerivCmd) -> Result<Report, CliError> {
    match cmd {
        DerivCmd::Apply { args, f } => {
            let (s, _, x) = args.derivation()?;
            match x {
                AnyDeriv::Poly(x) => {
                    let fv = s.poly("f", f)?;
                    let mut body = pair_json(&x);
                    body["input"] = json!(fv.to_string());
                    body["result"] = json!(x.apply(&fv).to_string());
                    report(s, false, body)
                }
                AnyDeriv::Mat(x) => {
                    if let Some(r) = invalid_derivation(&s, &x) {
                        return r;
                    }
                    let fv = s.matrix("f", f, x.pair.alg.size())?;
                    let mut body = pair_json(&x);
                    body["input"] = json!(fv.to_string());
                    body["result"] = json!(x.apply(&fv).to_string());
                    report(s, false, body)
                }
            }
        }
        DerivCmd::Check(args) => {
            let (s, _, x) = args.derivation()?;
            let bound = s.bounds.degree_bound;
            let (body, ok) = match &x {
                AnyDeriv::Poly(x) => check_body(x, bound),
                AnyDeriv::Mat(x) => check_body(x, bound),
            };
            report(s, !ok, body)
        }
        DerivCmd::Classify(args) => {
            let (s, _, pair) = args.pair()?;
            let body = match &pair {
                AnyPair::Poly(p) => classify_body(classify_regularity(p, &s.bounds), |w| {
                    p.delta(w).to_string()
                }),
                AnyPair::Mat(p) => classify_body(classify_regularity(p, &s.bounds), |w| {
                    p.delta(w).to_string()
                }),
            };
            report(s, false, body)
        }
        DerivCmd::Decompose(args) => {
            let (s, _, x) = args.derivation()?;
            match &x {
                AnyDeriv::Poly(x) => {
                    let outcome = inner_decompose(x, &s.bounds);
                    let class = match classify_cocycle(x, &s.bounds) {
                        CocycleClass::Inner { .. } => json!({ "kind": "inner" }),
                        CocycleClass::Outer { representative } => {
                            json!({ "kind": "outer", "representative": representative.to_string() })
                        }
                    };
                    decompose_report(s, outcome, class)
                }
                AnyDeriv::Mat(x) => {
                    if let Some(r) = invalid_derivation(&s, x) {
                        return r;
                    }
                    let outcome = inner_decompose(x, &s.bounds);
                    decompose_report(s, outcome, Json::Null)
                }
            }
        }
    }
}

fn check_body<A: Derivable>(x: &TwistedDerivation<A>, bound: usize) -> (Json, bool) {
    let sym = is_symmetric(x, bound);
    let ok = sym.sigma_tau.holds();
    (
        json!({
            "rule": x.rule.to_string(),
            "leibniz": ok,
            "symmetric": sym.symmetric(),
            "checked": sym.sigma_tau.checked,
            "counterexample": counterexample_json(&sym.sigma_tau),
            "symmetryCounterexample": counterexample_json(&sym.tau_sigma),
        }),
        ok,
    )
}

fn classify_body<E: ToString>(r: Regularity<E>, delta: impl Fn(&E) -> String) -> Json {
    let mut body =
        json!({ "regularity": r.name(), "witness": Json::Null, "deltaOfWitness": Json::Null });
    if let Some(w) = r.witness() {
        body["witness"] = json!(w.to_string());
        body["deltaOfWitness"] = json!(delta(w));
    }
    if let Regularity::Unknown { search_bound } = r {
        body["searchBound"] = json!(search_bound);
    }
    body
}

fn decompose_report<E: ToString>(
    s: Session,
    outcome: Result<twistcalc_core::deriv::InnerDecomposition<E>, DerivError>,
    class: Json,
) -> Result<Report, CliError> {
    match outcome {
        Ok(d) => report(
            s,
            false,
            json!({
                "inner": true,
                "m0": d.m0.to_string(),
                "solutionDim": dim_json(d.solution_dim),
                "uniquenessHypotheses": d.hypotheses,
                "commutes": d.commutes,
                "verified": d.verified,
                "class": class,
            }),
        ),
        Err(DerivError::NotInner { residue }) => report(
            s,
            true,
            json!({ "inner": false, "obstruction": residue, "class": class }),
        ),
        Err(e) => Err(kernel(e)),
    }
}

#[derive(Args, Clone, Debug)]
pub struct HlsArgs {
    #[command(flatten)]
    pub deriv: DerivArgs,
    /// Highest n in the check that delta(x) divides delta(x^n)
    #[arg(long, default_value_t = 16)]
    pub max_degree: usize,
}

pub fn hls(args: &HlsArgs) -> Result<Report, CliError> {
    let (s, _, x) = args.deriv.derivation()?;
    let AnyDeriv::Poly(x) = x else {
        return Err(CliError::Usage("hls needs the polynomial algebra".into()));
    };
    let g = match HlsGenerator::new(x.pair.clone()) {
        Ok(g) => g,
        Err(DerivError::SigmaEqualsTau) => {
            return report(
                s,
                true,
                json!({ "generator": false, "reason": "sigma equals tau" }),
            )
        }
        Err(e) => return Err(kernel(e)),
    };
    let fac = match g.factor(&x, s.bounds.degree_bound) {
        Ok(f) => f,
        Err(DerivError::Arith(e)) => {
            return report(
                s,
                true,
                json!({
                    "generator": true,
                    "gHat": g.g_hat.to_string(),
                    "factor": Json::Null,
                    "reason": format!("X(x) is not a multiple of the generator's value at x: {e}"),
                }),
            )
        }
        Err(e) => return Err(kernel(e)),
    };
    let body = json!({
        "generator": true,
        "gHat": g.g_hat.to_string(),
        "deltaOfX": x.pair.delta(&XPoly::var()).to_string(),
        "generatorOfX": g.apply(&XPoly::var()).map_err(kernel)?.to_string(),
        "maxDegree": args.max_degree,
        "divisibilityChain": g.divisibility_chain(args.max_degree),
        "factor": { "x": x.generator_image().to_string(), "p": fac.p.to_string(), "verified": fac.verified },
    });
    let ok = fac.verified && body["divisibilityChain"] == json!(true);
    report(s, !ok, body)
}

#[derive(Args, Clone, Debug)]
pub struct CohomArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Number of copies k in the coefficient bimodule (M_N)^k
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
}

#[derive(Subcommand, Clone, Debug)]
pub enum CohomCmd {
    /// Zeroth twisted Hochschild cohomology
    H0(CohomArgs),
    /// First twisted Hochschild cohomology
    H1(CohomArgs),
    /// Dimensions of H^0..H^max and delta o delta checks for a matrix pair
    Matrix {
        #[command(flatten)]
        args: CohomArgs,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
}

fn bimodule(args: &CohomArgs, pair: TwistPair<MatAlgebra>) -> Result<TwistedBimodule, CliError> {
    TwistedBimodule::new(pair, args.copies).map_err(kernel)
}

fn cohomology_json(m: &TwistedBimodule, r: &CohomologyReport) -> Json {
    let reps: Vec<Json> = r
        .representatives
        .iter()
        .map(|v| {
            if r.degree == 0
                && m.module_dim() == m.cochain_dim(0)
                && v.len() == m.pair().alg.size().pow(2)
            {
                json!(m.zero_cochain_as_matrix(v).to_string())
            } else {
                strings(v)
            }
        })
        .collect();
    json!({
        "degree": r.degree,
        "dim": r.dim_h,
        "dimCochains": r.dim_cochains,
        "dimCocycles": r.dim_z,
        "dimCoboundaries": r.dim_b,
        "representatives": reps,
    })
}

pub fn cohom(cmd: &CohomCmd) -> Result<Report, CliError> {
    match cmd {
        CohomCmd::H0(args) => {
            let (s, _, pair) = args.pair.pair()?;
            match pair {
                AnyPair::Poly(p) => {
                    let h = h0_poly(&p, &s.bounds);
                    report(s, false, json!({ "h0": format!("{h:?}") }))
                }
                AnyPair::Mat(p) => {
                    let m = bimodule(args, p)?;
                    let r = m.cohomology(0).map_err(kernel)?;
                    report(s, false, cohomology_json(&m, &r))
                }
            }
        }
        CohomCmd::H1(args) => {
            let (s, _, pair) = args.pair.pair()?;
            match pair {
                AnyPair::Poly(p) => {
                    let h = h1_poly(&p);
                    report(
                        s,
                        false,
                        json!({
                            "dim": dim_json(h.dim),
                            "representatives": strings(&h.representatives),
                            "modulus": h.modulus.to_string(),
                        }),
                    )
                }
                AnyPair::Mat(p) => {
                    let m = bimodule(args, p)?;
                    let r = m.cohomology(1).map_err(kernel)?;
                    report(s, false, cohomology_json(&m, &r))
                }
            }
        }
        CohomCmd::Matrix { args, max_degree } => {
            let (s, _, pair) = args.pair.pair()?;
            let AnyPair::Mat(p) = pair else {
                return Err(CliError::Usage(
                    "cohom matrix needs a matrix algebra (--N or --algebra matN)".into(),
                ));
            };
            let m = bimodule(args, p)?;
            let mut degrees = Vec::new();
            for n in 0..=*max_degree {
                let r = m.cohomology(n).map_err(kernel)?;
                degrees.push(cohomology_json(&m, &r));
            }
            let mut square = Vec::new();
            for n in 1..=(*max_degree + 1) {
                square.push(json!({ "degree": n, "holds": m.square_zero(n).map_err(kernel)? }));
            }
            let all_zero = square.iter().all(|v| v["holds"] == json!(true));
            report(
                s,
                !all_zero,
                json!({ "copies": args.copies, "degrees": degrees, "squareZero": square }),
            )
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct GeomArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// X(x) for polynomial presets and explicit pairs (defaults to delta)
    #[arg(long)]
    pub fx: Option<String>,
    /// Rank of the free module
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// Number of twisted derivations in the matrix example
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Add a seeded nonzero perturbation to the connection
    #[arg(long)]
    pub perturb: bool,
    /// Replace the connection by the untwisted rule (not a connection)
    #[arg(long)]
    pub untwisted: bool,
    /// Number of seeded perturbations tried against uniqueness
    #[arg(long, default_value_t = 10)]
    pub perturbations: usize,
}

#[derive(Args, Clone, Debug)]
pub struct BracketArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value = "1")]
    pub f: String,
    #[arg(long, default_value = "x")]
    pub g: String,
}

#[derive(Subcommand, Clone, Debug)]
pub enum GeomCmd {
    /// Check the connection axioms and the symmetric rule
    ConnectionCheck(GeomArgs),
    /// Curvature against closed forms
    Curvature(GeomArgs),
    /// Build the unique symmetric connection and try perturbations
    UniqueConnection(GeomArgs),
    /// Twisted bracket of X_f and X_g on K[x]
    Bracket(BracketArgs),
}

enum AnyConnection {
    Poly(Connection<PolyAlgebra>),
    Mat(Connection<MatAlgebra>),
}

impl GeomArgs {
    fn with_default_preset(&self) -> PairArgs {
        let mut p = self.pair.clone();
        if p.preset.is_none() && p.sigma.is_none() && p.tau.is_none() {
            p.preset = Some("matrix-example".into());
        }
        p
    }

    fn sigma_algebra_poly(
        &self,
        s: &Session,
        pair: TwistPair<PolyAlgebra>,
        preset: Option<Preset>,
    ) -> Result<SigmaAlgebra<PolyAlgebra>, CliError> {
        let fx = match (&self.fx, preset) {
            (Some(src), _) => Some(s.poly("fx", src)?),
            (None, Some(Preset::Jackson | Preset::Translation)) => Some(XPoly::one()),
            _ => None,
        };
        let x = match fx {
            Some(f0) => TwistedDerivation::from_generator_image(pair, f0),
            None => TwistedDerivation::delta(pair),
        };
        SigmaAlgebra::new(PolyAlgebra, vec![x]).map_err(kernel)
    }

    /// The default connection of the selected setting.
    fn connection(&self) -> Result<(Session, Option<Preset>, AnyConnection), CliError> {
        if self.rank == 0 || self.k == 0 {
            return Err(CliError::Usage("--rank and --k must be positive".into()));
        }
        let pair_args = self.with_default_preset();
        let (s, preset, pair) = pair_args.pair()?;
        let conn = match (preset, pair) {
            (Some(Preset::MatrixExample | Preset::UniqueSearch), AnyPair::Mat(p)) => {
                let ex = matrix_example(&s, p.alg.size(), self.k);
                AnyConnection::Mat(ex.connection())
            }
            (Some(Preset::Translation), AnyPair::Poly(p)) => {
                let sa = self.sigma_algebra_poly(&s, p, preset)?;
                let md = SigmaModule::canonical_free(&sa, self.rank);
                AnyConnection::Poly(
                    unique_symmetric_connection(&sa, &md, &s.bounds).map_err(kernel)?,
                )
            }
            (_, AnyPair::Poly(p)) => {
                let sa = self.sigma_algebra_poly(&s, p, preset)?;
                AnyConnection::Poly(christoffel_zero(sa, self.rank)?)
            }
            (_, AnyPair::Mat(p)) => {
                let alg = p.alg;
                let sa =
                    SigmaAlgebra::new(alg, vec![TwistedDerivation::delta(p)]).map_err(kernel)?;
                AnyConnection::Mat(christoffel_zero(sa, self.rank)?)
            }
        };
        Ok((s, preset, conn))
    }
}

/// `∇_a m = Σ X_a(mⁱ)τ̂_a(eᵢ)`.
fn christoffel_zero<A: Derivable>(
    sa: SigmaAlgebra<A>,
    rank: usize,
) -> Result<Connection<A>, CliError> {
    let md = SigmaModule::canonical_free(&sa, rank);
    let gamma = vec![vec![md.zero(); rank]; sa.len()];
    Connection::unchecked(sa, md, ConnectionRule::Christoffel { gamma }).map_err(kernel)
}

/// The zero-Christoffel connection with its `X(mⁱ)` term dropped, so `∇ = 0`.
/// It breaks the Leibniz rule whenever some `X_a` is nonzero.
fn untwisted<A: Derivable>(conn: &Connection<A>) -> Result<Connection<A>, CliError> {
    let md = &conn.module;
    let gamma = vec![vec![md.zero(); md.rank()]; conn.len()];
    Connection::unchecked(
        conn.sigma.clone(),
        md.clone(),
        ConnectionRule::Untwisted { gamma },
    )
    .map_err(kernel)
}

fn rule_name<A: Derivable>(c: &Connection<A>) -> &'static str {
    match c.rule {
        ConnectionRule::Christoffel { .. } => "christoffel",
        ConnectionRule::Inner { .. } => "inner",
        ConnectionRule::SymmetricDelta { .. } => "symmetric-delta",
        ConnectionRule::Untwisted { .. } => "untwisted",
        ConnectionRule::Perturbed { .. } => "perturbed",
    }
}

fn connection_check_body<A: Derivable>(
    s: &Session,
    conn: &Connection<A>,
    args: &GeomArgs,
) -> Result<(Json, bool), CliError> {
    let mut rng = s.rng();
    let conn = if args.untwisted {
        untwisted(conn)?
    } else if args.perturb {
        random_perturbation(conn, &mut rng, s.bounds.degree_bound).map_err(kernel)?
    } else {
        conn.clone()
    };
    let axioms = check_connection_axioms(&conn, &s.bounds);
    let sym = is_symmetric_connection(&conn, &s.bounds);
    let ok = axioms.holds();
    Ok((
        json!({
            "rule": rule_name(&conn),
            "derivations": conn.len(),
            "rank": conn.module.rank(),
            "additive": axioms.additive,
            "homogeneous": axioms.homogeneous,
            "leibniz": axioms.leibniz.holds(),
            "leibnizWitness": witness_json(&axioms.leibniz),
            "symmetric": sym.holds(),
            "symmetricWitness": witness_json(&sym),
        }),
        ok,
    ))
}

pub fn geom(cmd: &GeomCmd) -> Result<Report, CliError> {
    match cmd {
        GeomCmd::ConnectionCheck(args) => {
            let (s, _, conn) = args.connection()?;
            let (body, ok) = match &conn {
                AnyConnection::Poly(c) => connection_check_body(&s, c, args)?,
                AnyConnection::Mat(c) => connection_check_body(&s, c, args)?,
            };
            report(s, !ok, body)
        }
        GeomCmd::Curvature(args) => curvature_cmd(args),
        GeomCmd::UniqueConnection(args) => unique_cmd(args),
        GeomCmd::Bracket(args) => {
            let mut pair_args = args.pair.clone();
            if pair_args.preset.is_none() && pair_args.sigma.is_none() {
                pair_args.preset = Some("commutative-canonical".into());
            }
            let (s, _, pair) = pair_args.pair()?;
            let AnyPair::Poly(p) = pair else {
                return Err(CliError::Usage(
                    "bracket needs the polynomial algebra".into(),
                ));
            };
            let lie = match CommutativeLie::new(p) {
                Ok(l) => l,
                Err(
                    e @ (GeometryError::Unsupported(_)
                    | GeometryError::Algebra(_)
                    | GeometryError::Deriv(_)),
                ) => {
                    return report(
                        s,
                        true,
                        json!({ "defined": false, "reason": e.to_string() }),
                    )
                }
                Err(e) => return Err(kernel(e)),
            };
            let f = s.poly("f", &args.f)?;
            let g = s.poly("g", &args.g)?;
            let (bf, bg) = lie.braid(&f, &g);
            let matches = lie.bracket_matches_composition(&f, &g, s.bounds.degree_bound);
            let involutive = lie.braid_is_involutive(&f, &g);
            report(
                s,
                !(matches && involutive),
                json!({
                    "defined": true,
                    "f": f.to_string(),
                    "g": g.to_string(),
                    "braid": [bf.to_string(), bg.to_string()],
                    "bracket": lie.bracket(&f, &g).to_string(),
                    "involutive": involutive,
                    "matchesComposition": matches,
                }),
            )
        }
    }
}

fn curvature_cmd(args: &GeomArgs) -> Result<Report, CliError> {
    let pair_args = args.with_default_preset();
    let (s, preset, pair) = pair_args.pair()?;
    match (preset, pair) {
        (Some(Preset::UniqueSearch), AnyPair::Mat(p)) => {
            match search_nonzero_unique_curvature(p.alg.size(), &s.bounds).map_err(kernel)? {
                None => report(s, true, json!({ "found": false })),
                Some((ex, a, r)) => report(
                    s,
                    false,
                    json!({
                        "found": true,
                        "us": strings(&ex.us),
                        "gammas": strings(&ex.gammas),
                        "element": a.to_string(),
                        "curvature": r.to_string(),
                        "closedForm": ex.curvature_closed_form(0, 1, &a).to_string(),
                    }),
                ),
            }
        }
        (Some(Preset::MatrixExample), AnyPair::Mat(p)) => {
            let k = args.k.max(2);
            let mut rng = s.rng();
            let ex = MatrixExample::seeded(p.alg.size(), k, &mut rng);
            let conn = ex.connection();
            let lie = LieStructure::flip(k);
            let mut samples = conn.module.basis(0);
            samples.push(vec![ex.alg.random_elem(&mut rng, 0)]);
            let mut matches = true;
            let mut flat = true;
            let mut out = Vec::new();
            for m in &samples {
                let r = curvature(&conn, &lie, 0, 1, m).map_err(kernel)?;
                let closed = ex.curvature_closed_form(0, 1, &m[0]);
                matches &= r[0] == closed;
                flat &= r[0].is_zero();
                out.push(json!({ "element": m[0].to_string(), "curvature": r[0].to_string(), "closedForm": closed.to_string() }));
            }
            let tl = twisted_linearity_check(&conn, &lie, &s.bounds).map_err(kernel)?;
            let hyps: Map<String, Json> = tl
                .hypotheses
                .iter()
                .map(|(h, ok)| (h.to_string(), json!(ok)))
                .collect();
            let tl_holds = tl.holds();
            report(
                s,
                !(matches && tl_holds),
                json!({
                    "us": strings(&ex.us),
                    "gammas": strings(&ex.gammas),
                    "closedFormMatchesComposition": matches,
                    "flat": flat,
                    "samples": out,
                    "twistedLinearity": { "hypotheses": hyps, "holds": tl_holds },
                }),
            )
        }
        (_, AnyPair::Poly(p)) => {
            let lie = match CommutativeLie::new(p) {
                Ok(l) => l,
                Err(
                    e @ (GeometryError::Unsupported(_)
                    | GeometryError::Algebra(_)
                    | GeometryError::Deriv(_)),
                ) => {
                    return report(
                        s,
                        true,
                        json!({ "defined": false, "reason": e.to_string() }),
                    )
                }
                Err(e) => return Err(kernel(e)),
            };
            let d = s.bounds.degree_bound;
            let flat = canonical_is_flat(&lie, d).map_err(kernel)?;
            report(
                s,
                !flat,
                json!({
                    "defined": true,
                    "connection": "canonical",
                    "gHat": lie.module().g_hat().to_string(),
                    "triplesChecked": (d + 1).pow(3),
                    "flat": flat,
                }),
            )
        }
        (_, AnyPair::Mat(_)) => Err(CliError::Usage(
            "matrix curvature uses --preset matrix-example or --preset unique-search".into(),
        )),
    }
}

fn unique_body<A: Derivable>(
    s: &Session,
    sa: &SigmaAlgebra<A>,
    md: &SigmaModule<A>,
    tries: usize,
) -> Result<(Json, bool), CliError> {
    let conn = match unique_symmetric_connection(sa, md, &s.bounds) {
        Ok(c) => c,
        Err(
            e @ (GeometryError::NotStronglyRegular { .. }
            | GeometryError::NotSymmetricAlgebra { .. }),
        ) => {
            return Ok((json!({ "exists": false, "reason": e.to_string() }), false));
        }
        Err(e) => return Err(kernel(e)),
    };
    let ConnectionRule::SymmetricDelta { f } = &conn.rule else {
        unreachable!("unique connection uses the delta rule")
    };
    let symmetric = is_symmetric_connection(&conn, &s.bounds);
    let mut rng = s.rng();
    let mut falsified = 0;
    let mut first_witness = Json::Null;
    for _ in 0..tries {
        let bad = random_perturbation(&conn, &mut rng, s.bounds.degree_bound).map_err(kernel)?;
        let check = is_symmetric_connection(&bad, &s.bounds);
        if !check.holds() {
            falsified += 1;
            if first_witness.is_null() {
                first_witness = witness_json(&check);
            }
        }
    }
    let ok = symmetric.holds() && falsified == tries;
    Ok((
        json!({
            "exists": true,
            "coefficients": strings(f),
            "symmetric": symmetric.holds(),
            "perturbations": { "tried": tries, "falsified": falsified, "firstWitness": first_witness },
        }),
        ok,
    ))
}

fn unique_cmd(args: &GeomArgs) -> Result<Report, CliError> {
    let pair_args = args.with_default_preset();
    let (s, preset, pair) = pair_args.pair()?;
    let (body, ok) = match (preset, pair) {
        (Some(Preset::MatrixExample | Preset::UniqueSearch), AnyPair::Mat(p)) => {
            let ex = matrix_example(&s, p.alg.size(), args.k);
            unique_body(&s, &ex.sigma_algebra(), &ex.module(), args.perturbations)?
        }
        (_, AnyPair::Mat(p)) => {
            let alg = p.alg;
            let sa = SigmaAlgebra::new(alg, vec![TwistedDerivation::delta(p)]).map_err(kernel)?;
            let md = SigmaModule::canonical_free(&sa, args.rank);
            unique_body(&s, &sa, &md, args.perturbations)?
        }
        (_, AnyPair::Poly(p)) => {
            let sa = args.sigma_algebra_poly(&s, p, preset)?;
            let md = SigmaModule::canonical_free(&sa, args.rank);
            unique_body(&s, &sa, &md, args.perturbations)?
        }
    };
    report(s, !ok, body)
}

pub fn selftest(s: Session) -> Result<Report, CliError> {
    let results = run_all(&s.bounds);
    let passed = results.iter().filter(|r| r.passed).count();
    let criteria: Vec<Json> = results
        .iter()
        .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail }))
        .collect();
    let total = results.len();
    report(
        s,
        passed != total,
        json!({ "criteria": criteria, "passed": passed, "total": total }),
    )
}
