//! Command-line flags shared by every subcommand and their translation into
//! kernel objects.

use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};
use thiserror::Error;
use twistcalc_core::algebra::{MatAlgebra, MatEndo, PolyAlgebra, Subst};
use twistcalc_core::arith::{Scalar, XPoly};
use twistcalc_core::deriv::{presets, TwistPair};
use twistcalc_core::geometry::MatrixExample;
use twistcalc_core::linalg::Matrix;
use twistcalc_core::Bounds;

use crate::expr::{eval, parse_expr, EvalError, Symbols, SyntaxError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("--{flag}: {source}")]
    Syntax {
        flag: &'static str,
        #[source]
        source: SyntaxError,
    },
    #[error("--{flag}: {source}")]
    Eval {
        flag: &'static str,
        #[source]
        source: EvalError,
    },
    #[error("{0}")]
    Kernel(String),
}

impl CliError {
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            CliError::Syntax { source, .. } => Some((source.line, source.column)),
            _ => None,
        }
    }
}

pub fn kernel<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Kernel(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldName {
    #[value(name = "Q")]
    Q,
    #[value(name = "Q(q)")]
    Qq,
}

#[derive(Args, Clone, Debug)]
pub struct CommonArgs {
    /// Ground field: Q or Q(q)
    #[arg(long, value_enum, default_value = "Q")]
    pub field: FieldName,
    /// poly or matN (for example mat2)
    #[arg(long, default_value = "poly")]
    pub algebra: String,
    /// Matrix size; implies a matrix algebra
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub degree_bound: usize,
    #[arg(long, default_value_t = 32)]
    pub search_bound: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    Poly,
    Mat(usize),
}

#[derive(Clone, Debug)]
pub struct Session {
    pub q_allowed: bool,
    pub algebra: AlgebraKind,
    pub bounds: Bounds,
    pub format: Format,
}

impl Session {
    pub fn from_args(args: &CommonArgs) -> Result<Self, CliError> {
        if args.degree_bound == 0 || args.search_bound == 0 {
            return Err(CliError::Usage("bounds must be positive".into()));
        }
        let algebra = match (args.algebra.as_str(), args.n) {
            (_, Some(0)) => return Err(CliError::Usage("--N must be positive".into())),
            (_, Some(n)) => AlgebraKind::Mat(n),
            ("poly", None) => AlgebraKind::Poly,
            (s, None) => match s.strip_prefix("mat").map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => AlgebraKind::Mat(n),
                _ => {
                    return Err(CliError::Usage(format!(
                        "unknown algebra '{s}' (expected poly or matN)"
                    )))
                }
            },
        };
        Ok(Self {
            q_allowed: args.field == FieldName::Qq,
            algebra,
            bounds: Bounds {
                degree_bound: args.degree_bound,
                search_bound: args.search_bound,
                seed: args.seed,
            },
            format: args.format,
        })
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.bounds.seed)
    }

    pub fn field_name(&self) -> &'static str {
        if self.q_allowed {
            "Q(q)"
        } else {
            "Q"
        }
    }

    pub fn config_json(&self) -> Json {
        let algebra = match self.algebra {
            AlgebraKind::Poly => "poly".to_string(),
            AlgebraKind::Mat(n) => format!("mat{n}"),
        };
        json!({
            "field": self.field_name(),
            "algebra": algebra,
            "degreeBound": self.bounds.degree_bound,
            "searchBound": self.bounds.search_bound,
            "seed": self.bounds.seed.to_string(),
        })
    }

    fn symbols(&self, x: bool) -> Symbols {
        Symbols {
            x,
            q: self.q_allowed,
        }
    }

    pub fn poly(&self, flag: &'static str, src: &str) -> Result<XPoly, CliError> {
        let e = parse_expr(src, self.symbols(true))
            .map_err(|source| CliError::Syntax { flag, source })?;
        eval(&e)
            .and_then(|v| v.into_poly())
            .map_err(|source| CliError::Eval { flag, source })
    }

    pub fn matrix(&self, flag: &'static str, src: &str, n: usize) -> Result<Matrix, CliError> {
        let e = parse_expr(src, self.symbols(false))
            .map_err(|source| CliError::Syntax { flag, source })?;
        let m = eval(&e)
            .and_then(|v| v.into_matrix())
            .map_err(|source| CliError::Eval { flag, source })?;
        if m.shape() != (n, n) {
            return Err(CliError::Usage(format!(
                "--{flag}: expected a {n}x{n} matrix, found {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(m)
    }

    /// `id` or an invertible matrix `U` acting by conjugation.
    pub fn mat_endo(&self, flag: &'static str, src: &str, n: usize) -> Result<MatEndo, CliError> {
        if src.trim() == "id" {
            return Ok(MatEndo::Identity);
        }
        MatEndo::conj(self.matrix(flag, src, n)?)
            .map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
    }
}

/// Flags selecting a twist pair, either from a preset or explicitly.
#[derive(Args, Clone, Debug)]
pub struct PairArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// jackson, translation, matrix-example, commutative-canonical, matrix-pair
    /// or unique-search
    #[arg(long)]
    pub preset: Option<String>,
    /// Image of x (poly) or conjugating matrix / id (matrix)
    #[arg(long)]
    pub sigma: Option<String>,
    /// Image of x (poly) or conjugating matrix / id (matrix)
    #[arg(long)]
    pub tau: Option<String>,
    /// Shift h of the translation preset
    #[arg(long)]
    pub shift: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Jackson,
    Translation,
    MatrixExample,
    CommutativeCanonical,
    MatrixPair,
    UniqueSearch,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "jackson" => Preset::Jackson,
            "translation" => Preset::Translation,
            "matrix-example" => Preset::MatrixExample,
            "commutative-canonical" => Preset::CommutativeCanonical,
            "matrix-pair" => Preset::MatrixPair,
            "unique-search" => Preset::UniqueSearch,
            other => return Err(CliError::Usage(format!("unknown preset '{other}'"))),
        })
    }
}

pub enum AnyPair {
    Poly(TwistPair<PolyAlgebra>),
    Mat(TwistPair<MatAlgebra>),
}

impl PairArgs {
    /// Session adjusted for the preset (field and algebra).
    pub fn session(&self) -> Result<(Session, Option<Preset>), CliError> {
        let mut s = Session::from_args(&self.common)?;
        let preset = self.preset.as_deref().map(Preset::parse).transpose()?;
        match preset {
            Some(Preset::Jackson | Preset::CommutativeCanonical) => {
                s.q_allowed = true;
                s.algebra = AlgebraKind::Poly;
            }
            Some(Preset::Translation) => s.algebra = AlgebraKind::Poly,
            Some(Preset::MatrixPair) => s.algebra = AlgebraKind::Mat(2),
            Some(Preset::MatrixExample | Preset::UniqueSearch) => {
                if s.algebra == AlgebraKind::Poly {
                    s.algebra = AlgebraKind::Mat(2);
                }
            }
            None => {}
        }
        if preset.is_some() && (self.sigma.is_some() || self.tau.is_some()) {
            return Err(CliError::Usage(
                "--preset cannot be combined with --sigma/--tau".into(),
            ));
        }
        Ok((s, preset))
    }

    pub fn shift(&self, s: &Session) -> Result<Scalar, CliError> {
        match &self.shift {
            None => Ok(Scalar::from(twistcalc_core::arith::int(1))),
            Some(src) => {
                let p = s.poly("shift", src)?;
                if !p.is_constant() || p.is_zero() {
                    return Err(CliError::Usage("--shift must be a nonzero constant".into()));
                }
                Ok(p.coeff(0))
            }
        }
    }

    pub fn pair(&self) -> Result<(Session, Option<Preset>, AnyPair), CliError> {
        let (s, preset) = self.session()?;
        let pair = match (preset, s.algebra) {
            (Some(Preset::Jackson | Preset::CommutativeCanonical), _) => {
                AnyPair::Poly(presets::jackson_pair())
            }
            (Some(Preset::Translation), _) => {
                AnyPair::Poly(presets::translation_pair(self.shift(&s)?))
            }
            (Some(Preset::MatrixPair), _) => AnyPair::Mat(presets::matrix_pair()),
            (Some(Preset::MatrixExample | Preset::UniqueSearch), AlgebraKind::Mat(n)) => {
                let ex = matrix_example(&s, n, 1);
                let alg = ex.alg;
                let sigma = alg.conj(ex.us[0].clone()).map_err(kernel)?;
                AnyPair::Mat(presets::mat_pair(alg, sigma, MatEndo::Identity))
            }
            (Some(Preset::MatrixExample | Preset::UniqueSearch), AlgebraKind::Poly) => {
                unreachable!("preset forces a matrix algebra")
            }
            (None, AlgebraKind::Poly) => {
                let sigma = s.poly("sigma", self.sigma.as_deref().unwrap_or("x"))?;
                let tau = s.poly("tau", self.tau.as_deref().unwrap_or("x"))?;
                AnyPair::Poly(
                    TwistPair::new(PolyAlgebra, Subst::new(sigma), Subst::new(tau))
                        .map_err(kernel)?,
                )
            }
            (None, AlgebraKind::Mat(n)) => {
                let alg = MatAlgebra::new(n);
                let sigma = s.mat_endo("sigma", self.sigma.as_deref().unwrap_or("id"), n)?;
                let tau = s.mat_endo("tau", self.tau.as_deref().unwrap_or("id"), n)?;
                AnyPair::Mat(TwistPair::new(alg, sigma, tau).map_err(kernel)?)
            }
        };
        Ok((s, preset, pair))
    }
}

/// The seeded matrix example with `k` commuting diagonal twists.
pub fn matrix_example(s: &Session, n: usize, k: usize) -> MatrixExample {
    MatrixExample::seeded(n, k, &mut s.rng())
}
