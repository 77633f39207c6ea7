//! `twistcalc`: exact computations with twisted derivations and the
//! cohomology and geometry built on them.

pub mod commands;
pub mod expr;
pub mod session;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value as Json};

use commands::{BracketArgs, CohomCmd, DerivCmd, GeomArgs, GeomCmd, HlsArgs, Outcome, Report};
use session::{CliError, CommonArgs, Format, Session};

pub const SCHEMA_VERSION: u64 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "twistcalc",
    version,
    about = "Exact (sigma,tau)-derivation and twisted cohomology calculator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Twisted derivations
    #[command(subcommand)]
    Deriv(DerivCmd),
    /// Canonical generator of twisted derivations on K[x]
    Hls(HlsArgs),
    /// Twisted Hochschild cohomology
    #[command(subcommand)]
    Cohom(CohomCmd),
    /// Connections and curvature on Sigma-modules
    #[command(subcommand)]
    Geom(GeomCmd),
    /// Run the acceptance suite
    Selftest(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Deriv(DerivCmd::Apply { .. }) => "deriv apply",
            Command::Deriv(DerivCmd::Check(_)) => "deriv check",
            Command::Deriv(DerivCmd::Classify(_)) => "deriv classify",
            Command::Deriv(DerivCmd::Decompose(_)) => "deriv decompose",
            Command::Hls(_) => "hls",
            Command::Cohom(CohomCmd::H0(_)) => "cohom h0",
            Command::Cohom(CohomCmd::H1(_)) => "cohom h1",
            Command::Cohom(CohomCmd::Matrix { .. }) => "cohom matrix",
            Command::Geom(GeomCmd::ConnectionCheck(_)) => "geom connection-check",
            Command::Geom(GeomCmd::Curvature(_)) => "geom curvature",
            Command::Geom(GeomCmd::UniqueConnection(_)) => "geom unique-connection",
            Command::Geom(GeomCmd::Bracket(_)) => "geom bracket",
            Command::Selftest(_) => "selftest",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Deriv(DerivCmd::Apply { args, .. })
            | Command::Deriv(DerivCmd::Check(args))
            | Command::Deriv(DerivCmd::Decompose(args)) => &args.pair.common,
            Command::Deriv(DerivCmd::Classify(p)) => &p.common,
            Command::Hls(h) => &h.deriv.pair.common,
            Command::Cohom(
                CohomCmd::H0(a) | CohomCmd::H1(a) | CohomCmd::Matrix { args: a, .. },
            ) => &a.pair.common,
            Command::Geom(
                GeomCmd::ConnectionCheck(GeomArgs { pair, .. })
                | GeomCmd::Curvature(GeomArgs { pair, .. })
                | GeomCmd::UniqueConnection(GeomArgs { pair, .. })
                | GeomCmd::Bracket(BracketArgs { pair, .. }),
            ) => &pair.common,
            Command::Selftest(c) => c,
        }
    }

    fn execute(&self) -> Result<Report, CliError> {
        match self {
            Command::Deriv(c) => commands::deriv(c),
            Command::Hls(a) => commands::hls(a),
            Command::Cohom(c) => commands::cohom(c),
            Command::Geom(c) => commands::geom(c),
            Command::Selftest(c) => commands::selftest(Session::from_args(c)?),
        }
    }
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let name = cli.command.name();
    let format = cli.command.common().format;
    match cli.command.execute() {
        Ok(report) => {
            let code = match report.outcome {
                Outcome::Success => EXIT_OK,
                Outcome::Negative => EXIT_NEGATIVE,
            };
            Output {
                code,
                stdout: render(name, &report),
                stderr: String::new(),
            }
        }
        Err(e) => {
            let stderr = format!("error: {e}\n");
            let stdout = if format == Format::Json {
                let (line, column) = e
                    .position()
                    .map_or((Json::Null, Json::Null), |(l, c)| (json!(l), json!(c)));
                let v = json!({
                    "schemaVersion": SCHEMA_VERSION,
                    "command": name,
                    "status": "error",
                    "error": { "message": e.to_string(), "line": line, "column": column },
                });
                pretty(&v)
            } else {
                String::new()
            };
            Output {
                code: EXIT_USAGE,
                stdout,
                stderr,
            }
        }
    }
}

fn pretty(v: &Json) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn render(name: &str, report: &Report) -> String {
    let status = match report.outcome {
        Outcome::Success => "ok",
        Outcome::Negative => "negative",
    };
    match report.session.format {
        Format::Json => {
            let mut top = Map::new();
            top.insert("schemaVersion".into(), json!(SCHEMA_VERSION));
            top.insert("command".into(), json!(name));
            top.insert("status".into(), json!(status));
            top.insert("config".into(), report.session.config_json());
            for (k, v) in &report.body {
                top.insert(k.clone(), v.clone());
            }
            pretty(&Json::Object(top))
        }
        Format::Text => {
            let mut out = format!("{name}: {status}\n");
            for (k, v) in &report.body {
                text_line(&mut out, k, v, 0);
            }
            out
        }
    }
}

fn text_line(out: &mut String, key: &str, v: &Json, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Json::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, v) in m {
                text_line(out, k, v, indent + 1);
            }
        }
        Json::Array(items) if items.iter().any(|i| i.is_object()) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (i, item) in items.iter().enumerate() {
                text_line(out, &format!("[{i}]"), item, indent + 1);
            }
        }
        Json::String(s) => out.push_str(&format!("{pad}{key}: {s}\n")),
        other => out.push_str(&format!("{pad}{key}: {other}\n")),
    }
}
