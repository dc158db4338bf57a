//! Command line front end: argument parsing, session handling and JSON
//! rendering of every engine operation.

pub mod parse;
pub mod session;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use session::{Session, SCHEMA_VERSION};
use std::path::{Path, PathBuf};
use thiserror::Error;
use zariski::closed::{AlgebraicSet, DimValue};
use zariski::config::Config;
use zariski::oracle::{run_suite, Suite};
use zariski::realize::realize;
use zariski::sets::{certify_round, make_round, split_trim, DescribedSet, RoundVerdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(parse::ParseError),
    #[error(transparent)]
    Domain(#[from] zariski::Error),
    #[error("session: {0}")]
    Session(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(e) if !e.is_semantic() => EXIT_PARSE,
            _ => EXIT_DOMAIN,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(e) if !e.is_semantic() => "parse",
            CliError::Parse(_) | CliError::Domain(_) => "domain",
            CliError::Session(_) => "session",
            CliError::Io(_) => "io",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "zk", version, about = "Zariski closures, round sets and realizations on abelian groups")]
pub struct Cli {
    /// Session file holding named groups, sets, generators and config.
    #[arg(long, global = true, env = "ZK_SESSION")]
    pub session: Option<PathBuf>,
    /// Ambient group: a session name or a group expression.
    #[arg(long, short, global = true)]
    pub group: Option<String>,
    /// Largest coset transversal enumerated when splitting into components.
    #[arg(long, global = true)]
    pub max_transversal: Option<usize>,
    /// Prefix length used to certify round generators.
    #[arg(long, global = true)]
    pub prefix_len: Option<usize>,
    /// Largest fibre accepted when certifying user sequences.
    #[arg(long, global = true)]
    pub count_bound: Option<usize>,
    /// Compact single-line JSON.
    #[arg(long, global = true)]
    pub compact: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Essential order of a group.
    Eo { group: Option<String> },
    /// Exponent of a group (0 if unbounded).
    Exponent { group: Option<String> },
    /// The torsion subgroup G[n] and its irreducibility.
    Torsion { n: u64, group: Option<String> },
    /// Zariski closure with its isolated points and pieces.
    Closure { set: String },
    /// Irreducible components of the closure with the part of X in each.
    Components { set: String },
    /// Connected components of the closure.
    Connected { set: String },
    /// Zariski dimension of X: -1 if empty, an integer or "inf".
    Dim { set: String },
    /// The invariants M(X) and m(X).
    Mval { set: String },
    /// Whether X is Zariski dense.
    Dense { set: String },
    /// Whether X is dense in some precompact group topology.
    Potdense { set: String },
    /// Whether X is an unbounded curve.
    Curve { set: String },
    /// Whether the closure of X is irreducible.
    Irreducible { set: String },
    /// Construct or certify round generators.
    #[command(subcommand)]
    Round(RoundCommand),
    /// Split a round generator into two halves with finite translate overlaps.
    Trim {
        generator: String,
        #[arg(long, default_value_t = 64)]
        len: usize,
    },
    /// Realize the closure of X in a precompact topology given by characters.
    Realize(RealizeArgs),
    /// Brute-force cross-checks on finite truncations.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Name a group, set or generator in the session.
    #[command(subcommand)]
    Def(DefCommand),
    /// Inspect or edit the session.
    #[command(subcommand)]
    Session(SessionCommand),
}

#[derive(Debug, Subcommand)]
pub enum RoundCommand {
    /// Standard round generator of order n.
    Make {
        n: u64,
        #[arg(long)]
        prefix: Option<usize>,
    },
    /// Certify a generator on a prefix.
    Check {
        generator: String,
        #[arg(long)]
        prefix: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    pub set: String,
    /// Number of density characters K.
    #[arg(long)]
    pub chars: Option<usize>,
    /// Prefix length L.
    #[arg(long)]
    pub prefix: Option<usize>,
    /// Density tolerance.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Seed for the character values; overrides ZK_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Indices instantiated per infinite multiplicity.
    #[arg(long)]
    pub truncation: Option<u64>,
    /// Write the density-row images of the sampled points of X.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Run one suite: coset, decomp, round, chain or laws.
    Run {
        #[arg(long)]
        suite: String,
        /// Largest finite group order enumerated.
        #[arg(long)]
        cap: Option<u64>,
        /// Seed for random cases; overrides ZK_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write a JUnit report.
        #[arg(long)]
        junit: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DefCommand {
    Group {
        name: String,
        expr: String,
        /// Make it the current group.
        #[arg(long)]
        current: bool,
    },
    Set { name: String, expr: String },
    Gen { name: String, expr: String },
}

#[derive(Debug, Subcommand)]
pub enum SessionCommand {
    /// Print the session contents.
    Show,
    /// Set one config field, e.g. `eps 0.01`.
    Config { key: String, value: String },
    /// Select the current group.
    Use { group: String },
}

/// Result of one command: the JSON document and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub output: Value,
    pub exit: i32,
}

fn envelope(command: &str, cfg: &Config, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": cfg,
        "result": result,
    })
}

pub fn error_document(e: &CliError) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "kind": e.kind(), "message": e.to_string(), "exit": e.exit_code() },
    })
}

/// Session config, then `ZK_SEED`.
fn base_config(session: &Session) -> Result<Config, CliError> {
    let mut cfg = session.config.clone();
    if let Ok(s) = std::env::var("ZK_SEED") {
        cfg.seed = s
            .trim()
            .parse()
            .map_err(|_| CliError::Session(format!("ZK_SEED must be an unsigned integer, got '{s}'")))?;
    }
    Ok(cfg)
}

fn closure_text(c: &AlgebraicSet) -> Result<String, CliError> {
    Ok(if c.set_eq(&AlgebraicSet::whole(c.group().clone()))? {
        "G".to_string()
    } else {
        c.to_string()
    })
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn session_path(cli: &Cli) -> Result<&Path, CliError> {
    cli.session
        .as_deref()
        .ok_or_else(|| CliError::Session("this command needs --session or ZK_SESSION".into()))
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let mut session = match &cli.session {
        Some(p) => Session::load(p)?,
        None => Session::default(),
    };
    let mut cfg = base_config(&session)?;
    if let Some(cap) = cli.max_transversal {
        cfg.max_transversal = cap;
    }
    if let Some(len) = cli.prefix_len {
        cfg.prefix_len = len;
    }
    if let Some(bound) = cli.count_bound {
        cfg.count_bound = bound;
    }
    cfg.validate()?;
    let g = cli.group.as_deref();
    let set = |text: &str, cfg: &Config| -> Result<DescribedSet, CliError> { session.set(text, g, cfg) };
    let group_arg = |explicit: &Option<String>| session.ambient(explicit.as_deref().or(g)).map(|(_, gr)| gr);
    let mut exit = EXIT_OK;

    let (name, result) = match &cli.command {
        Command::Eo { group } => {
            let gr = group_arg(group)?;
            ("eo", json!({ "group": gr.to_string(), "eo": gr.essential_order() }))
        }
        Command::Exponent { group } => {
            let gr = group_arg(group)?;
            ("exponent", json!({ "group": gr.to_string(), "exponent": gr.exponent() }))
        }
        Command::Torsion { n, group } => {
            let gr = group_arg(group)?;
            let canonical = gr.canonical_torsion_order(*n);
            let irr = gr.is_irreducible_torsion(canonical)?;
            (
                "torsion",
                json!({
                    "group": gr.to_string(),
                    "n": n,
                    "canonical_order": canonical,
                    "torsion": gr.torsion_subgroup(*n).to_string(),
                    "irreducible": irr,
                }),
            )
        }
        Command::Closure { set: s } => {
            let x = set(s, &cfg)?;
            let (closed, cert) = x.closure_with(&cfg)?;
            (
                "closure",
                json!({
                    "set": x.to_string(),
                    "closed": closure_text(&closed)?,
                    "components": closed.irreducible_components_capped(cfg.max_transversal)?.len(),
                    "isolated": strings(&cert.isolated),
                    "certificate": cert,
                }),
            )
        }
        Command::Components { set: s } => {
            let x = set(s, &cfg)?;
            let comps: Vec<Value> = x
                .components()?
                .iter()
                .map(|c| {
                    json!({
                        "closure": c.closure.to_string(),
                        "trace": c.trace.to_string(),
                        "finite_traces": c.finite_traces,
                    })
                })
                .collect();
            ("components", json!({ "set": x.to_string(), "components": comps }))
        }
        Command::Connected { set: s } => {
            let x = set(s, &cfg)?;
            let (closed, _) = x.closure_with(&cfg)?;
            let comps = closed.connected_components()?;
            (
                "connected",
                json!({
                    "set": x.to_string(),
                    "connected": comps.len() <= 1,
                    "components": strings(&comps),
                }),
            )
        }
        Command::Dim { set: s } => {
            let x = set(s, &cfg)?;
            let dim = match x.dim()? {
                DimValue::Empty => json!(-1),
                DimValue::Finite(k) => json!(k),
                DimValue::Infinite => json!("inf"),
            };
            ("dim", json!({ "set": x.to_string(), "dim": dim }))
        }
        Command::Mval { set: s } => {
            let x = set(s, &cfg)?;
            let big = x.big_m();
            (
                "mval",
                json!({ "set": x.to_string(), "m": x.little_m(), "M_generators": big.generators }),
            )
        }
        Command::Dense { set: s } => {
            let x = set(s, &cfg)?;
            let d = x.density()?;
            ("dense", json!({ "set": x.to_string(), "dense": d.dense, "verdict": d }))
        }
        Command::Potdense { set: s } => {
            let x = set(s, &cfg)?;
            let d = x.density()?;
            (
                "potdense",
                json!({ "set": x.to_string(), "potentially_dense": d.potentially_dense, "verdict": d }),
            )
        }
        Command::Curve { set: s } => {
            let x = set(s, &cfg)?;
            let r = match x.is_curve() {
                Ok(c) => json!({ "set": x.to_string(), "curve": c, "m": x.little_m() }),
                Err(zariski::Error::FiniteSet) => {
                    json!({ "set": x.to_string(), "curve": false, "reason": "finite set" })
                }
                Err(e) => return Err(e.into()),
            };
            ("curve", r)
        }
        Command::Irreducible { set: s } => {
            let x = set(s, &cfg)?;
            let (closed, _) = x.closure_with(&cfg)?;
            let comps = closed.irreducible_components_capped(cfg.max_transversal)?;
            (
                "irreducible",
                json!({
                    "set": x.to_string(),
                    "irreducible": comps.len() == 1,
                    "closure_components": strings(&comps),
                }),
            )
        }
        Command::Round(RoundCommand::Make { n, prefix }) => {
            if let Some(p) = prefix {
                cfg.prefix_len = *p;
            }
            let (_, gr) = session.ambient(g)?;
            let gen = make_round(&gr, *n)?;
            let verdict = certify_round(&gen, &cfg)?;
            if matches!(verdict, RoundVerdict::Refuted(_)) {
                exit = EXIT_VERIFY;
            }
            let head = strings(&gen.prefix(8)?);
            (
                "round make",
                json!({ "generator": gen.to_string(), "order": gen.order(), "first": head, "verdict": verdict }),
            )
        }
        Command::Round(RoundCommand::Check { generator, prefix }) => {
            if let Some(p) = prefix {
                cfg.prefix_len = *p;
            }
            let gen = session.generator(generator, g)?;
            let verdict = certify_round(&gen, &cfg)?;
            if matches!(verdict, RoundVerdict::Refuted(_)) {
                exit = EXIT_VERIFY;
            }
            ("round check", json!({ "generator": gen.to_string(), "verdict": verdict }))
        }
        Command::Trim { generator, len } => {
            let gen = session.generator(generator, g)?;
            let (y0, y1, cert) = split_trim(&gen, *len)?;
            (
                "trim",
                json!({
                    "generator": gen.to_string(),
                    "halves": [y0.to_string(), y1.to_string()],
                    "first": [strings(&y0.prefix(4)?), strings(&y1.prefix(4)?)],
                    "certificate": cert,
                }),
            )
        }
        Command::Realize(a) => {
            if let Some(v) = a.chars {
                cfg.chars = v;
            }
            if let Some(v) = a.prefix {
                cfg.realize_prefix = v;
            }
            if let Some(v) = a.eps {
                cfg.eps = v;
            }
            if let Some(v) = a.seed {
                cfg.seed = v;
            }
            if let Some(v) = a.truncation {
                cfg.truncation = v;
            }
            cfg.validate()?;
            let x = set(&a.set, &cfg)?;
            let r = realize(&x, &cfg)?;
            if let Some(path) = &a.csv {
                std::fs::write(path, r.characters.image_csv(&r.skeleton))?;
            }
            if !r.verdict.pass {
                exit = EXIT_VERIFY;
            }
            ("realize", json!({ "set": x.to_string(), "verdict": r.verdict }))
        }
        Command::Oracle(OracleCommand::Run { suite, cap, seed, junit }) => {
            let suite: Suite = suite.parse()?;
            if let Some(c) = cap {
                cfg.pair_cap = *c;
                cfg.single_cap = *c;
            }
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            cfg.validate()?;
            let report = run_suite(suite, &cfg)?;
            eprintln!(
                "oracle {:?}: {} checks, {} mismatches, {} ms",
                report.suite, report.checks, report.mismatches, report.elapsed_ms
            );
            if let Some(path) = junit {
                std::fs::write(path, report.to_junit())?;
            }
            if !report.pass {
                exit = EXIT_VERIFY;
            }
            ("oracle run", json!(report))
        }
        Command::Def(d) => {
            let path = session_path(cli)?;
            let (kind, name, canonical) = match d {
                DefCommand::Group { name, expr, current } => ("group", name, session.define_group(name, expr, *current)?),
                DefCommand::Set { name, expr } => ("set", name, session.define_set(name, expr, g)?),
                DefCommand::Gen { name, expr } => ("generator", name, session.define_generator(name, expr, g)?),
            };
            session.save(path)?;
            ("def", json!({ "kind": kind, "name": name, "value": canonical }))
        }
        Command::Session(SessionCommand::Show) => ("session show", json!(session)),
        Command::Session(SessionCommand::Config { key, value }) => {
            let path = session_path(cli)?;
            let mut doc = serde_json::to_value(&session.config).expect("config serializes");
            let slot = doc
                .get_mut(key.as_str())
                .ok_or_else(|| CliError::Session(format!("unknown config key '{key}'")))?;
            *slot = serde_json::from_str(value).map_err(|_| CliError::Session(format!("bad value '{value}'")))?;
            let updated: Config = serde_json::from_value(doc).map_err(|e| CliError::Session(e.to_string()))?;
            updated.validate()?;
            session.config = updated;
            cfg = base_config(&session)?;
            session.save(path)?;
            ("session config", json!({ "key": key, "value": value }))
        }
        Command::Session(SessionCommand::Use { group }) => {
            let path = session_path(cli)?;
            if !session.groups.contains_key(group) {
                return Err(CliError::Session(format!("no group named '{group}'")));
            }
            session.current_group = Some(group.clone());
            session.save(path)?;
            ("session use", json!({ "current_group": group }))
        }
    };
    Ok(Outcome {
        output: envelope(name, &cfg, result),
        exit,
    })
}

/// Parses arguments, runs the command and prints the JSON result. Returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let render = |v: &Value| {
        if cli.compact {
            v.to_string()
        } else {
            serde_json::to_string_pretty(v).expect("json renders")
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            println!("{}", render(&out.output));
            out.exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", render(&error_document(&e)));
            e.exit_code()
        }
    }
}
