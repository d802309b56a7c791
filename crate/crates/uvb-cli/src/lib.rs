//! Command-line front end: argument grammar, configuration and report rendering.
//!
//! [`dispatch`] is the whole program; `main` only forwards `std::env::args`.
//! Exit codes: 0 success, 1 domain failure, 2 usage error.

mod config;
mod render;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use uvb_core::bundles::{chern_total, parse_expr, restrict_to_line, BundleExpr};
use uvb_core::chow::normal_form;
use uvb_core::classify::{classify, enumerate_cases, shortcuts, verify, Shortcut};
use uvb_core::constraints::{build_system, SplittingType};
use uvb_core::registry;
use uvb_core::ring::parse_geom;
use uvb_core::solver::{solve, SolverConfig, SolverError, Strategy};

pub use config::FileConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "uvb", version, about = "Chern-polynomial constraints for uniform vector bundles on projective space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the constraint system of one splitting type.
    Solve {
        #[command(flatten)]
        case: CaseArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve and match every splitting type of a given rank.
    Classify {
        /// Dimension of the projective space.
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=12))]
        rank: u32,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Chern classes and line restriction of a bundle expression.
    Chern {
        /// Dimension of the projective space [default: 4].
        #[arg(long)]
        n: Option<u32>,
        /// Expression such as `wedge(2,T(-1)) + O(0)`.
        #[arg(long, value_parser = parse_bundle)]
        bundle: BundleExpr,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check a solution tuple against a bundle. Exits 1 if the check fails.
    Verify {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_parser = parse_bundle)]
        bundle: BundleExpr,
        /// Comma-separated values in the order printed by `solve`.
        #[arg(long, value_parser = parse_tuple, allow_hyphen_values = true)]
        tuple: Ints,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Normal form of a polynomial in T, U, V.
    Reduce {
        /// Dimension of the projective space [default: 4].
        #[arg(long)]
        n: Option<u32>,
        /// Polynomial such as `T^2+(U-V)T-UV`.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List the splitting types examined for a rank.
    Cases {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=16))]
        rank: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct CaseArgs {
    /// Dimension of the projective space.
    #[arg(long, default_value_t = 4)]
    n: u32,
    /// Splitting type `k;r1,..,rk;u1,..,uk`.
    #[arg(long = "type", value_parser = parse_type)]
    splitting_type: SplittingType,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Search box half-width [default: 200].
    #[arg(long)]
    bound: Option<i64>,
    /// dfs, elim or hybrid [default: hybrid].
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    /// Abort past this many solutions [default: 10000].
    #[arg(long)]
    max_solutions: Option<usize>,
    /// Run on the current thread only.
    #[arg(long)]
    sequential: bool,
    /// TOML file presetting solver options; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
    Text,
}

/// Alias so clap takes `--tuple` as one comma-separated value.
type Ints = Vec<i64>;

fn parse_type(s: &str) -> Result<SplittingType, String> {
    s.parse().map_err(|e: uvb_core::constraints::ConstraintError| e.to_string())
}

fn parse_bundle(s: &str) -> Result<BundleExpr, String> {
    parse_expr(s).map_err(|e| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

fn parse_tuple(s: &str) -> Result<Ints, String> {
    s.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad integer {x:?}"))).collect()
}

/// Result of a subcommand: rendered body plus exit code.
struct Outcome {
    body: String,
    code: i32,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl SolverArgs {
    fn resolve(&self) -> Result<SolverConfig, Failure> {
        let mut cfg = SolverConfig::default();
        if let Some(path) = &self.config {
            let file = FileConfig::load(path).map_err(Failure::Usage)?;
            file.apply(&mut cfg);
        }
        if let Some(b) = self.bound {
            cfg.bound = b;
        }
        if let Some(s) = self.strategy {
            cfg.strategy = s;
        }
        if let Some(m) = self.max_solutions {
            cfg.max_solutions = m;
        }
        if self.sequential {
            cfg.parallel = false;
        }
        if cfg.bound < 1 {
            return Err(Failure::Usage("--bound must be at least 1".into()));
        }
        Ok(cfg)
    }
}

fn check_n(n: u32) -> Result<u32, Failure> {
    if (1..=12).contains(&n) {
        Ok(n)
    } else {
        Err(Failure::Usage(format!("--n must be between 1 and 12, got {n}")))
    }
}

/// JSON body with run statistics kept under their own key.
#[derive(Serialize)]
struct WithStats<'a, T: Serialize, S: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    stats: S,
}

fn json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let target = match &cli.command {
        Command::Solve { out, .. }
        | Command::Classify { out, .. }
        | Command::Chern { out, .. }
        | Command::Verify { out, .. }
        | Command::Reduce { out, .. }
        | Command::Cases { out, .. } => out.output.clone(),
    };
    match run(cli.command) {
        Ok(o) => {
            let written = match &target {
                Some(p) => fs::write(p, &o.body).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => out.write_all(o.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => o.code,
                Err(m) => {
                    let _ = writeln!(err, "error: {m}");
                    EXIT_DOMAIN
                }
            }
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}\n\nUsage: uvb <solve|classify|chern|verify|reduce|cases> [OPTIONS]");
            EXIT_USAGE
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_DOMAIN
        }
    }
}

fn run(cmd: Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Solve { case, solver, out } => run_solve(case, &solver, out.format),
        Command::Classify { n, rank, solver, out } => {
            let n = check_n(n)?;
            let cfg = solver.resolve()?;
            let report = classify(n, rank, &cfg);
            let code = if report.unidentified_count > 0 { EXIT_DOMAIN } else { EXIT_OK };
            let body = match out.format {
                Format::Json => {
                    let stats: std::collections::BTreeMap<String, _> = report
                        .cases
                        .iter()
                        .filter_map(|c| c.stats.clone().map(|s| (c.splitting_type.to_string(), s)))
                        .collect();
                    json(&WithStats { body: &report, stats })
                }
                Format::Md => render::classify_md(&report),
                Format::Text => render::classify_text(&report),
            };
            Ok(Outcome { body, code })
        }
        Command::Chern { n, bundle, out } => {
            let n = check_n(n.unwrap_or(4))?;
            let c = chern_total(&bundle, n).map_err(|e| Failure::Domain(e.to_string()))?;
            let st = restrict_to_line(&bundle, n).map_err(|e| Failure::Domain(e.to_string()))?;
            let report = render::ChernReport {
                bundle: bundle.to_string(),
                n,
                rank: c.rank,
                chern: c.to_i64(),
                line_type: st.to_string(),
            };
            let body = match out.format {
                Format::Json => json(&report),
                Format::Md => render::chern_md(&report),
                Format::Text => render::chern_text(&report),
            };
            Ok(Outcome { body, code: EXIT_OK })
        }
        Command::Verify { case, bundle, tuple, out } => {
            let n = check_n(case.n)?;
            let sys = build_system(&case.splitting_type, n).map_err(|e| Failure::Domain(e.to_string()))?;
            if tuple.len() != sys.unknowns.len() {
                return Err(Failure::Domain(format!(
                    "--tuple has {} values; {} needs {} ({})",
                    tuple.len(),
                    sys.splitting_type,
                    sys.unknowns.len(),
                    sys.names().join(",")
                )));
            }
            let ok = verify(&bundle, &sys.splitting_type, &tuple, n).map_err(|e| Failure::Domain(e.to_string()))?;
            let report = render::VerifyReport {
                splitting_type: sys.splitting_type.to_string(),
                bundle: bundle.to_string(),
                tuple,
                verified: ok,
            };
            let body = match out.format {
                Format::Json => json(&report),
                Format::Md | Format::Text => render::verify_text(&report),
            };
            Ok(Outcome { body, code: if ok { EXIT_OK } else { EXIT_DOMAIN } })
        }
        Command::Reduce { n, poly, out } => {
            let n = check_n(n.unwrap_or(4))?;
            let p = parse_geom(&poly).map_err(|e| Failure::Usage(format!("--poly: {e}")))?;
            let nf = normal_form(&p, n);
            let report = render::ReduceReport { input: poly, n, normal_form: nf.value().to_string() };
            let body = match out.format {
                Format::Json => json(&report),
                Format::Md | Format::Text => format!("{}\n", report.normal_form),
            };
            Ok(Outcome { body, code: EXIT_OK })
        }
        Command::Cases { rank, out } => {
            let rows: Vec<render::CaseRow> = enumerate_cases(rank)
                .into_iter()
                .map(|st| {
                    let sc: Vec<Shortcut> = shortcuts(&st);
                    render::CaseRow { tabulated: registry::lookup(&st).is_some(), splitting_type: st.to_string(), shortcuts: sc }
                })
                .collect();
            let body = match out.format {
                Format::Json => json(&rows),
                Format::Md => render::cases_md(&rows),
                Format::Text => render::cases_text(&rows),
            };
            Ok(Outcome { body, code: EXIT_OK })
        }
    }
}

fn run_solve(case: CaseArgs, solver: &SolverArgs, format: Format) -> Result<Outcome, Failure> {
    let n = check_n(case.n)?;
    let cfg = solver.resolve()?;
    let sys = build_system(&case.splitting_type, n).map_err(|e| Failure::Domain(e.to_string()))?;
    let set = match solve(&sys, &cfg) {
        Ok(s) => s,
        Err(SolverError::SolutionCapExceeded { cap, .. }) => {
            return Err(Failure::Domain(format!("more than {cap} solutions; raise --max-solutions")))
        }
        Err(e) => return Err(Failure::Domain(e.to_string())),
    };
    let report = render::SolveReport::new(&sys, &set);
    let body = match format {
        Format::Json => json(&WithStats { body: &report, stats: &set.stats }),
        Format::Md => render::solve_md(&report),
        Format::Text => render::solve_text(&report),
    };
    Ok(Outcome { body, code: EXIT_OK })
}
