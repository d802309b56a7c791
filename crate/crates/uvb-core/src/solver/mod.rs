//! Integer solutions of constraint systems.

mod domain;
mod gb;
mod duality;
mod linear;
mod resultant;
mod roots;
mod search;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::Ordering;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::ConstraintSystem;

pub use duality::{dualize_type, transform_solution};
use search::{Ctx, Mode, State, Stop};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Dfs,
    Elim,
    #[default]
    Hybrid,
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dfs" => Ok(Strategy::Dfs),
            "elim" => Ok(Strategy::Elim),
            "hybrid" => Ok(Strategy::Hybrid),
            _ => Err(format!("unknown strategy '{s}' (expected dfs, elim or hybrid)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Dfs => "dfs",
            Strategy::Elim => "elim",
            Strategy::Hybrid => "hybrid",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub bound: i64,
    pub strategy: Strategy,
    pub max_solutions: usize,
    /// Split the top-level branches over the rayon pool; ignored without the `parallel` feature.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { bound: 200, strategy: Strategy::Hybrid, max_solutions: 10_000, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Completeness {
    BoxBounded { bound: i64 },
    EliminationComplete,
}

impl fmt::Display for Completeness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Completeness::BoxBounded { bound } => write!(f, "complete within [-{bound}, {bound}]"),
            Completeness::EliminationComplete => f.write_str("complete (elimination certificate)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub elapsed_ms: f64,
    pub strategy: Strategy,
    /// Reason the elimination run was abandoned, if it was.
    pub fallback: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionSet {
    pub tuples: Vec<Vec<i64>>,
    pub completeness: Completeness,
    pub stats: SolveStats,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[i64]) -> bool {
        self.tuples.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }
}

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("more than {cap} solutions; {} collected", partial.tuples.len())]
    SolutionCapExceeded { cap: usize, partial: Box<SolutionSet> },
    #[error("elimination blew up: {0}")]
    EliminationDegreeBlowup(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub fn solve(sys: &ConstraintSystem, cfg: &SolverConfig) -> Result<SolutionSet, SolverError> {
    if cfg.bound < 1 {
        return Err(SolverError::InvalidConfig("bound must be at least 1".into()));
    }
    let start = Instant::now();
    let mode = match cfg.strategy {
        Strategy::Dfs => Mode::Dfs,
        Strategy::Hybrid => Mode::Hybrid,
        Strategy::Elim => Mode::Elim,
    };
    let (outcome, mut nodes) = run(sys, mode, cfg);
    let (outcome, completeness, fallback) = match (mode, outcome) {
        (Mode::Elim, Err((Stop::Blowup(msg), _))) => {
            let (o, n) = run(sys, Mode::Hybrid, cfg);
            nodes += n;
            (o, Completeness::BoxBounded { bound: cfg.bound }, Some(msg))
        }
        (Mode::Elim, o) => (o, Completeness::EliminationComplete, None),
        (_, o) => (o, Completeness::BoxBounded { bound: cfg.bound }, None),
    };
    let stats = SolveStats { nodes, elapsed_ms: start.elapsed().as_secs_f64() * 1e3, strategy: cfg.strategy, fallback };
    match outcome {
        Ok(tuples) => Ok(SolutionSet { tuples, completeness, stats }),
        Err((Stop::Cap, partial)) => Err(SolverError::SolutionCapExceeded {
            cap: cfg.max_solutions,
            partial: Box::new(SolutionSet { tuples: partial, completeness, stats }),
        }),
        Err((Stop::Blowup(msg), _)) => Err(SolverError::EliminationDegreeBlowup(msg)),
    }
}

type Outcome = Result<Vec<Vec<i64>>, (Stop, Vec<Vec<i64>>)>;

fn run(sys: &ConstraintSystem, mode: Mode, cfg: &SolverConfig) -> (Outcome, u64) {
    let ctx = Ctx::new(sys, mode, cfg.bound, cfg.max_solutions);
    let out = run_ctx(&ctx, cfg.parallel);
    (out, ctx.nodes.load(Ordering::Relaxed))
}

fn finish(mut all: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    all.sort();
    all.dedup();
    all
}

fn run_ctx(ctx: &Ctx, parallel: bool) -> Outcome {
    ctx.nodes.fetch_add(1, Ordering::Relaxed);
    let root = match search::propagate(ctx, State::root(ctx)) {
        Ok(Some(s)) => s,
        Ok(None) => return Ok(Vec::new()),
        Err(e) => return Err((e, Vec::new())),
    };
    let (x, values) = if root.is_leaf() {
        let mut out = Vec::new();
        return match search::search(ctx, root, &mut out) {
            Ok(()) => Ok(finish(out)),
            Err(e) => Err((e, finish(out))),
        };
    } else {
        match search::choose(ctx, &root) {
            Ok(b) => b,
            Err(e) => return Err((e, Vec::new())),
        }
    };
    let branch = |v: &i64| {
        let mut child = root.clone();
        child.assign(x, *v);
        let mut out = Vec::new();
        let r = search::search(ctx, child, &mut out);
        (r, out)
    };
    let results: Vec<(Result<(), Stop>, Vec<Vec<i64>>)> = if parallel {
        par_map(&values, branch)
    } else {
        values.iter().map(branch).collect()
    };
    let mut all = Vec::new();
    let mut stop = None;
    for (r, out) in results {
        all.extend(out);
        if let Err(e) = r {
            // a blowup outranks the cap
            if stop.is_none() || matches!(e, Stop::Blowup(_)) {
                stop = Some(e);
            }
        }
    }
    match stop {
        None => Ok(finish(all)),
        Some(e) => Err((e, finish(all))),
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(values: &[i64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&i64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    values.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(values: &[i64], f: F) -> Vec<T>
where
    F: Fn(&i64) -> T,
{
    values.iter().map(f).collect()
}
