//! Case sweep: enumerate splitting types, solve, and attach a verdict to every tuple.

pub mod catalog;
pub mod kb;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bundles::{line_degrees, pullback_target, restrict_to_line, BundleError, BundleExpr};
use crate::chow::chow_equal;
use crate::ring::GeomPoly;
use crate::constraints::{build_system, ConstraintError, ConstraintSystem, SplittingType};
use crate::solver::{dualize_type, solve, transform_solution, Completeness, SolveStats, SolverConfig, SolverError};

pub use catalog::{Family, Instance};
pub use kb::Basis;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("{bundle} restricts to {found}, not a twist of {expected}")]
    TypeMismatch { bundle: String, found: String, expected: String },
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Verdict {
    Matched { bundle: BundleExpr, family: Family },
    ProvenNonexistent { reference: String, basis: Basis, via_dual: bool },
    Unidentified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Matched { bundle, .. } => write!(f, "{bundle}"),
            Verdict::ProvenNonexistent { reference, basis, via_dual } => {
                let basis = match basis {
                    Basis::Stated => "stated",
                    Basis::Inferred => "inferred",
                };
                let dual = if *via_dual { ", via dual" } else { "" };
                write!(f, "nonexistent [{reference}, {basis}{dual}]")
            }
            Verdict::Unidentified => f.write_str("UNIDENTIFIED"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Shortcut {
    /// Some twist gap is at least 2; the bundle is an extension of smaller uniform bundles.
    GapReducible,
    /// Type `(2; 1, r-1)`, homogeneous by Ellia's lemma.
    ElliaRankTwo,
    AllPartsAtMostTwo,
}

impl fmt::Display for Shortcut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shortcut::GapReducible => "reducible by extension",
            Shortcut::ElliaRankTwo => "Ellia (2;1,r-1)",
            Shortcut::AllPartsAtMostTwo => "all parts <= 2",
        })
    }
}

pub fn shortcuts(st: &SplittingType) -> Vec<Shortcut> {
    let mut out = Vec::new();
    if !st.is_consecutive() {
        out.push(Shortcut::GapReducible);
    }
    if st.k() == 2 && st.ranks()[0] == 1 {
        out.push(Shortcut::ElliaRankTwo);
    }
    if st.ranks().iter().all(|&r| r <= 2) {
        out.push(Shortcut::AllPartsAtMostTwo);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DisplayView {
    pub labels: Vec<String>,
    pub tuples: Vec<Vec<i64>>,
}

fn as_string<T: fmt::Display, S: Serializer>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    #[serde(rename = "type", serialize_with = "as_string")]
    pub splitting_type: SplittingType,
    pub unknowns: Vec<String>,
    pub solutions: Vec<Vec<i64>>,
    pub verdicts: Vec<Verdict>,
    pub completeness: Option<Completeness>,
    pub shortcuts: Vec<Shortcut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub display: Option<DisplayView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub stats: Option<SolveStats>,
}

impl CaseReport {
    pub fn unidentified(&self) -> usize {
        self.verdicts.iter().filter(|v| **v == Verdict::Unidentified).count()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyEntry {
    pub bundle: BundleExpr,
    pub family: Family,
    pub cases: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub n: u32,
    pub rank: u32,
    pub cases: Vec<CaseReport>,
    pub families: Vec<FamilyEntry>,
    pub unidentified_count: usize,
}

/// Consecutive types of rank `r` with at least two parts, one per dual pair, ordered by length then ranks.
pub fn enumerate_cases(r: u32) -> Vec<SplittingType> {
    fn compositions(r: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if r == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in 1..=r {
            prefix.push(p);
            compositions(r - p, prefix, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    compositions(r, &mut Vec::new(), &mut all);
    let mut kept: Vec<Vec<u32>> = all
        .into_iter()
        .filter(|c| c.len() >= 2)
        .filter(|c| {
            let rev: Vec<u32> = c.iter().rev().copied().collect();
            *c <= rev
        })
        .collect();
    kept.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    kept.into_iter().map(SplittingType::consecutive).collect()
}

/// Checks that `tuple` solves the system of `st` and that its factor product is the pullback Chern polynomial of `e`.
pub fn verify(e: &BundleExpr, st: &SplittingType, tuple: &[i64], n: u32) -> Result<bool, ClassifyError> {
    let sys = build_system(st, n)?;
    verify_in(&sys, e, tuple)
}

pub fn verify_in(sys: &ConstraintSystem, e: &BundleExpr, tuple: &[i64]) -> Result<bool, ClassifyError> {
    let n = sys.n;
    let st = &sys.splitting_type;
    let found = restrict_to_line(e, n)?;
    if found.normalized() != *st {
        return Err(ClassifyError::TypeMismatch { bundle: e.to_string(), found: found.to_string(), expected: st.to_string() });
    }
    let shift = *found.twists().last().expect("nonempty type");
    let e = e.clone().twist(-shift);
    if !sys.check_solution(tuple)? {
        return Ok(false);
    }
    let product = sys.evaluated_product(tuple)?;
    Ok(chow_equal(&product, &pullback_target(&e, n)?, n))
}

pub fn match_solution(st: &SplittingType, tuple: &[i64], n: u32) -> Result<Verdict, ClassifyError> {
    let sys = build_system(st, n)?;
    Ok(match_in(&sys, tuple))
}

pub fn match_in(sys: &ConstraintSystem, tuple: &[i64]) -> Verdict {
    let Ok(factors) = sys.evaluated_factors(tuple) else { return Verdict::Unidentified };
    for inst in catalog::instances(&sys.splitting_type, sys.n) {
        if !support_fits(sys, &factors, &inst) {
            continue;
        }
        let e = inst.expr();
        if matches!(verify_in(sys, &e, tuple), Ok(true)) {
            return Verdict::Matched { bundle: e, family: inst.family };
        }
    }
    nonexistence_entry(sys, tuple).unwrap_or(Verdict::Unidentified)
}

/// Factors at degrees carried only by line summands must be pure powers of `T`.
fn support_fits(sys: &ConstraintSystem, factors: &[GeomPoly], inst: &Instance) -> bool {
    let atom_degrees = match inst.family {
        Family::Lines => Vec::new(),
        _ => {
            let lines = inst.lines.len();
            let all = line_degrees(&inst.expr(), sys.n).expect("catalog bundles are well ranked");
            let mut rest = all.clone();
            for d in &inst.lines {
                let i = rest.iter().position(|x| x == d).expect("lines are part of the restriction");
                rest.remove(i);
            }
            debug_assert_eq!(rest.len() + lines, all.len());
            rest
        }
    };
    let st = &sys.splitting_type;
    factors.iter().zip(st.ranks().iter().zip(st.twists())).all(|(f, (&r, u))| {
        atom_degrees.contains(u) || *f == GeomPoly::int_monomial(1, r, 0, 0)
    })
}

fn nonexistence_entry(sys: &ConstraintSystem, tuple: &[i64]) -> Option<Verdict> {
    let st = &sys.splitting_type;
    let found = |e: &kb::KbEntry, via_dual| Verdict::ProvenNonexistent {
        reference: e.id.clone(),
        basis: e.basis,
        via_dual,
    };
    if let Some(d) = sys.project(tuple) {
        return kb::lookup(st, sys.n, &d).map(|e| found(e, false));
    }
    let dual = dualize_type(st);
    let dual_sys = build_system(&dual, sys.n).ok()?;
    let image = transform_solution(st, tuple, sys.n).ok()?;
    let d = dual_sys.project(&image)?;
    kb::lookup(&dual, sys.n, &d).map(|e| found(e, true))
}

/// Solves one case and attaches verdicts. Solver failures are recorded, not raised.
pub fn classify_case(st: &SplittingType, n: u32, cfg: &SolverConfig) -> CaseReport {
    let mut report = CaseReport {
        splitting_type: st.clone(),
        unknowns: Vec::new(),
        solutions: Vec::new(),
        verdicts: Vec::new(),
        completeness: None,
        shortcuts: shortcuts(st),
        display: None,
        error: None,
        stats: None,
    };
    if !st.is_consecutive() {
        return report;
    }
    let sys = match build_system(st, n) {
        Ok(s) => s,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.splitting_type = sys.splitting_type.clone();
    report.unknowns = sys.names();
    let set = match solve(&sys, cfg) {
        Ok(s) => s,
        Err(SolverError::SolutionCapExceeded { cap, partial }) => {
            report.error = Some(format!("more than {cap} solutions; verdicts cover the partial set"));
            *partial
        }
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.verdicts = set.tuples.iter().map(|t| revalidated(&sys, t, match_in(&sys, t))).collect();
    report.display = sys.display.as_ref().map(|d| DisplayView {
        labels: d.labels.clone(),
        tuples: set.tuples.iter().map(|t| sys.project(t).expect("display resolved")).collect(),
    });
    report.solutions = set.tuples;
    report.completeness = Some(set.completeness);
    report.stats = Some(set.stats);
    report
}

fn revalidated(sys: &ConstraintSystem, tuple: &[i64], v: Verdict) -> Verdict {
    match &v {
        Verdict::Matched { bundle, .. } if !matches!(verify_in(sys, bundle, tuple), Ok(true)) => Verdict::Unidentified,
        _ => v,
    }
}

pub fn classify(n: u32, r: u32, cfg: &SolverConfig) -> ClassifyReport {
    let cases = enumerate_cases(r);
    let run = |st: &SplittingType| classify_case(st, n, cfg);
    let cases: Vec<CaseReport> = if cfg.parallel { par_map(&cases, run) } else { cases.iter().map(run).collect() };
    let mut families: BTreeMap<(Family, String), FamilyEntry> = BTreeMap::new();
    for c in &cases {
        for v in &c.verdicts {
            if let Verdict::Matched { bundle, family } = v {
                let entry = families.entry((*family, bundle.to_string())).or_insert_with(|| FamilyEntry {
                    bundle: bundle.clone(),
                    family: *family,
                    cases: Vec::new(),
                });
                let name = c.splitting_type.to_string();
                if !entry.cases.contains(&name) {
                    entry.cases.push(name);
                }
            }
        }
    }
    let unidentified_count = cases.iter().map(CaseReport::unidentified).sum();
    ClassifyReport { n, rank: r, cases, families: families.into_values().collect(), unidentified_count }
}

#[cfg(feature = "parallel")]
fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::parse_expr;

    fn st(s: &str) -> SplittingType {
        s.parse().unwrap()
    }

    #[test]
    fn rank_two_has_one_case() {
        assert_eq!(enumerate_cases(2), vec![st("2;1,1;1,0")]);
        let six = enumerate_cases(6);
        for t in ["2;3,3;1,0", "2;2,4;1,0", "3;1,2,3;2,1,0"] {
            assert!(six.contains(&st(t)), "{t}");
        }
        assert!(!six.contains(&st("3;3,2,1;2,1,0")));
    }

    #[test]
    fn verify_pairings_on_three_three() {
        let t = st("2;3,3;1,0");
        let cases: [(&str, Vec<i64>); 3] = [
            ("T(-1) + O(1)^2", vec![-1, 0, 0, 0, 0, 1, 1, 1, 1, 1]),
            ("O(1)^3 + O(0)^3", vec![0; 10]),
            ("wedge(2,T(-1))", vec![-2, 2, 3, 0, -1, 2, 2, 3, 0, 1]),
        ];
        for (b, tuple) in cases {
            let e = parse_expr(b).unwrap();
            assert!(verify(&e, &t, &tuple, 4).unwrap(), "{b}");
            assert!(verify(&e.clone().twist(5), &t, &tuple, 4).unwrap(), "{b} twisted");
        }
        let e = parse_expr("T(-1) + O(1)^2").unwrap();
        assert!(!verify(&e, &t, &[0; 10], 4).unwrap());
        let wrong = parse_expr("O(1)^2 + O(0)^4").unwrap();
        assert!(matches!(verify(&wrong, &t, &[0; 10], 4), Err(ClassifyError::TypeMismatch { .. })));
    }

    #[test]
    fn match_examples() {
        let v = match_solution(&st("2;3,3;1,0"), &[0; 10], 4).unwrap();
        assert_eq!(v, Verdict::Matched { bundle: parse_expr("O(1)^3 + O(0)^3").unwrap(), family: Family::Lines });
        let v = match_solution(&st("3;1,2,3;2,1,0"), &[-2, 0, 0, 0, 2, 4, 4, 8, 8], 4).unwrap();
        assert!(matches!(v, Verdict::ProvenNonexistent { ref reference, basis: Basis::Stated, via_dual: false } if reference == "r6-123-a"));
        let v = match_solution(&st("2;3,3;1,0"), &[7, 0, 0, 0, 0, 1, 1, 1, 1, 1], 4).unwrap();
        assert_eq!(v, Verdict::Unidentified);
    }

    #[test]
    fn rank_two_sweep() {
        let rep = classify(4, 2, &SolverConfig::default());
        assert_eq!(rep.cases.len(), 1);
        assert_eq!(rep.cases[0].solutions, vec![vec![0, 0]]);
        assert_eq!(rep.unidentified_count, 0);
        assert_eq!(rep.families.len(), 1);
        assert_eq!(rep.families[0].bundle.to_string(), "O(1) + O(0)");
    }
}
