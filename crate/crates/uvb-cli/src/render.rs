use std::fmt::Write;

use serde::Serialize;

use uvb_core::classify::{CaseReport, ClassifyReport, DisplayView, Shortcut};
use uvb_core::constraints::ConstraintSystem;
use uvb_core::solver::{Completeness, SolutionSet};

#[derive(Debug, Serialize)]
pub struct SolveReport {
    #[serde(rename = "type")]
    pub splitting_type: String,
    pub n: u32,
    pub unknowns: Vec<String>,
    pub solutions: Vec<Vec<i64>>,
    pub completeness: Completeness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub display: Option<DisplayView>,
}

impl SolveReport {
    pub fn new(sys: &ConstraintSystem, set: &SolutionSet) -> SolveReport {
        SolveReport {
            splitting_type: sys.splitting_type.to_string(),
            n: sys.n,
            unknowns: sys.names(),
            solutions: set.tuples.clone(),
            completeness: set.completeness.clone(),
            display: sys.display.as_ref().map(|d| DisplayView {
                labels: d.labels.clone(),
                tuples: set.tuples.iter().map(|t| sys.project(t).expect("display resolved")).collect(),
            }),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ChernReport {
    pub bundle: String,
    pub n: u32,
    pub rank: u32,
    pub chern: Vec<i64>,
    pub line_type: String,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    #[serde(rename = "type")]
    pub splitting_type: String,
    pub bundle: String,
    pub tuple: Vec<i64>,
    pub verified: bool,
}

#[derive(Debug, Serialize)]
pub struct ReduceReport {
    pub input: String,
    pub n: u32,
    pub normal_form: String,
}

#[derive(Debug, Serialize)]
pub struct CaseRow {
    #[serde(rename = "type")]
    pub splitting_type: String,
    pub shortcuts: Vec<Shortcut>,
    pub tabulated: bool,
}

fn tuple(t: &[i64]) -> String {
    let parts: Vec<String> = t.iter().map(i64::to_string).collect();
    format!("({})", parts.join(", "))
}

fn md_table(out: &mut String, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) {
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
}

fn nums(t: &[i64]) -> Vec<String> {
    t.iter().map(i64::to_string).collect()
}

/// Table columns: display labels when the case is tabulated, every unknown otherwise.
fn columns<'a>(unknowns: &'a [String], solutions: &'a [Vec<i64>], display: Option<&'a DisplayView>) -> (&'a [String], &'a [Vec<i64>]) {
    match display {
        Some(d) => (&d.labels, &d.tuples),
        None => (unknowns, solutions),
    }
}

pub fn solve_text(r: &SolveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "type {} on P^{}", r.splitting_type, r.n);
    let _ = writeln!(s, "unknowns: {}", r.unknowns.join(","));
    let _ = writeln!(s, "{} solution(s), {}", r.solutions.len(), r.completeness);
    for (i, t) in r.solutions.iter().enumerate() {
        let _ = write!(s, "  {}", t.iter().map(i64::to_string).collect::<Vec<_>>().join(","));
        if let Some(d) = &r.display {
            let _ = write!(s, "    display {}", tuple(&d.tuples[i]));
        }
        s.push('\n');
    }
    s
}

pub fn solve_md(r: &SolveReport) -> String {
    let mut s = format!("### {}\n\n{} solution(s), {}.\n\n", r.splitting_type, r.solutions.len(), r.completeness);
    let (head, rows) = columns(&r.unknowns, &r.solutions, r.display.as_ref());
    md_table(&mut s, head, rows.iter().map(|t| nums(t)));
    s
}

fn case_md(s: &mut String, c: &CaseReport) {
    let _ = writeln!(s, "### {}\n", c.splitting_type);
    if !c.shortcuts.is_empty() {
        let names: Vec<String> = c.shortcuts.iter().map(Shortcut::to_string).collect();
        let _ = writeln!(s, "Shortcuts: {}.\n", names.join(", "));
    }
    if let Some(e) = &c.error {
        let _ = writeln!(s, "Error: {e}.\n");
    }
    let Some(comp) = &c.completeness else {
        let _ = writeln!(s, "Not solved.\n");
        return;
    };
    let _ = writeln!(s, "{} solution(s), {}.\n", c.solutions.len(), comp);
    let (head, rows) = columns(&c.unknowns, &c.solutions, c.display.as_ref());
    let mut header = head.to_vec();
    header.push("bundle".into());
    md_table(
        s,
        &header,
        rows.iter().zip(&c.verdicts).map(|(t, v)| {
            let mut row = nums(t);
            row.push(v.to_string());
            row
        }),
    );
    s.push('\n');
}

pub fn classify_md(r: &ClassifyReport) -> String {
    let mut s = format!("## Rank {} on P^{}\n\n", r.rank, r.n);
    for c in &r.cases {
        case_md(&mut s, c);
    }
    s.push_str("### Families\n\n");
    md_table(
        &mut s,
        &["bundle".into(), "family".into(), "cases".into()],
        r.families.iter().map(|f| vec![f.bundle.to_string(), f.family.label().to_string(), f.cases.join(", ")]),
    );
    let _ = writeln!(s, "\nUnidentified tuples: {}", r.unidentified_count);
    s
}

pub fn classify_text(r: &ClassifyReport) -> String {
    let mut s = format!("rank {} on P^{}: {} case(s)\n", r.rank, r.n, r.cases.len());
    for c in &r.cases {
        let _ = write!(s, "{}", c.splitting_type);
        if !c.shortcuts.is_empty() {
            let names: Vec<String> = c.shortcuts.iter().map(Shortcut::to_string).collect();
            let _ = write!(s, "  [{}]", names.join("; "));
        }
        s.push('\n');
        if let Some(e) = &c.error {
            let _ = writeln!(s, "  error: {e}");
        }
        for (i, v) in c.verdicts.iter().enumerate() {
            let shown = c.display.as_ref().map_or(&c.solutions[i], |d| &d.tuples[i]);
            let _ = writeln!(s, "  {} -> {}", tuple(shown), v);
        }
    }
    s.push_str("families:\n");
    for f in &r.families {
        let _ = writeln!(s, "  {}  ({})", f.bundle, f.cases.join(", "));
    }
    let _ = writeln!(s, "unidentified: {}", r.unidentified_count);
    s
}

pub fn chern_text(r: &ChernReport) -> String {
    format!("{} on P^{}: rank {}, c = {}, restriction {}\n", r.bundle, r.n, r.rank, tuple(&r.chern), r.line_type)
}

pub fn chern_md(r: &ChernReport) -> String {
    let mut header = vec!["bundle".to_string(), "rank".to_string()];
    header.extend((0..r.chern.len()).map(|i| format!("c{i}")));
    header.push("restriction".into());
    let mut row = vec![r.bundle.clone(), r.rank.to_string()];
    row.extend(nums(&r.chern));
    row.push(r.line_type.clone());
    let mut s = String::new();
    md_table(&mut s, &header, [row]);
    s
}

pub fn verify_text(r: &VerifyReport) -> String {
    let verdict = if r.verified { "verified" } else { "NOT verified" };
    format!("{} at {} for {}: {}\n", r.bundle, tuple(&r.tuple), r.splitting_type, verdict)
}

pub fn cases_text(rows: &[CaseRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let names: Vec<String> = r.shortcuts.iter().map(Shortcut::to_string).collect();
        let mark = if r.tabulated { " *" } else { "" };
        let _ = writeln!(s, "{}{}{}", r.splitting_type, mark, if names.is_empty() { String::new() } else { format!("  [{}]", names.join("; ")) });
    }
    s
}

pub fn cases_md(rows: &[CaseRow]) -> String {
    let mut s = String::new();
    md_table(
        &mut s,
        &["type".into(), "tabulated".into(), "shortcuts".into()],
        rows.iter().map(|r| {
            let names: Vec<String> = r.shortcuts.iter().map(Shortcut::to_string).collect();
            vec![r.splitting_type.clone(), if r.tabulated { "yes".into() } else { "no".into() }, names.join(", ")]
        }),
    );
    s
}
