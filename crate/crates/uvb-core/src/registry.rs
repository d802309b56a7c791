//! Display coordinates of the tabulated rank 6 and rank 7 cases on P^4.
//!
//! Each tabulated case reports a subset of the unknowns in its own order and
//! with its own letters. An entry lists, per reported factor, the letter used
//! in the table, the factor position and the first superscript index.

use serde::Serialize;

use crate::constraints::SplittingType;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisplaySpec {
    /// Labels as printed in the table, e.g. `t2^1`.
    pub labels: Vec<String>,
    /// Matching unknown names of the system.
    pub names: Vec<String>,
    /// Matching unknown indices of the system, filled by [`DisplaySpec::resolve`].
    pub indices: Vec<usize>,
}

impl DisplaySpec {
    pub fn resolve(mut self, names: &[String]) -> Result<DisplaySpec, String> {
        self.indices = self
            .names
            .iter()
            .map(|n| names.iter().position(|m| m == n).ok_or_else(|| format!("unknown {n}")))
            .collect::<Result<_, _>>()?;
        Ok(self)
    }
}

/// (letter, 1-based factor position, first superscript).
type Group = (&'static str, usize, u32);

const ENTRIES: &[(&[u32], &[Group])] = &[
    // rank 6
    (&[3, 3], &[("t", 1, 1), ("n", 2, 1)]),
    (&[2, 4], &[("m", 1, 0)]),
    (&[1, 2, 3], &[("a", 1, 0), ("b", 2, 0), ("n", 3, 0)]),
    (&[2, 1, 3], &[("a", 2, 0), ("b", 1, 0), ("n", 3, 0)]),
    (&[1, 3, 2], &[("a", 1, 0), ("b", 3, 0), ("n", 2, 0)]),
    (&[1, 1, 4], &[("a", 1, 0), ("b", 2, 0), ("n", 3, 0)]),
    (&[1, 4, 1], &[("a", 1, 0), ("b", 3, 0), ("n", 2, 0)]),
    (&[1, 1, 1, 3], &[("a", 1, 0), ("b", 2, 0), ("c", 3, 0), ("n", 4, 0)]),
    (&[1, 1, 3, 1], &[("a", 1, 0), ("b", 2, 0), ("c", 4, 0), ("n", 3, 0)]),
    // rank 7
    (&[2, 5], &[("t", 1, 0)]),
    (&[3, 4], &[("t", 1, 0)]),
    (&[1, 1, 5], &[("a", 1, 0), ("b", 2, 0)]),
    (&[1, 5, 1], &[("a", 1, 0), ("b", 3, 0)]),
    (&[1, 2, 4], &[("a", 1, 0), ("b", 2, 0)]),
    (&[2, 1, 4], &[("a", 2, 0), ("b", 1, 0)]),
    (&[2, 4, 1], &[("a", 3, 0), ("b", 1, 0)]),
    (&[2, 2, 3], &[("a", 1, 0), ("e", 2, 0)]),
    (&[2, 3, 2], &[("a", 1, 0), ("e", 3, 0)]),
    (&[1, 3, 3], &[("a", 1, 0), ("b", 2, 0), ("c", 3, 0)]),
    (&[3, 1, 3], &[("b", 1, 0), ("a", 2, 0), ("c", 3, 0)]),
    (&[1, 1, 2, 3], &[("a", 1, 0), ("b", 2, 0), ("n", 3, 0), ("m", 4, 0)]),
    (&[1, 2, 1, 3], &[("a", 1, 0), ("n", 2, 0), ("b", 3, 0), ("m", 4, 0)]),
    (&[2, 1, 1, 3], &[("n", 1, 0), ("a", 2, 0), ("b", 3, 0), ("m", 4, 0)]),
    (&[1, 2, 3, 1], &[("a", 1, 0), ("n", 2, 0), ("m", 3, 0), ("b", 4, 0)]),
    (&[2, 3, 1, 1], &[("n", 1, 0), ("m", 2, 0), ("a", 3, 0), ("b", 4, 0)]),
    (&[2, 1, 3, 1], &[("n", 1, 0), ("a", 2, 0), ("m", 3, 0), ("b", 4, 0)]),
    (&[1, 1, 1, 4], &[("a", 1, 0), ("b", 2, 0), ("c", 3, 0), ("n", 4, 0)]),
    (&[1, 1, 4, 1], &[("a", 1, 0), ("b", 2, 0), ("n", 3, 0), ("c", 4, 0)]),
    (&[1, 1, 1, 1, 3], &[("a", 1, 0), ("b", 2, 0), ("c", 3, 0), ("d", 4, 0), ("n", 5, 0)]),
    (&[1, 1, 1, 3, 1], &[("a", 1, 0), ("b", 2, 0), ("c", 3, 0), ("n", 4, 0), ("d", 5, 0)]),
    (&[1, 1, 3, 1, 1], &[("a", 1, 0), ("b", 2, 0), ("n", 3, 0), ("c", 4, 0), ("d", 5, 0)]),
];

/// Ranks of every tabulated case, in table order.
pub fn tabulated_cases() -> Vec<SplittingType> {
    ENTRIES.iter().map(|(r, _)| SplittingType::consecutive(r.to_vec())).collect()
}

/// Display coordinates for a normalized consecutive type on P^4, if tabulated.
pub fn lookup(st: &SplittingType) -> Option<DisplaySpec> {
    if !st.is_consecutive() {
        return None;
    }
    let (ranks, groups) = ENTRIES.iter().find(|(r, _)| *r == st.ranks())?;
    let mut labels = Vec::new();
    let mut names = Vec::new();
    for &(p, pos, sup) in groups.iter() {
        let letter = (b'a' + (pos - 1) as u8) as char;
        let r = ranks[pos - 1];
        if r == 1 {
            labels.push(p.to_string());
            names.push(format!("{letter}1"));
            continue;
        }
        for d in 1..=r.min(3) {
            if d == 1 {
                labels.push(format!("{p}1"));
                names.push(format!("{letter}1"));
            } else {
                for j in 0..2 {
                    labels.push(format!("{p}{d}^{}", sup + j));
                    names.push(format!("{letter}{d}_{j}"));
                }
            }
        }
    }
    Some(DisplaySpec { labels, names, indices: Vec::new() })
}
