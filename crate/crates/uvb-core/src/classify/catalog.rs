//! Homogeneous bundles tried against a solution: one optional tangent-type
//! summand plus line bundles.

use serde::Serialize;

use crate::bundles::{line_degrees, BundleExpr};
use crate::constraints::SplittingType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    Lines,
    Tangent,
    Cotangent,
    /// `wedge(2, T(-1))`.
    WedgeTangent,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Lines => "sum of line bundles",
            Family::Tangent => "T(a) + lines",
            Family::Cotangent => "Om(a) + lines",
            Family::WedgeTangent => "wedge(2,T(-1))(a) + lines",
        }
    }

    fn atom(self, a: i64) -> Option<BundleExpr> {
        Some(match self {
            Family::Lines => return None,
            Family::Tangent => BundleExpr::Tangent.twist(a),
            Family::Cotangent => BundleExpr::Cotangent.twist(a),
            Family::WedgeTangent => BundleExpr::wedge(2, BundleExpr::Tangent.twist(-1)).twist(a),
        })
    }
}

/// A catalog bundle: `atom(twist)` plus lines of the given degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub family: Family,
    pub twist: i64,
    /// Line degrees, largest first.
    pub lines: Vec<i64>,
}

impl Instance {
    pub fn expr(&self) -> BundleExpr {
        let lines = self.lines.iter().map(|&d| BundleExpr::Line(d));
        BundleExpr::sum(self.family.atom(self.twist).into_iter().chain(lines))
    }

    pub fn summands(&self) -> usize {
        self.lines.len() + usize::from(self.family != Family::Lines)
    }

    /// Dual bundle, valid on P^4 where `wedge(2,T(-1))` has determinant `O(2)`.
    pub fn dual(&self) -> Instance {
        let (family, twist) = match self.family {
            Family::Lines => (Family::Lines, 0),
            Family::Tangent => (Family::Cotangent, -self.twist),
            Family::Cotangent => (Family::Tangent, -self.twist),
            Family::WedgeTangent => (Family::WedgeTangent, -1 - self.twist),
        };
        let mut lines: Vec<i64> = self.lines.iter().map(|d| -d).collect();
        lines.sort_unstable_by(|a, b| b.cmp(a));
        Instance { family, twist, lines }
    }

    pub fn shifted(&self, a: i64) -> Instance {
        let twist = if self.family == Family::Lines { 0 } else { self.twist + a };
        Instance { family: self.family, twist, lines: self.lines.iter().map(|d| d + a).collect() }
    }

    /// Twisted so that the smallest line degree of the restriction is 0.
    pub fn normalized(&self, n: u32) -> Instance {
        let d = line_degrees(&self.expr(), n).expect("catalog bundles are well ranked");
        self.shifted(-d.last().copied().unwrap_or(0))
    }

    /// Inverse of [`Instance::expr`] on catalog shapes.
    pub fn recognize(e: &BundleExpr) -> Option<Instance> {
        let parts: Vec<&BundleExpr> = match e {
            BundleExpr::Sum(v) => v.iter().collect(),
            x => vec![x],
        };
        let mut atom: Option<(Family, i64)> = None;
        let mut lines = Vec::new();
        for p in parts {
            let (base, a) = match p {
                BundleExpr::Line(d) => {
                    lines.push(*d);
                    continue;
                }
                BundleExpr::Twist(b, a) => (b.as_ref(), *a),
                b => (b, 0),
            };
            let fam = match base {
                BundleExpr::Tangent => Family::Tangent,
                BundleExpr::Cotangent => Family::Cotangent,
                b if *b == BundleExpr::wedge(2, BundleExpr::Tangent.twist(-1)) => Family::WedgeTangent,
                _ => return None,
            };
            if atom.replace((fam, a)).is_some() {
                return None;
            }
        }
        lines.sort_unstable_by(|a, b| b.cmp(a));
        let (family, twist) = atom.unwrap_or((Family::Lines, 0));
        Some(Instance { family, twist, lines })
    }
}

/// Removes `sub` from the descending multiset `all`, if contained.
fn difference(all: &[i64], sub: &[i64]) -> Option<Vec<i64>> {
    let mut rest = all.to_vec();
    for x in sub {
        let i = rest.iter().position(|y| y == x)?;
        rest.remove(i);
    }
    Some(rest)
}

/// Catalog bundles restricting to `st`, in match order: fewer summands, then family, then twists.
pub fn instances(st: &SplittingType, n: u32) -> Vec<Instance> {
    let degrees = st.degrees();
    let r = st.rank() as i64;
    let mut out = vec![Instance { family: Family::Lines, twist: 0, lines: degrees.clone() }];
    for family in [Family::Tangent, Family::Cotangent, Family::WedgeTangent] {
        for a in -r..=r {
            let atom = family.atom(a).expect("non-line family");
            let Ok(d) = line_degrees(&atom, n) else { continue };
            if let Some(lines) = difference(&degrees, &d) {
                out.push(Instance { family, twist: a, lines });
            }
        }
    }
    out.sort_by(|x, y| {
        (x.summands(), x.family, x.twist, &x.lines).cmp(&(y.summands(), y.family, y.twist, &y.lines))
    });
    out
}
