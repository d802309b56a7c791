//! Factor ansatz and the integer polynomial system of a splitting type.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bundles::ChernVector;
use crate::chow::normal_form;
use crate::registry::{self, DisplaySpec};
use crate::ring::{CoefPoly, GeomExp, GeomPoly, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("invalid splitting type: {0}")]
    InvalidType(String),
    #[error("splitting type {0} has a twist gap of at least 2 and reduces to an extension")]
    ReducibleType(String),
    #[error("tuple has {got} entries, system has {expected} unknowns")]
    MissingAssignment { expected: usize, got: usize },
    #[error("tuple does not make the factor product free of V")]
    InvalidSolution,
}

/// `(k; r_1..r_k; u_1..u_k)` with strictly decreasing twists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplittingType {
    ranks: Vec<u32>,
    twists: Vec<i64>,
}

impl SplittingType {
    pub fn new(ranks: Vec<u32>, twists: Vec<i64>) -> Result<Self, ConstraintError> {
        if ranks.is_empty() || ranks.len() != twists.len() {
            return Err(ConstraintError::InvalidType(format!(
                "{} ranks but {} twists",
                ranks.len(),
                twists.len()
            )));
        }
        if ranks.contains(&0) {
            return Err(ConstraintError::InvalidType("ranks must be positive".into()));
        }
        if twists.windows(2).any(|w| w[0] <= w[1]) {
            return Err(ConstraintError::InvalidType("twists must be strictly decreasing".into()));
        }
        Ok(SplittingType { ranks, twists })
    }

    /// Consecutive twists `k-1, ..., 0`.
    pub fn consecutive(ranks: Vec<u32>) -> Self {
        let k = ranks.len() as i64;
        let twists = (0..k).rev().collect();
        SplittingType::new(ranks, twists).expect("positive ranks")
    }

    /// Groups a multiset of line degrees.
    pub fn from_degrees(degrees: &[i64]) -> Self {
        let mut d = degrees.to_vec();
        d.sort_unstable_by(|a, b| b.cmp(a));
        let mut ranks = Vec::new();
        let mut twists: Vec<i64> = Vec::new();
        for x in d {
            if twists.last() == Some(&x) {
                *ranks.last_mut().unwrap() += 1;
            } else {
                twists.push(x);
                ranks.push(1);
            }
        }
        SplittingType { ranks, twists }
    }

    pub fn k(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    pub fn rank(&self) -> u32 {
        self.ranks.iter().sum()
    }

    /// Line degrees with multiplicity, largest first.
    pub fn degrees(&self) -> Vec<i64> {
        self.ranks
            .iter()
            .zip(&self.twists)
            .flat_map(|(&r, &u)| std::iter::repeat_n(u, r as usize))
            .collect()
    }

    pub fn normalized(&self) -> SplittingType {
        let s = *self.twists.last().expect("non-empty");
        self.shifted(-s)
    }

    pub fn shifted(&self, a: i64) -> SplittingType {
        SplittingType { ranks: self.ranks.clone(), twists: self.twists.iter().map(|u| u + a).collect() }
    }

    pub fn is_normalized(&self) -> bool {
        self.twists.last() == Some(&0)
    }

    pub fn is_consecutive(&self) -> bool {
        self.twists.windows(2).all(|w| w[0] - w[1] == 1)
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(
            f,
            "{};{};{}",
            self.k(),
            join(self.ranks.iter().map(u32::to_string).collect()),
            join(self.twists.iter().map(i64::to_string).collect())
        )
    }
}

impl FromStr for SplittingType {
    type Err = ConstraintError;

    /// Accepts `k;r1,..,rk;u1,..,uk` and the labelled form `k=..;r=..;u=..` in any order.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| ConstraintError::InvalidType(format!("{m} in {s:?}"));
        let parts: Vec<&str> = s.split(';').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad("expected three ';'-separated fields"));
        }
        let ints = |t: &str| -> Result<Vec<i64>, ConstraintError> {
            t.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| bad("bad integer")))
                .collect()
        };
        let labelled = parts.iter().any(|p| p.contains('='));
        let (mut k, mut r, mut u) = (None, None, None);
        for (i, p) in parts.iter().enumerate() {
            let (key, body) = if labelled {
                let (key, body) = p.split_once('=').ok_or_else(|| bad("mixed labelled fields"))?;
                (key.trim(), body)
            } else {
                (["k", "r", "u"][i], *p)
            };
            let slot = match key {
                "k" => &mut k,
                "r" => &mut r,
                "u" => &mut u,
                _ => return Err(bad("unknown field label")),
            };
            if slot.is_some() {
                return Err(bad("repeated field"));
            }
            *slot = Some(ints(body)?);
        }
        let (k, r, u) = match (k, r, u) {
            (Some(k), Some(r), Some(u)) => (k, r, u),
            _ => return Err(bad("missing field")),
        };
        if k.len() != 1 || k[0] < 1 || k[0] as usize != r.len() {
            return Err(bad("k does not match the number of ranks"));
        }
        let ranks = r
            .into_iter()
            .map(|x| u32::try_from(x).map_err(|_| bad("negative rank")))
            .collect::<Result<Vec<_>, _>>()?;
        SplittingType::new(ranks, u)
    }
}

/// Degree-`d` symmetric forms `U^a V^b + U^b V^a` for `a = d, d-1, ..` down to `U^(d/2) V^(d/2)`.
pub fn full_symmetric_basis(d: u32) -> Vec<GeomPoly> {
    (d.div_ceil(2)..=d)
        .rev()
        .map(|a| {
            let b = d - a;
            let mut p = GeomPoly::int_monomial(1, 0, a, b);
            if a != b {
                p.add_term(GeomExp::new(0, b, a), CoefPoly::one());
            }
            p
        })
        .collect()
}

/// Indices into [`full_symmetric_basis`] kept after gauge fixing.
///
/// Walks the basis from its last element and keeps an element exactly when its
/// normal form is independent of those already kept, so kernel directions are
/// deleted starting from the highest `U` power.
pub fn gauge_retained(d: u32, n: u32) -> Vec<usize> {
    let basis = full_symmetric_basis(d);
    if d < n {
        return (0..basis.len()).collect();
    }
    let coords: Vec<(u32, u32)> = (0..=d).filter(|&i| i <= n && d - i < n).map(|i| (i, d - i)).collect();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut kept = Vec::new();
    for idx in (0..basis.len()).rev() {
        let nf = normal_form(&basis[idx], n);
        let mut vec: Vec<BigRational> = coords
            .iter()
            .map(|&(u, v)| BigRational::from_integer(nf.value().coefficient_of(0, u, v).constant_term()))
            .collect();
        if reduce_against(&rows, &mut vec) {
            rows.push(vec);
            kept.push(idx);
        }
    }
    kept.sort_unstable();
    kept
}

/// Reduces `v` by echelon `rows`; returns true if something nonzero remains.
fn reduce_against(rows: &[Vec<BigRational>], v: &mut [BigRational]) -> bool {
    for row in rows {
        let p = row.iter().position(|x| !x.is_zero()).expect("echelon rows are nonzero");
        if !v[p].is_zero() {
            let f = &v[p] / &row[p];
            for (a, b) in v.iter_mut().zip(row) {
                *a -= &f * b;
            }
        }
    }
    v.iter().any(|x| !x.is_zero())
}

/// Symmetric basis of degree `d` after gauge fixing.
pub fn symmetric_basis(d: u32, n: u32) -> Vec<GeomPoly> {
    let full = full_symmetric_basis(d);
    gauge_retained(d, n).into_iter().map(|i| full[i].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnsatzCoefficient {
    pub unknown: Var,
    pub degree: u32,
    pub basis_index: usize,
}

#[derive(Debug, Clone)]
pub struct FactorAnsatz {
    pub index: usize,
    pub rank: u32,
    pub twist: i64,
    /// Unshifted `S_i(T,U,V)`.
    pub poly: GeomPoly,
    pub coefficients: Vec<AnsatzCoefficient>,
    /// `(degree, basis index)` pairs removed by gauge fixing.
    pub deleted: Vec<(u32, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnknownInfo {
    pub name: String,
    pub id: Var,
    pub factor: usize,
    pub degree: u32,
    pub basis_index: usize,
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub splitting_type: SplittingType,
    pub n: u32,
    pub unknowns: Vec<UnknownInfo>,
    pub factors: Vec<FactorAnsatz>,
    pub equations: Vec<CoefPoly>,
    /// The `T^t U^u V^v` monomial each equation was read from.
    pub sources: Vec<GeomExp>,
    pub display: Option<DisplaySpec>,
}

fn factor_letter(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("f{i}_")
    }
}

/// Builds the monic symmetric ansatz `S_i` for every factor.
pub fn build_ansatz(st: &SplittingType, n: u32) -> (Vec<FactorAnsatz>, Vec<UnknownInfo>) {
    let mut unknowns = Vec::new();
    let mut factors = Vec::new();
    for (i, (&r, &u)) in st.ranks().iter().zip(st.twists()).enumerate() {
        let letter = factor_letter(i);
        let mut poly = GeomPoly::int_monomial(1, r, 0, 0);
        let mut coefficients = Vec::new();
        let mut deleted = Vec::new();
        for d in 1..=r {
            let full = full_symmetric_basis(d);
            let kept = gauge_retained(d, n);
            for j in 0..full.len() {
                if !kept.contains(&j) {
                    deleted.push((d, j));
                    continue;
                }
                let id = unknowns.len();
                let name = if full.len() == 1 { format!("{letter}{d}") } else { format!("{letter}{d}_{j}") };
                unknowns.push(UnknownInfo { name, id, factor: i, degree: d, basis_index: j });
                coefficients.push(AnsatzCoefficient { unknown: id, degree: d, basis_index: j });
                let term = &full[j] * &GeomPoly::int_monomial(1, r - d, 0, 0);
                poly = &poly + &term.scale(&CoefPoly::var(id));
            }
        }
        factors.push(FactorAnsatz { index: i, rank: r, twist: u, poly, coefficients, deleted });
    }
    (factors, unknowns)
}

/// `normal_form(prod_i S_i(T + u_i U, U, V), n)`.
pub fn reduced_product(factors: &[GeomPoly], twists: &[i64], n: u32) -> GeomPoly {
    let mut acc = GeomPoly::one();
    for (f, &u) in factors.iter().zip(twists) {
        acc = normal_form(&(&acc * &f.shift_t(u)), n).into_value();
    }
    acc
}

pub fn build_system(st: &SplittingType, n: u32) -> Result<ConstraintSystem, ConstraintError> {
    if !st.is_consecutive() {
        return Err(ConstraintError::ReducibleType(st.to_string()));
    }
    let st = st.normalized();
    let (factors, unknowns) = build_ansatz(&st, n);
    let polys: Vec<GeomPoly> = factors.iter().map(|f| f.poly.clone()).collect();
    let product = reduced_product(&polys, st.twists(), n);
    let mut eqs: Vec<(GeomExp, CoefPoly)> =
        product.terms().filter(|(e, _)| e.v >= 1).map(|(e, c)| (*e, c.clone())).collect();
    eqs.sort_by(|a, b| b.0.t.cmp(&a.0.t).then(b.0.u.cmp(&a.0.u)).then(b.0.v.cmp(&a.0.v)));
    let mut equations: Vec<CoefPoly> = Vec::new();
    let mut sources = Vec::new();
    for (e, c) in eqs {
        if !equations.contains(&c) {
            equations.push(c);
            sources.push(e);
        }
    }
    let names: Vec<String> = unknowns.iter().map(|u| u.name.clone()).collect();
    let display = (n == 4)
        .then(|| registry::lookup(&st))
        .flatten().map(|spec| spec.resolve(&names)).transpose().ok().flatten();
    Ok(ConstraintSystem { splitting_type: st, n, unknowns, factors, equations, sources, display })
}

impl ConstraintSystem {
    pub fn names(&self) -> Vec<String> {
        self.unknowns.iter().map(|u| u.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<Var> {
        self.unknowns.iter().position(|u| u.name == name)
    }

    fn values(&self, tuple: &[i64]) -> Result<Vec<Option<BigInt>>, ConstraintError> {
        if tuple.len() != self.unknowns.len() {
            return Err(ConstraintError::MissingAssignment { expected: self.unknowns.len(), got: tuple.len() });
        }
        Ok(tuple.iter().map(|&x| Some(BigInt::from(x))).collect())
    }

    pub fn check_solution(&self, tuple: &[i64]) -> Result<bool, ConstraintError> {
        let vals = self.values(tuple)?;
        Ok(self.equations.iter().all(|e| e.eval(&vals).is_some_and(|x| x.is_zero())))
    }

    /// The factors with the tuple substituted, unshifted.
    pub fn evaluated_factors(&self, tuple: &[i64]) -> Result<Vec<GeomPoly>, ConstraintError> {
        let vals = self.values(tuple)?;
        let names = self.names();
        Ok(self
            .factors
            .iter()
            .map(|f| f.poly.eval_unknowns(&vals, &names, false).expect("all unknowns assigned"))
            .collect())
    }

    /// Reduced product of the evaluated factors.
    pub fn evaluated_product(&self, tuple: &[i64]) -> Result<GeomPoly, ConstraintError> {
        let fs = self.evaluated_factors(tuple)?;
        Ok(reduced_product(&fs, self.splitting_type.twists(), self.n))
    }

    /// Display projection of a full tuple, when the case is registered.
    pub fn project(&self, tuple: &[i64]) -> Option<Vec<i64>> {
        self.display.as_ref().map(|d| d.indices.iter().map(|&i| tuple[i]).collect())
    }

    pub fn level(&self, v: Var) -> u32 {
        self.unknowns[v].degree
    }
}

/// Chern classes `c_0..c_min(r,n)` read off the V-free reduced product.
pub fn residual_chern(st: &SplittingType, n: u32, tuple: &[i64]) -> Result<ChernVector, ConstraintError> {
    let st = st.normalized();
    let (factors, unknowns) = build_ansatz(&st, n);
    if tuple.len() != unknowns.len() {
        return Err(ConstraintError::MissingAssignment { expected: unknowns.len(), got: tuple.len() });
    }
    let vals: Vec<Option<BigInt>> = tuple.iter().map(|&x| Some(BigInt::from(x))).collect();
    let polys: Vec<GeomPoly> =
        factors.iter().map(|f| f.poly.eval_unknowns(&vals, &[], false).expect("total")).collect();
    let product = reduced_product(&polys, st.twists(), n);
    chern_from_product(&product, st.rank(), n)
}

pub(crate) fn chern_from_product(product: &GeomPoly, r: u32, n: u32) -> Result<ChernVector, ConstraintError> {
    if product.terms().any(|(e, _)| e.v > 0) {
        return Err(ConstraintError::InvalidSolution);
    }
    let top = r.min(n);
    let c = (0..=top).map(|i| product.coefficient_of(r - i, i, 0).constant_term()).collect();
    Ok(ChernVector::new(n, r, c))
}
