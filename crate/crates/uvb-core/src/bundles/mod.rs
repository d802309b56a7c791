//! Bundle expressions on P^n: Chern classes, restriction to lines, pullback targets.

mod parse;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::constraints::SplittingType;
use crate::ring::GeomPoly;

pub use parse::parse_expr;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("rank error: {0}")]
    Rank(String),
    #[error("non-integral Chern class c_{0}")]
    IntegralityViolation(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BundleExpr {
    Line(i64),
    Tangent,
    Cotangent,
    Dual(Box<BundleExpr>),
    Twist(Box<BundleExpr>, i64),
    Sum(Vec<BundleExpr>),
    Wedge(u32, Box<BundleExpr>),
    Sym(u32, Box<BundleExpr>),
}

impl BundleExpr {
    pub fn twist(self, a: i64) -> BundleExpr {
        if a == 0 {
            return self;
        }
        match self {
            BundleExpr::Line(b) => BundleExpr::Line(a + b),
            BundleExpr::Twist(e, b) if a + b == 0 => *e,
            BundleExpr::Twist(e, b) => BundleExpr::Twist(e, a + b),
            e => BundleExpr::Twist(Box::new(e), a),
        }
    }

    pub fn dual(self) -> BundleExpr {
        BundleExpr::Dual(Box::new(self))
    }

    pub fn wedge(p: u32, e: BundleExpr) -> BundleExpr {
        BundleExpr::Wedge(p, Box::new(e))
    }

    /// Flattened direct sum.
    pub fn sum(parts: impl IntoIterator<Item = BundleExpr>) -> BundleExpr {
        let mut out = Vec::new();
        for p in parts {
            match p {
                BundleExpr::Sum(v) => out.extend(v),
                e => out.push(e),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            BundleExpr::Sum(out)
        }
    }

    /// Number of top-level summands.
    pub fn summands(&self) -> usize {
        match self {
            BundleExpr::Sum(v) => v.len(),
            _ => 1,
        }
    }

    pub fn rank(&self, n: u32) -> Result<u64, BundleError> {
        Ok(match self {
            BundleExpr::Line(_) => 1,
            BundleExpr::Tangent | BundleExpr::Cotangent => n as u64,
            BundleExpr::Dual(e) | BundleExpr::Twist(e, _) => e.rank(n)?,
            BundleExpr::Sum(v) => v.iter().map(|e| e.rank(n)).sum::<Result<u64, _>>()?,
            BundleExpr::Wedge(p, e) => {
                let r = e.rank(n)?;
                if *p as u64 > r {
                    return Err(BundleError::Rank(format!("wedge({p}, ·) of a rank-{r} bundle")));
                }
                binomial(r, *p as u64)
            }
            BundleExpr::Sym(p, e) => {
                let r = e.rank(n)?;
                if r == 0 {
                    u64::from(*p == 0)
                } else {
                    binomial(r + *p as u64 - 1, *p as u64)
                }
            }
        })
    }

    fn is_atomic(&self) -> bool {
        !matches!(self, BundleExpr::Sum(_))
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

impl fmt::Display for BundleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleExpr::Line(a) => write!(f, "O({a})"),
            BundleExpr::Tangent => f.write_str("T"),
            BundleExpr::Cotangent => f.write_str("Om"),
            BundleExpr::Dual(e) => write!(f, "dual({e})"),
            BundleExpr::Twist(e, a) if e.is_atomic() => write!(f, "{e}({a})"),
            BundleExpr::Twist(e, a) => write!(f, "({e})({a})"),
            BundleExpr::Wedge(p, e) => write!(f, "wedge({p},{e})"),
            BundleExpr::Sym(p, e) => write!(f, "sym({p},{e})"),
            BundleExpr::Sum(v) => {
                let mut i = 0;
                let mut first = true;
                while i < v.len() {
                    let mut j = i + 1;
                    while j < v.len() && v[j] == v[i] {
                        j += 1;
                    }
                    if !first {
                        f.write_str(" + ")?;
                    }
                    first = false;
                    if j - i > 1 {
                        write!(f, "{}^{}", v[i], j - i)?;
                    } else {
                        write!(f, "{}", v[i])?;
                    }
                    i = j;
                }
                Ok(())
            }
        }
    }
}

impl Serialize for BundleExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Total Chern class `c_0..c_min(r,n)` in units of the hyperplane class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChernVector {
    pub n: u32,
    pub rank: u32,
    pub c: Vec<BigInt>,
}

impl ChernVector {
    pub fn new(n: u32, rank: u32, c: Vec<BigInt>) -> Self {
        ChernVector { n, rank, c }
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.c.iter().map(|x| x.to_i64().expect("Chern class fits in i64")).collect()
    }

    /// Truncated product, the Whitney sum rule.
    pub fn whitney(&self, other: &ChernVector) -> ChernVector {
        let rank = self.rank + other.rank;
        let len = rank.min(self.n) as usize + 1;
        let mut c = vec![BigInt::zero(); len];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in other.c.iter().enumerate() {
                if i + j < len {
                    c[i + j] += a * b;
                }
            }
        }
        ChernVector::new(self.n, rank, c)
    }
}

impl Serialize for ChernVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_i64().serialize(s)
    }
}

/// Power sums `p_0..p_n` of the Chern roots, `p_0` being the rank.
#[derive(Debug, Clone, PartialEq)]
struct PowerSums(Vec<BigRational>);

impl PowerSums {
    fn constant(n: u32, rank: BigRational) -> Self {
        let mut v = vec![BigRational::zero(); n as usize + 1];
        v[0] = rank;
        PowerSums(v)
    }

    fn line(n: u32, a: i64) -> Self {
        let a = BigRational::from_integer(a.into());
        let mut v = Vec::with_capacity(n as usize + 1);
        let mut x = BigRational::one();
        for _ in 0..=n {
            v.push(x.clone());
            x *= &a;
        }
        PowerSums(v)
    }

    fn add(&self, o: &Self) -> Self {
        PowerSums(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn scale(&self, c: &BigRational) -> Self {
        PowerSums(self.0.iter().map(|a| a * c).collect())
    }

    fn dual(&self) -> Self {
        PowerSums(self.0.iter().enumerate().map(|(k, a)| if k % 2 == 1 { -a } else { a.clone() }).collect())
    }

    /// Roots `x_j + y_l`: binomial convolution.
    fn tensor(&self, o: &Self) -> Self {
        let n = self.0.len();
        let binom = binomial_table(n);
        PowerSums(
            (0..n)
                .map(|k| {
                    (0..=k).fold(BigRational::zero(), |acc, j| {
                        acc + &self.0[j] * &o.0[k - j] * BigRational::from_integer(binom[k][j].clone())
                    })
                })
                .collect(),
        )
    }

    fn twist(&self, a: i64) -> Self {
        let n = self.0.len() as u32 - 1;
        self.tensor(&PowerSums::line(n, a))
    }

    /// Adams operation: roots scaled by `i`.
    fn adams(&self, i: u32) -> Self {
        let i = BigRational::from_integer(i.into());
        let mut f = BigRational::one();
        PowerSums(
            self.0
                .iter()
                .map(|a| {
                    let out = a * &f;
                    f *= &i;
                    out
                })
                .collect(),
        )
    }

    /// `m λ^m = Σ_{i=1..m} (±1)^(i-1) ψ^i · λ^(m-i)`, sign `+` for symmetric powers.
    fn lambda_like(&self, p: u32, alternating: bool) -> Self {
        let n = self.0.len() as u32 - 1;
        let mut table = vec![PowerSums::constant(n, BigRational::one())];
        for m in 1..=p {
            let mut acc = PowerSums::constant(n, BigRational::zero());
            for i in 1..=m {
                let term = self.adams(i).tensor(&table[(m - i) as usize]);
                let neg = alternating && i % 2 == 0;
                acc = acc.add(&if neg { term.scale(&-BigRational::one()) } else { term });
            }
            table.push(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(m))));
        }
        table.pop().expect("non-empty")
    }

    /// Elementary symmetric functions by Newton's identities.
    fn chern(&self, len: usize) -> Result<Vec<BigInt>, BundleError> {
        let mut e = vec![BigRational::one()];
        for k in 1..len {
            let mut s = BigRational::zero();
            for i in 1..=k {
                let t = &e[k - i] * &self.0[i];
                if i % 2 == 1 {
                    s += t;
                } else {
                    s -= t;
                }
            }
            e.push(s / BigRational::from_integer(BigInt::from(k)));
        }
        e.into_iter()
            .enumerate()
            .map(|(k, x)| if x.is_integer() { Ok(x.to_integer()) } else { Err(BundleError::IntegralityViolation(k)) })
            .collect()
    }
}

fn binomial_table(n: usize) -> Vec<Vec<BigInt>> {
    let mut t: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![BigInt::one(); k + 1];
        for j in 1..k {
            row[j] = &t[k - 1][j - 1] + &t[k - 1][j];
        }
        t.push(row);
    }
    t
}

fn power_sums(e: &BundleExpr, n: u32) -> PowerSums {
    match e {
        BundleExpr::Line(a) => PowerSums::line(n, *a),
        BundleExpr::Tangent => {
            // Euler sequence: (n+1) O(1) - O
            PowerSums::line(n, 1).scale(&BigRational::from_integer((n + 1).into())).add(&PowerSums::constant(
                n,
                -BigRational::one(),
            ))
        }
        BundleExpr::Cotangent => power_sums(&BundleExpr::Tangent, n).dual(),
        BundleExpr::Dual(x) => power_sums(x, n).dual(),
        BundleExpr::Twist(x, a) => power_sums(x, n).twist(*a),
        BundleExpr::Sum(v) => {
            v.iter().fold(PowerSums::constant(n, BigRational::zero()), |acc, x| acc.add(&power_sums(x, n)))
        }
        BundleExpr::Wedge(p, x) => power_sums(x, n).lambda_like(*p, true),
        BundleExpr::Sym(p, x) => power_sums(x, n).lambda_like(*p, false),
    }
}

pub fn chern_total(e: &BundleExpr, n: u32) -> Result<ChernVector, BundleError> {
    let r = e.rank(n)?;
    let rank = u32::try_from(r).map_err(|_| BundleError::Rank(format!("rank {r} too large")))?;
    let c = power_sums(e, n).chern(rank.min(n) as usize + 1)?;
    Ok(ChernVector::new(n, rank, c))
}

/// Degrees of the restriction to a line, largest first.
pub fn line_degrees(e: &BundleExpr, n: u32) -> Result<Vec<i64>, BundleError> {
    e.rank(n)?;
    let mut d = degrees(e, n);
    d.sort_unstable_by(|a, b| b.cmp(a));
    Ok(d)
}

fn degrees(e: &BundleExpr, n: u32) -> Vec<i64> {
    match e {
        BundleExpr::Line(a) => vec![*a],
        BundleExpr::Tangent => {
            let mut v = vec![2];
            v.extend(std::iter::repeat_n(1, n as usize - 1));
            v
        }
        BundleExpr::Cotangent => degrees(&BundleExpr::Tangent, n).into_iter().map(|x| -x).collect(),
        BundleExpr::Dual(x) => degrees(x, n).into_iter().map(|x| -x).collect(),
        BundleExpr::Twist(x, a) => degrees(x, n).into_iter().map(|x| x + a).collect(),
        BundleExpr::Sum(v) => v.iter().flat_map(|x| degrees(x, n)).collect(),
        BundleExpr::Wedge(p, x) => {
            let d = degrees(x, n);
            let mut out = Vec::new();
            subset_sums(&d, *p as usize, 0, 0, false, &mut out);
            out
        }
        BundleExpr::Sym(p, x) => {
            let d = degrees(x, n);
            let mut out = Vec::new();
            subset_sums(&d, *p as usize, 0, 0, true, &mut out);
            out
        }
    }
}

fn subset_sums(d: &[i64], p: usize, start: usize, acc: i64, repeat: bool, out: &mut Vec<i64>) {
    if p == 0 {
        out.push(acc);
        return;
    }
    for i in start..d.len() {
        subset_sums(d, p - 1, if repeat { i } else { i + 1 }, acc + d[i], repeat, out);
    }
}

pub fn restrict_to_line(e: &BundleExpr, n: u32) -> Result<SplittingType, BundleError> {
    let d = line_degrees(e, n)?;
    if d.is_empty() {
        return Err(BundleError::Rank("rank-0 bundle has no splitting type".into()));
    }
    Ok(SplittingType::from_degrees(&d))
}

/// `Σ c_i(E) U^i T^(r-i)`.
pub fn pullback_target(e: &BundleExpr, n: u32) -> Result<GeomPoly, BundleError> {
    let c = chern_total(e, n)?;
    Ok(target_from_chern(&c))
}

pub fn target_from_chern(c: &ChernVector) -> GeomPoly {
    let mut p = GeomPoly::zero();
    for (i, ci) in c.c.iter().enumerate() {
        p = &p + &GeomPoly::int_monomial(ci.clone(), c.rank - i as u32, i as u32, 0);
    }
    p
}

/// Sign of the leading nonzero Chern class, for quick sanity checks.
pub fn leading_sign(c: &ChernVector) -> i32 {
    c.c.iter().skip(1).find(|x| !x.is_zero()).map_or(0, |x| if x.is_positive() { 1 } else { -1 })
}
