//! Sparse polynomials over the integers.
//!
//! [`CoefPoly`] lives in `Z[x_0, x_1, ...]` where the `x_i` are named unknowns
//! identified by dense indices. [`GeomPoly`] is a polynomial in the geometric
//! variables `T`, `U`, `V` whose coefficients are `CoefPoly` values.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense index of an unknown inside one system.
pub type Var = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Unknown {
    pub name: String,
    pub id: Var,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("no value assigned to unknown {0}")]
    MissingAssignment(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Exponent vector with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: u16) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut x = vec![0; v + 1];
        x[v] = e;
        Monomial(x)
    }

    pub fn from_exponents(mut e: Vec<u16>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.0.get(v).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() {
            (&self.0, &other.0)
        } else {
            (&other.0, &self.0)
        };
        let mut e = long.clone();
        for (i, x) in short.iter().enumerate() {
            e[i] += x;
        }
        Monomial(e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() && other.0[self.0.len()..].iter().any(|&e| e > 0) {
            return None;
        }
        let mut e = self.0.clone();
        for (i, &x) in other.0.iter().enumerate() {
            if i >= e.len() {
                break;
            }
            if e[i] < x {
                return None;
            }
            e[i] -= x;
        }
        Some(Monomial::from_exponents(e))
    }

    pub fn with_exp(&self, v: Var, e: u16) -> Monomial {
        let mut x = self.0.clone();
        if x.len() <= v {
            x.resize(v + 1, 0);
        }
        x[v] = e;
        Monomial::from_exponents(x)
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u16)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                let c = self.exp(i).cmp(&other.exp(i));
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in the unknowns with integer coefficients, graded-lex ordered.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct CoefPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl CoefPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v, 1), BigInt::one())
    }

    pub fn term(m: Monomial, c: BigInt) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value if this polynomial is a constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_default()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&BigInt> {
        self.terms.get(m)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            s.extend(m.vars().map(|(v, _)| v));
        }
        s
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(|c| c.bits()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &BigInt) -> CoefPoly {
        if c.is_zero() {
            return Self::zero();
        }
        CoefPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigInt) -> CoefPoly {
        if c.is_zero() {
            return Self::zero();
        }
        CoefPoly { terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> CoefPoly {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Gcd of all coefficients, positive; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> CoefPoly {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        let g = match self.leading() {
            Some((_, c)) if c.is_negative() => -g,
            _ => g,
        };
        if g.is_one() {
            return self.clone();
        }
        CoefPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c / &g)).collect() }
    }

    /// Exact division by an integer; `None` if some coefficient is not divisible.
    pub fn div_scalar(&self, d: &BigInt) -> Option<CoefPoly> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            out.insert(m.clone(), q);
        }
        Some(CoefPoly { terms: out })
    }

    /// Substitutes `x_v = value`.
    pub fn eval_var(&self, v: Var, value: &BigInt) -> CoefPoly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let d = self.degree_in(v) as usize;
        let mut pows = Vec::with_capacity(d + 1);
        pows.push(BigInt::one());
        for i in 0..d {
            let next = &pows[i] * value;
            pows.push(next);
        }
        let mut out = CoefPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            if e == 0 {
                out.add_term(m.clone(), c.clone());
            } else if !value.is_zero() {
                out.add_term(m.with_exp(v, 0), c * &pows[e]);
            }
        }
        out
    }

    /// Full evaluation; `values[v]` must be present for every occurring unknown.
    pub fn eval(&self, values: &[Option<BigInt>]) -> Option<BigInt> {
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.vars() {
                let x = values.get(v)?.as_ref()?;
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Partial evaluation with whatever values are present.
    pub fn eval_partial(&self, values: &[Option<BigInt>]) -> CoefPoly {
        let mut out = CoefPoly::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            let mut rest = m.clone();
            for (v, e) in m.vars() {
                if let Some(Some(x)) = values.get(v) {
                    t *= num_traits::pow(x.clone(), e as usize);
                    rest = rest.with_exp(v, 0);
                }
            }
            out.add_term(rest, t);
        }
        out
    }

    /// Substitutes `x_v = q`.
    pub fn substitute(&self, v: Var, q: &CoefPoly) -> CoefPoly {
        let coeffs = self.as_univariate(v);
        // Horner in q
        let mut acc = CoefPoly::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * q) + c;
        }
        acc
    }

    /// Coefficients in `x_v`, lowest power first; the coefficients do not contain `x_v`.
    pub fn as_univariate(&self, v: Var) -> Vec<CoefPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![CoefPoly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            out[e].terms.insert(m.with_exp(v, 0), c.clone());
        }
        out
    }

    pub fn from_univariate(v: Var, coeffs: &[CoefPoly]) -> CoefPoly {
        let mut out = CoefPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            for (m, x) in &c.terms {
                out.add_term(m.mul(&Monomial::var(v, e as u16)), x.clone());
            }
        }
        out
    }

    /// Exact division `self / d`; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &CoefPoly) -> Option<CoefPoly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return self.div_scalar(&c);
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut q = CoefPoly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let (qc, r) = c.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            rem = &rem - &d.mul_monomial(&qm, &qc);
            q.add_term(qm, qc);
        }
        Some(q)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono: String = m
                .vars()
                .map(|(v, e)| {
                    let name = names.get(v).cloned().unwrap_or_else(|| format!("x{v}"));
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect::<Vec<_>>()
                .join("*");
            write_signed_term(&mut s, c, &mono, i == 0, "*");
        }
        s
    }
}

/// Appends `c*mono` with sign handling; `mono` may be empty.
fn write_signed_term(s: &mut String, c: &BigInt, mono: &str, first: bool, sep: &str) {
    let neg = c.is_negative();
    if neg {
        s.push('-');
    } else if !first {
        s.push('+');
    }
    let a = c.abs();
    if mono.is_empty() {
        let _ = write!(s, "{a}");
    } else if a.is_one() {
        s.push_str(mono);
    } else {
        let _ = write!(s, "{a}{sep}{mono}");
    }
}

impl fmt::Display for CoefPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

impl<'a> Add<&'a CoefPoly> for &'a CoefPoly {
    type Output = CoefPoly;
    fn add(self, rhs: &CoefPoly) -> CoefPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a CoefPoly> for &'a CoefPoly {
    type Output = CoefPoly;
    fn sub(self, rhs: &CoefPoly) -> CoefPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a CoefPoly> for &'a CoefPoly {
    type Output = CoefPoly;
    fn mul(self, rhs: &CoefPoly) -> CoefPoly {
        let mut out = CoefPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &CoefPoly {
    type Output = CoefPoly;
    fn neg(self) -> CoefPoly {
        CoefPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

/// Exponents of `T^t U^u V^v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeomExp {
    pub t: u32,
    pub u: u32,
    pub v: u32,
}

impl GeomExp {
    pub const fn new(t: u32, u: u32, v: u32) -> Self {
        GeomExp { t, u, v }
    }

    pub fn degree(&self) -> u32 {
        self.t + self.u + self.v
    }
}

// graded, then T > V > U
impl Ord for GeomExp {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then(self.t.cmp(&o.t))
            .then(self.v.cmp(&o.v))
            .then(self.u.cmp(&o.u))
    }
}

impl PartialOrd for GeomExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GeomPoly {
    terms: BTreeMap<GeomExp, CoefPoly>,
}

impl GeomPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(GeomExp::new(0, 0, 0), CoefPoly::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(GeomExp::new(0, 0, 0), CoefPoly::constant(c))
    }

    pub fn t() -> Self {
        Self::monomial(GeomExp::new(1, 0, 0), CoefPoly::one())
    }

    pub fn u() -> Self {
        Self::monomial(GeomExp::new(0, 1, 0), CoefPoly::one())
    }

    pub fn v() -> Self {
        Self::monomial(GeomExp::new(0, 0, 1), CoefPoly::one())
    }

    pub fn monomial(e: GeomExp, c: CoefPoly) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// `c * T^t U^u V^v` with an integer coefficient.
    pub fn int_monomial(c: impl Into<BigInt>, t: u32, u: u32, v: u32) -> Self {
        Self::monomial(GeomExp::new(t, u, v), CoefPoly::constant(c))
    }

    pub fn add_term(&mut self, e: GeomExp, c: CoefPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(x) => {
                x.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut x) => {
                let s = x.get() + &c;
                if s.is_zero() {
                    x.remove();
                } else {
                    *x.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&GeomExp, &CoefPoly)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<GeomExp, CoefPoly> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn deg_t(&self) -> u32 {
        self.terms.keys().map(|e| e.t).max().unwrap_or(0)
    }

    pub fn deg_u(&self) -> u32 {
        self.terms.keys().map(|e| e.u).max().unwrap_or(0)
    }

    pub fn deg_v(&self) -> u32 {
        self.terms.keys().map(|e| e.v).max().unwrap_or(0)
    }

    pub fn coefficient_of(&self, t: u32, u: u32, v: u32) -> CoefPoly {
        self.terms.get(&GeomExp::new(t, u, v)).cloned().unwrap_or_default()
    }

    /// True when every coefficient is an integer constant.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(CoefPoly::is_constant)
    }

    pub fn scale(&self, c: &CoefPoly) -> GeomPoly {
        let mut out = GeomPoly::zero();
        for (e, x) in &self.terms {
            out.add_term(*e, x * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> GeomPoly {
        let mut acc = GeomPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `T <- T + c*U`.
    pub fn shift_t(&self, c: i64) -> GeomPoly {
        if c == 0 {
            return self.clone();
        }
        let c = BigInt::from(c);
        let mut out = GeomPoly::zero();
        for (e, x) in &self.terms {
            // (T + cU)^t = sum binom(t,j) c^j U^j T^(t-j)
            let mut binom = BigInt::one();
            let mut cj = BigInt::one();
            for j in 0..=e.t {
                let f = &binom * &cj;
                out.add_term(GeomExp::new(e.t - j, e.u + j, e.v), x.scale(&f));
                binom = binom * BigInt::from(e.t - j) / BigInt::from(j + 1);
                cj *= &c;
            }
        }
        out
    }

    /// Substitutes `T <- -T`.
    pub fn negate_t(&self) -> GeomPoly {
        let mut out = GeomPoly::zero();
        for (e, x) in &self.terms {
            out.add_term(*e, if e.t % 2 == 1 { -x } else { x.clone() });
        }
        out
    }

    /// Swaps `U` and `V`.
    pub fn swap_uv(&self) -> GeomPoly {
        let mut out = GeomPoly::zero();
        for (e, x) in &self.terms {
            out.add_term(GeomExp::new(e.t, e.v, e.u), x.clone());
        }
        out
    }

    /// Replaces unknowns by integers; with `partial == false` every unknown must be covered.
    pub fn eval_unknowns(
        &self,
        values: &[Option<BigInt>],
        names: &[String],
        partial: bool,
    ) -> Result<GeomPoly, RingError> {
        let mut out = GeomPoly::zero();
        for (e, x) in &self.terms {
            let y = x.eval_partial(values);
            if !partial && !y.is_constant() {
                let v = *y.vars().iter().next().expect("non-constant has a variable");
                let name = names.get(v).cloned().unwrap_or_else(|| format!("x{v}"));
                return Err(RingError::MissingAssignment(name));
            }
            out.add_term(*e, y);
        }
        Ok(out)
    }

    /// Unknowns occurring in any coefficient.
    pub fn unknowns(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for c in self.terms.values() {
            s.extend(c.vars());
        }
        s
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        // group by T power, highest first; inside a group U-power descending
        let mut groups: BTreeMap<u32, Vec<(GeomExp, &CoefPoly)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            groups.entry(e.t).or_default().push((*e, c));
        }
        let mut s = String::new();
        let mut first = true;
        for (&t, items) in groups.iter().rev() {
            let mut items = items.clone();
            items.sort_by(|a, b| (b.0.u + b.0.v).cmp(&(a.0.u + a.0.v)).then(b.0.u.cmp(&a.0.u)));
            let tpart = power("T", t);
            let single = items.len() == 1 && items[0].1.is_constant();
            if single {
                let (e, c) = items[0];
                let c = c.constant_term();
                let mono = format!("{}{}{}", power("U", e.u), power("V", e.v), tpart);
                write_signed_term(&mut s, &c, &mono, first, "");
            } else if tpart.is_empty() {
                let inner = uv_poly(&items, names);
                if !first && !inner.starts_with('-') {
                    s.push('+');
                }
                s.push_str(&inner);
            } else {
                if !first {
                    s.push('+');
                }
                let _ = write!(s, "({}){}", uv_poly(&items, names), tpart);
            }
            first = false;
        }
        s
    }
}

fn power(x: &str, e: u32) -> String {
    match e {
        0 => String::new(),
        1 => x.to_string(),
        _ => format!("{x}^{e}"),
    }
}

fn uv_poly(items: &[(GeomExp, &CoefPoly)], names: &[String]) -> String {
    let mut s = String::new();
    for (i, (e, c)) in items.iter().enumerate() {
        let mono = format!("{}{}", power("U", e.u), power("V", e.v));
        if let Some(k) = c.as_constant() {
            write_signed_term(&mut s, &k, &mono, i == 0, "");
        } else {
            if i > 0 {
                s.push('+');
            }
            let _ = write!(s, "({})", c.display_with(names));
            s.push_str(&mono);
        }
    }
    s
}

impl fmt::Display for GeomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}

impl<'a> Add<&'a GeomPoly> for &'a GeomPoly {
    type Output = GeomPoly;
    fn add(self, rhs: &GeomPoly) -> GeomPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a GeomPoly> for &'a GeomPoly {
    type Output = GeomPoly;
    fn sub(self, rhs: &GeomPoly) -> GeomPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<'a> Mul<&'a GeomPoly> for &'a GeomPoly {
    type Output = GeomPoly;
    fn mul(self, rhs: &GeomPoly) -> GeomPoly {
        let mut out = GeomPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(GeomExp::new(e1.t + e2.t, e1.u + e2.u, e1.v + e2.v), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &GeomPoly {
    type Output = GeomPoly;
    fn neg(self) -> GeomPoly {
        let mut out = GeomPoly::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

/// Parses integer polynomials in `T`, `U`, `V`, e.g. `"T^2+(U-V)T-UV"` or `"3*U^2*V"`.
pub fn parse_geom(text: &str) -> Result<GeomPoly, RingError> {
    let mut p = GeomParser { s: text.as_bytes(), i: 0 };
    let out = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct GeomParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl GeomParser<'_> {
    fn err(&self, msg: &str) -> RingError {
        RingError::Parse { pos: self.i, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<GeomPoly, RingError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.i += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.i += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.i += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<GeomPoly, RingError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(c) if c == b'(' || c.is_ascii_digit() || b"TUV".contains(&c) => {
                    acc = &acc * &self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<GeomPoly, RingError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            self.ws();
            let e = self.number()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent out of range"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<BigInt, RingError> {
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected a number"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.i]).expect("ascii digits");
        txt.parse().map_err(|_| self.err("bad number"))
    }

    fn atom(&mut self) -> Result<GeomPoly, RingError> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(b'T') => {
                self.i += 1;
                Ok(GeomPoly::t())
            }
            Some(b'U') => {
                self.i += 1;
                Ok(GeomPoly::u())
            }
            Some(b'V') => {
                self.i += 1;
                Ok(GeomPoly::v())
            }
            Some(c) if c.is_ascii_digit() => Ok(GeomPoly::constant(self.number()?)),
            _ => Err(self.err("expected T, U, V, a number or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> GeomPoly {
        parse_geom(s).unwrap()
    }

    #[test]
    fn cancellation_and_identity() {
        assert_eq!(&p("T+U") + &p("T-U"), p("2T"));
        let q = p("3T^2U - V + 7");
        assert_eq!(&q + &GeomPoly::zero(), q);
        assert_eq!(&q * &GeomPoly::one(), q);
        assert!((&q * &GeomPoly::zero()).is_zero());
    }

    #[test]
    fn products_render_in_grouped_form() {
        let a = &p("T+U") * &p("T-V");
        assert_eq!(a.to_string(), "T^2+(U-V)T-UV");
        let b = &(&p("T+U") * &p("T+U")) * &p("T-V");
        assert_eq!(b, p("T^3+(2U-V)T^2+(U^2-2UV)T-U^2V"));
        assert_eq!(a.coefficient_of(1, 0, 1), CoefPoly::constant(-1));
        assert_eq!(p("(T+U)^2").coefficient_of(1, 1, 0), CoefPoly::constant(2));
        assert!(a.coefficient_of(5, 0, 0).is_zero());
    }

    #[test]
    fn shift_examples() {
        assert_eq!(p("T^3").shift_t(1), p("T^3+3UT^2+3U^2T+U^3"));
        assert_eq!(p("T").shift_t(2), p("T+2U"));
        let q = p("T^2V - 4UT + 1");
        assert_eq!(q.shift_t(0), q);
        assert_eq!(q.shift_t(3).shift_t(-5), q.shift_t(-2));
    }

    #[test]
    fn eval_with_unknowns() {
        let a = 0usize;
        let s1 = &GeomPoly::t() + &p("U+V").scale(&CoefPoly::var(a));
        let names = vec!["a".to_string()];
        let e = s1.eval_unknowns(&[Some(BigInt::from(-2))], &names, false).unwrap();
        assert_eq!(e, p("T-2U-2V"));
        let err = s1.eval_unknowns(&[None], &names, false).unwrap_err();
        assert_eq!(err, RingError::MissingAssignment("a".into()));
        // a*b with a = 0 vanishes whatever b is
        let ab = GeomPoly::monomial(GeomExp::new(0, 0, 0), &CoefPoly::var(0) * &CoefPoly::var(1));
        assert!(ab.eval_unknowns(&[Some(BigInt::zero()), None], &[], true).unwrap().is_zero());
    }

    #[test]
    fn symmetric_coefficient_display() {
        let q = &p("U^2+V^2") + &p("UV");
        assert_eq!(q, p("U^2+UV+V^2"));
    }

    #[test]
    fn exact_division_and_substitution() {
        let x = CoefPoly::var(0);
        let y = CoefPoly::var(1);
        let f = &(&x + &y) * &(&x - &y);
        assert_eq!(f.div_exact(&(&x - &y)), Some(&x + &y));
        assert_eq!(f.div_exact(&(&x + &CoefPoly::one())), None);
        let g = f.substitute(1, &CoefPoly::constant(2));
        assert_eq!(g, &x.pow(2) - &CoefPoly::constant(4));
    }

    #[test]
    fn parse_errors_report_position() {
        match parse_geom("T+*U") {
            Err(RingError::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
    }
}
