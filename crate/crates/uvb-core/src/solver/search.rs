use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::constraints::ConstraintSystem;
use crate::ring::{CoefPoly, Var};

use super::domain::{self, Domain};
use super::gb::{self, Modular};
use super::linear;
use super::resultant::{eliminant, Caps};
use super::roots::integer_roots;

/// Boxed branching tries an eliminant only on domains wider than this...
const ELIM_MIN_WIDTH: i64 = 32;
/// ...and only with at most this many unknowns left.
const ELIM_MAX_VARS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Root propagation and backtracking only.
    Dfs,
    /// Adds linear substitution and bounds propagation.
    Hybrid,
    /// Unbounded search branching on eliminant roots.
    Elim,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Stop {
    Cap,
    Blowup(String),
}

pub(crate) struct Ctx<'a> {
    pub sys: &'a ConstraintSystem,
    pub mode: Mode,
    pub bound: i64,
    pub caps: Caps,
    pub max_solutions: usize,
    pub found: AtomicUsize,
    pub nodes: AtomicU64,
    pub abort: AtomicBool,
}

impl<'a> Ctx<'a> {
    pub fn new(sys: &'a ConstraintSystem, mode: Mode, bound: i64, max_solutions: usize) -> Self {
        Ctx {
            sys,
            mode,
            bound,
            caps: Caps::default(),
            max_solutions,
            found: AtomicUsize::new(0),
            nodes: AtomicU64::new(0),
            abort: AtomicBool::new(false),
        }
    }

    fn boxed(&self) -> bool {
        self.mode != Mode::Elim
    }
}

/// x = num / den, num free of x.
#[derive(Clone, Debug)]
struct Subst {
    var: Var,
    num: CoefPoly,
    den: BigInt,
}

#[derive(Clone, Debug)]
pub(crate) struct State {
    eqs: Vec<CoefPoly>,
    vals: Vec<Option<i64>>,
    dom: Vec<Domain>,
    subs: Vec<Subst>,
    gone: Vec<bool>,
}

impl State {
    pub fn root(ctx: &Ctx) -> State {
        let m = ctx.sys.unknowns.len();
        let dom = if ctx.boxed() { Some((-ctx.bound, ctx.bound)) } else { None };
        State {
            eqs: ctx.sys.equations.clone(),
            vals: vec![None; m],
            dom: vec![dom; m],
            subs: Vec::new(),
            gone: vec![false; m],
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.eqs.is_empty()
    }

    pub fn assign(&mut self, x: Var, v: i64) {
        let b = BigInt::from(v);
        for e in &mut self.eqs {
            if e.contains_var(x) {
                *e = e.eval_var(x, &b);
            }
        }
        self.vals[x] = Some(v);
        self.dom[x] = Some((v, v));
        self.gone[x] = true;
    }

    fn substitute(&mut self, x: Var, num: CoefPoly, den: BigInt) {
        let unit = den.abs().is_one();
        for e in &mut self.eqs {
            if !e.contains_var(x) {
                continue;
            }
            *e = if unit {
                e.substitute(x, &num.scale(&den))
            } else {
                pseudo_substitute(e, x, &num, &den)
            };
        }
        self.subs.push(Subst { var: x, num, den });
        self.dom[x] = None;
        self.gone[x] = true;
    }
}

/// `den^d * e(x = num/den)` with `d` the degree of `e` in `x`.
fn pseudo_substitute(e: &CoefPoly, x: Var, num: &CoefPoly, den: &BigInt) -> CoefPoly {
    let coeffs = e.as_univariate(x);
    let d = coeffs.len() - 1;
    let mut out = CoefPoly::zero();
    let mut npow = CoefPoly::one();
    for (j, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            let dpow = num_traits::pow(den.clone(), d - j);
            out = &out + &(&c.scale(&dpow) * &npow);
        }
        if j < d {
            npow = &npow * num;
        }
    }
    out
}

fn normalize(eqs: Vec<CoefPoly>) -> Option<Vec<CoefPoly>> {
    let mut out = Vec::with_capacity(eqs.len());
    for e in eqs {
        if e.is_zero() {
            continue;
        }
        if e.is_constant() {
            return None;
        }
        out.push(e.primitive());
    }
    out.sort();
    out.dedup();
    Some(out)
}

fn univariate(e: &CoefPoly) -> Option<(Var, Vec<BigInt>)> {
    let vars = e.vars();
    if vars.len() != 1 {
        return None;
    }
    let x = *vars.iter().next().unwrap();
    Some((x, e.as_univariate(x).into_iter().map(|c| c.constant_term()).collect()))
}

fn roots_in(ctx: &Ctx, coeffs: &[BigInt], dom: Domain) -> Result<Vec<i64>, Stop> {
    let (lo, hi) = match dom {
        Some((l, h)) => (Some(l), Some(h)),
        None => (None, None),
    };
    integer_roots(coeffs, lo, hi).map_err(|e| {
        if ctx.boxed() {
            unreachable!("bounded root search cannot blow up: {}", e.0)
        }
        Stop::Blowup(e.0)
    })
}

/// Best `(equation, var, coefficient)` with the equation linear in `var` under a constant coefficient.
fn pick_linear(ctx: &Ctx, eqs: &[CoefPoly]) -> Option<(usize, Var, BigInt)> {
    let mut best: Option<((bool, Reverse<u32>, Reverse<usize>, usize, Var), usize, Var, BigInt)> = None;
    for (i, e) in eqs.iter().enumerate() {
        for x in e.vars() {
            if e.degree_in(x) != 1 {
                continue;
            }
            let c = match e.as_univariate(x)[1].as_constant() {
                Some(c) => c,
                None => continue,
            };
            let u = &ctx.sys.unknowns[x];
            let key = (!c.abs().is_one(), Reverse(u.degree), Reverse(u.factor), e.num_terms(), x);
            if best.as_ref().is_none_or(|b| key < b.0) {
                best = Some((key, i, x, c));
            }
        }
    }
    best.map(|(_, i, x, c)| (i, x, c))
}

/// Runs propagation to a fixpoint; `None` on contradiction.
pub(crate) fn propagate(ctx: &Ctx, mut st: State) -> Result<Option<State>, Stop> {
    loop {
        st.eqs = match normalize(std::mem::take(&mut st.eqs)) {
            Some(e) => e,
            None => return Ok(None),
        };
        if st.eqs.is_empty() {
            return Ok(Some(st));
        }
        let mut forced = None;
        for e in &st.eqs {
            if let Some((x, c)) = univariate(e) {
                let r = roots_in(ctx, &c, st.dom[x])?;
                match r.len() {
                    0 => return Ok(None),
                    1 => {
                        forced = Some((x, r[0]));
                        break;
                    }
                    _ => {}
                }
            }
        }
        if let Some((x, v)) = forced {
            st.assign(x, v);
            continue;
        }
        if ctx.mode == Mode::Dfs {
            return Ok(Some(st));
        }
        if let Some((i, x, c)) = pick_linear(ctx, &st.eqs) {
            let coeffs = st.eqs[i].as_univariate(x);
            let num = -&coeffs[0];
            st.substitute(x, num, c);
            continue;
        }
        let reduced = normalize(linear::reduce(&st.eqs));
        match reduced {
            None => return Ok(None),
            Some(r) if r != st.eqs => {
                st.eqs = r;
                continue;
            }
            Some(_) => {}
        }
        if ctx.mode == Mode::Hybrid {
            if !domain::filter(&st.eqs, &mut st.dom) {
                return Ok(None);
            }
            let mut any = false;
            for x in 0..st.vals.len() {
                if !st.gone[x] {
                    if let Some((lo, hi)) = st.dom[x] {
                        if lo == hi && st.eqs.iter().any(|e| e.contains_var(x)) {
                            st.assign(x, lo);
                            any = true;
                        }
                    }
                }
            }
            if any {
                continue;
            }
        }
        return Ok(Some(st));
    }
}

/// Branching variable and candidate values.
pub(crate) fn choose(ctx: &Ctx, st: &State) -> Result<(Var, Vec<i64>), Stop> {
    let mut best: Option<(Var, Vec<i64>)> = None;
    for e in &st.eqs {
        if let Some((x, c)) = univariate(e) {
            let r = roots_in(ctx, &c, st.dom[x])?;
            if best.as_ref().is_none_or(|b| r.len() < b.1.len()) {
                best = Some((x, r));
            }
        }
    }
    if let Some(b) = best {
        return Ok(b);
    }
    let mut occ: BTreeMap<Var, usize> = BTreeMap::new();
    for e in &st.eqs {
        for x in e.vars() {
            *occ.entry(x).or_default() += 1;
        }
    }
    let wide = occ.keys().any(|&x| st.dom[x].is_some_and(|(lo, hi)| hi - lo > ELIM_MIN_WIDTH));
    if ctx.mode == Mode::Hybrid && wide {
        match gb::candidates(&st.eqs, &st.dom) {
            Modular::Infeasible => return Ok((*occ.keys().next().expect("equations carry unknowns"), Vec::new())),
            Modular::Candidates(c) => {
                let best = c
                    .into_iter()
                    .min_by_key(|(x, vals)| (vals.len(), ctx.sys.unknowns[*x].degree, *x))
                    .expect("equations carry unknowns");
                return Ok(best);
            }
            Modular::Unknown => {}
        }
    }
    let x = occ
        .iter()
        .min_by_key(|&(&x, &n)| (ctx.sys.unknowns[x].degree, Reverse(n), x))
        .map(|(&x, _)| x)
        .expect("equations carry unknowns");
    let values = match st.dom[x] {
        Some((lo, hi)) => {
            let eliminated = (ctx.mode == Mode::Hybrid && hi - lo > ELIM_MIN_WIDTH && occ.len() <= ELIM_MAX_VARS)
                .then(|| eliminant(&st.eqs, x, &ctx.caps).ok())
                .flatten();
            match eliminated {
                Some(e) => roots_in(ctx, &e, st.dom[x])?,
                None => (lo..=hi).collect(),
            }
        }
        None => {
            let e = eliminant(&st.eqs, x, &ctx.caps).map_err(|b| Stop::Blowup(b.0))?;
            roots_in(ctx, &e, None)?
        }
    };
    Ok((x, values))
}

pub(crate) fn search(ctx: &Ctx, st: State, out: &mut Vec<Vec<i64>>) -> Result<(), Stop> {
    if ctx.abort.load(Ordering::Relaxed) {
        return Err(Stop::Cap);
    }
    ctx.nodes.fetch_add(1, Ordering::Relaxed);
    let st = match propagate(ctx, st)? {
        Some(s) => s,
        None => return Ok(()),
    };
    if st.eqs.is_empty() {
        return leaves(ctx, &st, out);
    }
    let (x, values) = choose(ctx, &st)?;
    for v in values {
        let mut child = st.clone();
        child.assign(x, v);
        search(ctx, child, out)?;
    }
    Ok(())
}

/// Enumerates unconstrained unknowns and back-substitutes.
fn leaves(ctx: &Ctx, st: &State, out: &mut Vec<Vec<i64>>) -> Result<(), Stop> {
    let free: Vec<Var> = (0..st.vals.len()).filter(|&x| !st.gone[x]).collect();
    let mut ranges = Vec::with_capacity(free.len());
    for &x in &free {
        match st.dom[x] {
            Some(r) => ranges.push(r),
            None => return Err(Stop::Blowup(format!("unknown {} is unconstrained", ctx.sys.unknowns[x].name))),
        }
    }
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let mut vals = st.vals.clone();
        for (i, &x) in free.iter().enumerate() {
            vals[x] = Some(cur[i]);
        }
        if let Some(t) = reconstruct(ctx, st, vals) {
            out.push(t);
            if ctx.found.fetch_add(1, Ordering::Relaxed) + 1 > ctx.max_solutions {
                ctx.abort.store(true, Ordering::Relaxed);
                return Err(Stop::Cap);
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == free.len() {
                return Ok(());
            }
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = ranges[i].0;
            i += 1;
        }
    }
}

fn reconstruct(ctx: &Ctx, st: &State, vals: Vec<Option<i64>>) -> Option<Vec<i64>> {
    let mut big: Vec<Option<BigInt>> = vals.into_iter().map(|v| v.map(BigInt::from)).collect();
    for s in st.subs.iter().rev() {
        let n = s.num.eval(&big)?;
        let (q, r) = n.div_rem(&s.den);
        if !r.is_zero() {
            return None;
        }
        big[s.var] = Some(q);
    }
    let tuple: Vec<i64> = big.into_iter().map(|v| v.and_then(|x| x.to_i64())).collect::<Option<_>>()?;
    if ctx.boxed() && tuple.iter().any(|x| x.abs() > ctx.bound) {
        return None;
    }
    ctx.sys.check_solution(&tuple).ok().filter(|&ok| ok).map(|_| tuple)
}
