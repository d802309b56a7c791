//! Groebner bases modulo a word-sized prime.
//!
//! Every integer solution reduces to a solution modulo `P`, so an inconsistent
//! basis prunes a node, and inside a box narrower than `P` the minimal
//! polynomial of an unknown pins down its admissible values.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::ring::{CoefPoly, Var};

use super::domain::Domain;

pub(crate) const P: u64 = 2_147_483_647;
const NV: usize = 16;
const MAX_BASIS: usize = 600;
const MAX_PAIRS: usize = 20_000;
const MAX_DEGREE: u16 = 60;
const MAX_STD: usize = 400;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Mono {
    deg: u16,
    e: [u8; NV],
}

/// Graded reverse lexicographic order.
impl Ord for Mono {
    fn cmp(&self, o: &Self) -> Ordering {
        self.deg.cmp(&o.deg).then_with(|| {
            for i in (0..NV).rev() {
                if self.e[i] != o.e[i] {
                    return o.e[i].cmp(&self.e[i]);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Mono {
    const ONE: Mono = Mono { deg: 0, e: [0; NV] };

    fn var(i: usize) -> Mono {
        let mut m = Mono::ONE;
        m.e[i] = 1;
        m.deg = 1;
        m
    }

    fn mul(&self, o: &Mono) -> Mono {
        let mut m = *self;
        for i in 0..NV {
            m.e[i] += o.e[i];
        }
        m.deg += o.deg;
        m
    }

    fn divides(&self, o: &Mono) -> bool {
        (0..NV).all(|i| self.e[i] <= o.e[i])
    }

    /// `o / self`, assuming divisibility.
    fn quo(&self, o: &Mono) -> Mono {
        let mut m = *o;
        for i in 0..NV {
            m.e[i] -= self.e[i];
        }
        m.deg -= self.deg;
        m
    }

    fn lcm(&self, o: &Mono) -> Mono {
        let mut m = Mono::ONE;
        for i in 0..NV {
            m.e[i] = self.e[i].max(o.e[i]);
            m.deg += m.e[i] as u16;
        }
        m
    }

    fn coprime(&self, o: &Mono) -> bool {
        (0..NV).all(|i| self.e[i] == 0 || o.e[i] == 0)
    }

    fn pure_power_of(&self) -> Option<usize> {
        let mut nz = (0..NV).filter(|&i| self.e[i] > 0);
        let i = nz.next()?;
        nz.next().is_none().then_some(i)
    }
}

/// Terms in decreasing order, nonzero coefficients below `P`.
type Poly = Vec<(Mono, u64)>;

fn mulm(a: u64, b: u64) -> u64 {
    a * b % P
}

fn inv(a: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a, P - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b);
        }
        b = mulm(b, b);
        e >>= 1;
    }
    r
}

fn monic(mut p: Poly) -> Poly {
    let c = inv(p[0].1);
    for t in &mut p {
        t.1 = mulm(t.1, c);
    }
    p
}

/// `p - c * m * g`.
fn sub_mul(p: &[(Mono, u64)], c: u64, m: &Mono, g: &[(Mono, u64)]) -> Poly {
    let mut out = Vec::with_capacity(p.len() + g.len());
    let (mut i, mut j) = (0, 0);
    while i < p.len() || j < g.len() {
        if j == g.len() {
            out.extend_from_slice(&p[i..]);
            break;
        }
        let gm = m.mul(&g[j].0);
        let gc = P - mulm(c, g[j].1);
        match if i < p.len() { p[i].0.cmp(&gm) } else { Ordering::Less } {
            Ordering::Greater => {
                out.push(p[i]);
                i += 1;
            }
            Ordering::Less => {
                if gc != P {
                    out.push((gm, gc));
                }
                j += 1;
            }
            Ordering::Equal => {
                let v = (p[i].1 + gc) % P;
                if v != 0 {
                    out.push((gm, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Full normal form against monic `basis`.
fn reduce(mut p: Poly, basis: &[Poly]) -> Poly {
    let mut out = Vec::new();
    let mut start = 0;
    while start < p.len() {
        let (m, c) = p[start];
        match basis.iter().find(|g| g[0].0.divides(&m)) {
            Some(g) => {
                p = sub_mul(&p[start..], c, &g[0].0.quo(&m), g);
                start = 0;
            }
            None => {
                out.push((m, c));
                start += 1;
            }
        }
    }
    out
}

fn spoly(f: &Poly, g: &Poly) -> Poly {
    let l = f[0].0.lcm(&g[0].0);
    let a = f[0].0.quo(&l);
    let b = g[0].0.quo(&l);
    let fa: Poly = f.iter().map(|&(m, c)| (m.mul(&a), c)).collect();
    sub_mul(&fa, 1, &b, g)
}

#[derive(Debug)]
enum Gb {
    Inconsistent,
    Basis(Vec<Poly>),
}

/// Reduced basis, or `None` past the size caps.
fn groebner(input: Vec<Poly>) -> Option<Gb> {
    let mut g: Vec<Poly> = Vec::new();
    let mut queue: BTreeSet<(u16, usize, usize)> = BTreeSet::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    fn add(h: Poly, g: &mut Vec<Poly>, queue: &mut BTreeSet<(u16, usize, usize)>, pending: &mut HashSet<(usize, usize)>) -> bool {
        let h = monic(h);
        if h[0].0.deg == 0 {
            return false;
        }
        let k = g.len();
        for (i, gi) in g.iter().enumerate() {
            queue.insert((gi[0].0.lcm(&h[0].0).deg, i, k));
            pending.insert((i, k));
        }
        g.push(h);
        true
    }
    for f in input {
        let h = reduce(f, &g);
        if !h.is_empty() && !add(h, &mut g, &mut queue, &mut pending) {
            return Some(Gb::Inconsistent);
        }
    }
    let mut processed = 0;
    while let Some(&(deg, i, j)) = queue.iter().next() {
        queue.remove(&(deg, i, j));
        pending.remove(&(i, j));
        processed += 1;
        if processed > MAX_PAIRS || g.len() > MAX_BASIS || deg > MAX_DEGREE {
            return None;
        }
        let (li, lj) = (g[i][0].0, g[j][0].0);
        if li.coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let chain = (0..g.len()).any(|k| {
            k != i
                && k != j
                && g[k][0].0.divides(&l)
                && !pending.contains(&key(i, k))
                && !pending.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        let h = reduce(spoly(&g[i], &g[j]), &g);
        if !h.is_empty() && !add(h, &mut g, &mut queue, &mut pending) {
            return Some(Gb::Inconsistent);
        }
    }
    // minimal, then reduced
    let mut keep: Vec<Poly> = Vec::new();
    for (i, gi) in g.iter().enumerate() {
        let lm = gi[0].0;
        let redundant = g.iter().enumerate().any(|(k, gk)| {
            k != i && gk[0].0.divides(&lm) && (gk[0].0 != lm || k < i)
        });
        if !redundant {
            keep.push(gi.clone());
        }
    }
    let reduced = (0..keep.len())
        .map(|i| {
            let others: Vec<Poly> = keep.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, p)| p.clone()).collect();
            let head = keep[i][0];
            let mut tail = reduce(keep[i][1..].to_vec(), &others);
            tail.insert(0, head);
            tail
        })
        .collect();
    Some(Gb::Basis(reduced))
}

/// Monomials outside the leading ideal, or `None` when infinite or too many.
fn standard_monomials(basis: &[Poly], nv: usize) -> Option<Vec<Mono>> {
    let leads: Vec<Mono> = basis.iter().map(|g| g[0].0).collect();
    for v in 0..nv {
        if !leads.iter().any(|m| m.pure_power_of() == Some(v)) {
            return None;
        }
    }
    let mut seen = HashSet::new();
    let mut stack = vec![Mono::ONE];
    seen.insert(Mono::ONE);
    let mut out = Vec::new();
    while let Some(m) = stack.pop() {
        out.push(m);
        if out.len() > MAX_STD {
            return None;
        }
        for v in 0..nv {
            let n = m.mul(&Mono::var(v));
            if !leads.iter().any(|l| l.divides(&n)) && seen.insert(n) {
                stack.push(n);
            }
        }
    }
    Some(out)
}

/// Minimal polynomial of variable `v` on the quotient, low degree first.
fn minimal_polynomial(basis: &[Poly], std: &[Mono], v: usize) -> Vec<u64> {
    let d = std.len();
    let index: HashMap<Mono, usize> = std.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let xv = Mono::var(v);
    let mut rows: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new();
    let mut cur: Poly = vec![(Mono::ONE, 1)];
    for k in 0..=d {
        if k > 0 {
            let shifted: Poly = cur.iter().map(|&(m, c)| (m.mul(&xv), c)).collect();
            cur = reduce(shifted, basis);
        }
        let mut dense = vec![0u64; d];
        for &(m, c) in &cur {
            dense[index[&m]] = c;
        }
        let mut comb = vec![0u64; d + 1];
        comb[k] = 1;
        for (p, rd, rc) in &rows {
            let f = dense[*p];
            if f == 0 {
                continue;
            }
            for (a, b) in dense.iter_mut().zip(rd) {
                *a = (*a + P - mulm(f, *b)) % P;
            }
            for (a, b) in comb.iter_mut().zip(rc) {
                *a = (*a + P - mulm(f, *b)) % P;
            }
        }
        match dense.iter().position(|&x| x != 0) {
            None => {
                comb.truncate(k + 1);
                return comb;
            }
            Some(p) => {
                let s = inv(dense[p]);
                dense.iter_mut().for_each(|x| *x = mulm(*x, s));
                comb.iter_mut().for_each(|x| *x = mulm(*x, s));
                rows.push((p, dense, comb));
            }
        }
    }
    unreachable!("d + 1 vectors in a d-dimensional space are dependent")
}

fn residue(x: i64) -> u64 {
    x.rem_euclid(P as i64) as u64
}

fn eval_mod(c: &[u64], x: i64) -> u64 {
    let x = residue(x);
    c.iter().rev().fold(0, |acc, &a| (mulm(acc, x) + a) % P)
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum Modular {
    /// No solution even modulo `P`.
    Infeasible,
    /// Every unknown with the values its minimal polynomial allows in its domain.
    Candidates(Vec<(Var, Vec<i64>)>),
    /// Positive-dimensional, unbounded or too large.
    Unknown,
}

fn to_mod(e: &CoefPoly, slot: &HashMap<Var, usize>) -> Poly {
    let p = BigInt::from(P);
    let mut out: Poly = e
        .terms()
        .filter_map(|(m, c)| {
            let r = ((c % &p) + &p) % &p;
            let r = r.to_u64().expect("reduced below P");
            (r != 0).then(|| {
                let mut mono = Mono::ONE;
                for (v, k) in m.vars() {
                    mono.e[slot[&v]] = k as u8;
                    mono.deg += k;
                }
                (mono, r)
            })
        })
        .collect();
    out.sort_by(|a, b| b.0.cmp(&a.0));
    out
}

/// Modular information on the integer solutions of `eqs` inside `dom`.
pub(crate) fn candidates(eqs: &[CoefPoly], dom: &[Domain]) -> Modular {
    let vars: BTreeSet<Var> = eqs.iter().flat_map(|e| e.vars()).collect();
    if vars.len() > NV || eqs.iter().any(|e| e.total_degree() > u8::MAX as u32) {
        return Modular::Unknown;
    }
    let slot: HashMap<Var, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let input: Vec<Poly> = eqs.iter().map(|e| to_mod(e, &slot)).filter(|p| !p.is_empty()).collect();
    let basis = match groebner(input) {
        None => return Modular::Unknown,
        Some(Gb::Inconsistent) => return Modular::Infeasible,
        Some(Gb::Basis(b)) => b,
    };
    let std = match standard_monomials(&basis, vars.len()) {
        Some(s) => s,
        None => return Modular::Unknown,
    };
    let mut out = Vec::with_capacity(vars.len());
    for (i, &x) in vars.iter().enumerate() {
        let (lo, hi) = match dom[x] {
            Some(r) if r.1 - r.0 < P as i64 => r,
            _ => return Modular::Unknown,
        };
        let mp = minimal_polynomial(&basis, &std, i);
        let vals: Vec<i64> = (lo..=hi).filter(|&t| eval_mod(&mp, t) == 0).collect();
        if vals.is_empty() {
            return Modular::Infeasible;
        }
        out.push((x, vals));
    }
    Modular::Candidates(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Monomial;

    fn poly(terms: &[(i64, &[u16])]) -> CoefPoly {
        CoefPoly::from_terms(terms.iter().map(|(c, e)| (Monomial::from_exponents(e.to_vec()), BigInt::from(*c))))
    }

    #[test]
    fn circle_and_line() {
        // x^2 + y^2 - 25, x - y - 1: (4, 3) and (-3, -4)
        let eqs = [poly(&[(1, &[2]), (1, &[0, 2]), (-25, &[])]), poly(&[(1, &[1]), (-1, &[0, 1]), (-1, &[])])];
        let dom = [Some((-10, 10)); 2];
        assert_eq!(candidates(&eqs, &dom), Modular::Candidates(vec![(0, vec![-3, 4]), (1, vec![-4, 3])]));
    }

    #[test]
    fn inconsistent_system() {
        // xy - 1, x^2 - 2x + 1, y - 2: forces x = 1 and x = 1/2
        let eqs = [
            poly(&[(1, &[1, 1]), (-1, &[])]),
            poly(&[(1, &[2]), (-2, &[1]), (1, &[])]),
            poly(&[(1, &[0, 1]), (-2, &[])]),
        ];
        assert_eq!(candidates(&eqs, &[Some((-5, 5)); 2]), Modular::Infeasible);
    }

    #[test]
    fn positive_dimension_is_unknown() {
        let eqs = [poly(&[(1, &[1, 1]), (-1, &[0, 0, 1])])];
        assert_eq!(candidates(&eqs, &[Some((-5, 5)); 3]), Modular::Unknown);
    }

    #[test]
    fn cubic_roots_modulo_the_prime() {
        // (x - 1)(x + 2)(x - 7), y^2 - x - 2
        let eqs = [poly(&[(1, &[3]), (-6, &[2]), (-9, &[1]), (14, &[])]), poly(&[(1, &[0, 2]), (-1, &[1]), (-2, &[])])];
        match candidates(&eqs, &[Some((-20, 20)); 2]) {
            Modular::Candidates(c) => {
                assert_eq!(c[0], (0, vec![-2, 1, 7]));
                assert_eq!(c[1], (1, vec![-3, 0, 3]));
            }
            other => panic!("{other:?}"),
        }
    }
}
