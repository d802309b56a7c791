//! Bounds propagation over integer boxes.
//!
//! Each equation is split into its univariate parts, a constant and mixed
//! monomials. Univariate parts get tight ranges, mixed monomials get interval
//! ranges, and every variable whose univariate part cannot reach the negated
//! range of the rest is trimmed from both ends.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::ring::{CoefPoly, Var};

use super::roots::eval;

/// Width up to which a univariate range is found by evaluating every point.
const EXACT_WIDTH: i64 = 256;
/// Endpoint steps tried per variable and pass.
const TRIM_STEPS: i64 = 4096;
const MAX_PASSES: usize = 12;

pub(crate) type Domain = Option<(i64, i64)>;

#[derive(Clone, Debug)]
struct Range {
    lo: BigInt,
    hi: BigInt,
}

impl Range {
    fn point(x: BigInt) -> Range {
        Range { lo: x.clone(), hi: x }
    }

    fn add(&self, o: &Range) -> Range {
        Range { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    fn mul(&self, o: &Range) -> Range {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        Range { lo: c.iter().min().unwrap().clone(), hi: c.iter().max().unwrap().clone() }
    }
}

fn power_range(lo: i64, hi: i64, e: u16) -> Range {
    let a = num_traits::pow(BigInt::from(lo), e as usize);
    let b = num_traits::pow(BigInt::from(hi), e as usize);
    if e.is_multiple_of(2) && lo <= 0 && hi >= 0 {
        Range { lo: BigInt::zero(), hi: a.max(b) }
    } else {
        Range { lo: a.clone().min(b.clone()), hi: a.max(b) }
    }
}

/// Range of `sum c_e x^e` over the integers of `[lo, hi]`, possibly loose for wide cubic and higher parts.
fn univariate_range(c: &[BigInt], lo: i64, hi: i64) -> Range {
    let deg = c.len() - 1;
    if hi - lo <= EXACT_WIDTH {
        let vals: Vec<BigInt> = (lo..=hi).map(|x| eval(c, &BigInt::from(x))).collect();
        return Range { lo: vals.iter().min().unwrap().clone(), hi: vals.iter().max().unwrap().clone() };
    }
    if deg <= 2 {
        let mut pts = vec![lo, hi];
        if deg == 2 && !c[2].is_zero() {
            // vertex at -c1 / (2 c2)
            let v = (-&c[1]).div_floor(&(BigInt::from(2) * &c[2]));
            for d in [0i64, 1] {
                let x = v.clone() + d;
                if x >= BigInt::from(lo) && x <= BigInt::from(hi) {
                    pts.push(i64::try_from(x).expect("inside an i64 box"));
                }
            }
        }
        let vals: Vec<BigInt> = pts.iter().map(|&x| eval(c, &BigInt::from(x))).collect();
        return Range { lo: vals.iter().min().unwrap().clone(), hi: vals.iter().max().unwrap().clone() };
    }
    let mut r = Range::point(c[0].clone());
    for (e, ce) in c.iter().enumerate().skip(1) {
        if !ce.is_zero() {
            r = r.add(&Range::point(ce.clone()).mul(&power_range(lo, hi, e as u16)));
        }
    }
    r
}

struct Split {
    constant: BigInt,
    parts: BTreeMap<Var, Vec<BigInt>>,
    mixed: Vec<(Vec<(Var, u16)>, BigInt)>,
}

fn split(eq: &CoefPoly) -> Split {
    let mut s = Split { constant: BigInt::zero(), parts: BTreeMap::new(), mixed: Vec::new() };
    for (m, c) in eq.terms() {
        let vars: Vec<(Var, u16)> = m.vars().collect();
        match vars.len() {
            0 => s.constant += c,
            1 => {
                let (v, e) = vars[0];
                let part = s.parts.entry(v).or_default();
                if part.len() <= e as usize {
                    part.resize(e as usize + 1, BigInt::zero());
                }
                part[e as usize] += c;
            }
            _ => s.mixed.push((vars, c.clone())),
        }
    }
    s
}

/// Shrinks `dom` in place; false when some equation has no zero in the box.
pub(crate) fn filter(eqs: &[CoefPoly], dom: &mut [Domain]) -> bool {
    let splits: Vec<Split> = eqs.iter().map(split).collect();
    for _ in 0..MAX_PASSES {
        let mut changed = false;
        for s in &splits {
            let bounded = s.parts.keys().all(|&v| dom[v].is_some())
                && s.mixed.iter().all(|(vs, _)| vs.iter().all(|&(v, _)| dom[v].is_some()));
            if !bounded {
                continue;
            }
            let mut total = Range::point(s.constant.clone());
            for (vs, c) in &s.mixed {
                let mut r = Range::point(c.clone());
                for &(v, e) in vs {
                    let (lo, hi) = dom[v].unwrap();
                    r = r.mul(&power_range(lo, hi, e));
                }
                total = total.add(&r);
            }
            let ranges: Vec<(Var, Range)> = s
                .parts
                .iter()
                .map(|(&v, c)| {
                    let (lo, hi) = dom[v].unwrap();
                    (v, univariate_range(c, lo, hi))
                })
                .collect();
            for (_, r) in &ranges {
                total = total.add(r);
            }
            if total.lo > BigInt::zero() || total.hi < BigInt::zero() {
                return false;
            }
            for (v, r) in &ranges {
                // g_v(x) must lie in [-(rest max), -(rest min)]
                let need_lo = -(&total.hi - &r.hi);
                let need_hi = -(&total.lo - &r.lo);
                if r.lo >= need_lo && r.hi <= need_hi {
                    continue;
                }
                let c = &s.parts[v];
                let ok = |x: i64| {
                    let y = eval(c, &BigInt::from(x));
                    y >= need_lo && y <= need_hi
                };
                let (mut lo, mut hi) = dom[*v].unwrap();
                let (lo0, hi0) = (lo, hi);
                let mut steps = 0;
                while lo <= hi && steps < TRIM_STEPS && !ok(lo) {
                    lo += 1;
                    steps += 1;
                }
                steps = 0;
                while lo <= hi && steps < TRIM_STEPS && !ok(hi) {
                    hi -= 1;
                    steps += 1;
                }
                if lo > hi {
                    return false;
                }
                if (lo, hi) != (lo0, hi0) {
                    dom[*v] = Some((lo, hi));
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Monomial;

    fn poly(terms: &[(i64, &[u16])]) -> CoefPoly {
        CoefPoly::from_terms(terms.iter().map(|(c, e)| (Monomial::from_exponents(e.to_vec()), BigInt::from(*c))))
    }

    #[test]
    fn definite_quadric_bounds_every_variable() {
        // 4a^2 + 16a + 3b^2 + 9b + 2c^2 + 4c + d^2 + d
        let q = poly(&[
            (4, &[2]),
            (16, &[1]),
            (3, &[0, 2]),
            (9, &[0, 1]),
            (2, &[0, 0, 2]),
            (4, &[0, 0, 1]),
            (1, &[0, 0, 0, 2]),
            (1, &[0, 0, 0, 1]),
        ]);
        let mut dom = vec![Some((-200, 200)); 4];
        assert!(filter(&[q], &mut dom));
        assert_eq!(dom[0], Some((-4, 0)));
        for d in &dom {
            let (lo, hi) = d.unwrap();
            assert!(hi - lo <= 9, "{d:?}");
        }
    }

    #[test]
    fn infeasible_box() {
        // x^2 + y^2 + 1
        let q = poly(&[(1, &[2]), (1, &[0, 2]), (1, &[])]);
        let mut dom = vec![Some((-5, 5)); 2];
        assert!(!filter(&[q], &mut dom));
    }

    #[test]
    fn mixed_terms_are_respected() {
        // x^2 + xy - 40 with x, y in [-3, 3]: x^2 >= 31 is out of reach
        let q = poly(&[(1, &[2]), (1, &[1, 1]), (-40, &[])]);
        let mut dom = vec![Some((-3, 3)), Some((-3, 3))];
        assert!(!filter(std::slice::from_ref(&q), &mut dom));
        let mut dom = vec![Some((-10, 10)), Some((-3, 3))];
        assert!(filter(&[q], &mut dom));
        assert_eq!(dom[0], Some((-8, 8)));
        let q = poly(&[(1, &[2]), (1, &[1, 1]), (-40, &[]), (1, &[0, 2])]);
        let mut dom = vec![Some((-10, 10)), Some((-1, 1))];
        assert!(filter(&[q], &mut dom));
        assert_eq!(dom[0], Some((-6, 6)));
    }
}
