//! Normal forms in `Z[T][U,V] / (R^n(U,V), U^(n+1))`.

use std::collections::BTreeMap;

use crate::ring::{CoefPoly, GeomExp, GeomPoly};

/// `R^n(U,V) = sum_{k=0..n} U^k V^(n-k)`.
pub fn relation(n: u32) -> GeomPoly {
    let mut p = GeomPoly::zero();
    for k in 0..=n {
        p.add_term(GeomExp::new(0, k, n - k), CoefPoly::one());
    }
    p
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChowElement {
    n: u32,
    value: GeomPoly,
}

impl ChowElement {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value(&self) -> &GeomPoly {
        &self.value
    }

    pub fn into_value(self) -> GeomPoly {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn mul(&self, other: &ChowElement) -> ChowElement {
        assert_eq!(self.n, other.n, "mixing Chow rings of different dimension");
        normal_form(&(&self.value * &other.value), self.n)
    }

    /// True when no monomial carries `V`.
    pub fn is_v_free(&self) -> bool {
        self.value.terms().all(|(e, _)| e.v == 0)
    }
}

/// Rewrites `V^n -> -(U V^(n-1) + ... + U^n)` until exhausted and drops `U^(>n)`.
pub fn normal_form(p: &GeomPoly, n: u32) -> ChowElement {
    assert!(n >= 1, "n must be positive");
    let mut work: BTreeMap<(u32, u32, u32), CoefPoly> = BTreeMap::new();
    let mut done = GeomPoly::zero();
    let push = |work: &mut BTreeMap<(u32, u32, u32), CoefPoly>, done: &mut GeomPoly, e: GeomExp, c: CoefPoly| {
        if e.u > n || c.is_zero() {
            return;
        }
        if e.v < n {
            done.add_term(e, c);
        } else {
            let slot = work.entry((e.v, e.u, e.t)).or_default();
            *slot = &*slot + &c;
        }
    };
    for (e, c) in p.terms() {
        push(&mut work, &mut done, *e, c.clone());
    }
    // highest V first so each pending monomial is rewritten once
    while let Some(((v, u, t), c)) = work.pop_last() {
        if c.is_zero() {
            continue;
        }
        let neg = -&c;
        for k in 1..=n {
            push(&mut work, &mut done, GeomExp::new(t, u + k, v - k), neg.clone());
        }
    }
    ChowElement { n, value: done }
}

pub fn chow_equal(a: &GeomPoly, b: &GeomPoly, n: u32) -> bool {
    normal_form(&(a - b), n).is_zero()
}

/// `U^i V^j` for `i <= n`, `j < n`, ordered by degree then `V` exponent.
pub fn chow_basis(n: u32) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = (0..=n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    out.sort_by_key(|&(i, j)| (i + j, j));
    out
}
