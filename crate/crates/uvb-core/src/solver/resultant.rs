use num_bigint::BigInt;

use crate::ring::{CoefPoly, Var};

/// Limits beyond which elimination gives up.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Caps {
    pub max_degree: u32,
    pub max_bits: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_degree: 32, max_bits: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Blowup(pub String);

/// Sylvester resultant in `x` via fraction-free Gaussian elimination.
pub(crate) fn resultant(a: &CoefPoly, b: &CoefPoly, x: Var) -> CoefPoly {
    let ca = a.as_univariate(x);
    let cb = b.as_univariate(x);
    let (m, l) = (ca.len() - 1, cb.len() - 1);
    if m == 0 {
        return a.pow(l as u32);
    }
    if l == 0 {
        return b.pow(m as u32);
    }
    let size = m + l;
    let mut mat = vec![vec![CoefPoly::zero(); size]; size];
    for i in 0..l {
        for (j, c) in ca.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in cb.iter().rev().enumerate() {
            mat[l + i][i + j] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut m: Vec<Vec<CoefPoly>>) -> CoefPoly {
    let n = m.len();
    let mut sign = false;
    let mut prev = CoefPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = !sign;
                }
                None => return CoefPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -&d
    } else {
        d
    }
}

fn within(p: &CoefPoly, caps: &Caps) -> Result<(), Blowup> {
    if p.total_degree() > caps.max_degree {
        return Err(Blowup(format!("total degree {} exceeds {}", p.total_degree(), caps.max_degree)));
    }
    if p.max_coeff_bits() > caps.max_bits {
        return Err(Blowup(format!("coefficient size {} bits exceeds {}", p.max_coeff_bits(), caps.max_bits)));
    }
    Ok(())
}

/// A nonzero polynomial in `x` alone vanishing at the `x`-coordinate of every common zero.
pub(crate) fn eliminant(eqs: &[CoefPoly], x: Var, caps: &Caps) -> Result<Vec<BigInt>, Blowup> {
    let mut sys: Vec<CoefPoly> = eqs.iter().filter(|e| !e.is_zero()).map(|e| e.primitive()).collect();
    loop {
        if let Some(u) = sys
            .iter()
            .filter(|e| e.contains_var(x) && e.vars().len() == 1)
            .min_by_key(|e| (e.degree_in(x), e.max_coeff_bits()))
        {
            return Ok(u.as_univariate(x).into_iter().map(|c| c.constant_term()).collect());
        }
        let mut others: Vec<Var> = sys.iter().flat_map(|e| e.vars()).filter(|&v| v != x).collect();
        others.sort_unstable();
        others.dedup();
        let y = others
            .iter()
            .copied()
            .min_by_key(|&y| {
                let with: Vec<&CoefPoly> = sys.iter().filter(|e| e.contains_var(y)).collect();
                let deg = with.iter().map(|e| e.degree_in(y)).max().unwrap_or(0);
                (deg, with.len(), y)
            })
            .ok_or_else(|| Blowup("no equation constrains the branch variable".into()))?;
        let (with, mut rest): (Vec<CoefPoly>, Vec<CoefPoly>) = sys.into_iter().partition(|e| e.contains_var(y));
        if with.len() > 1 {
            let pivot = with
                .iter()
                .enumerate()
                .min_by_key(|(_, e)| (e.degree_in(y), e.num_terms()))
                .map(|(i, _)| i)
                .expect("non-empty");
            for (i, q) in with.iter().enumerate() {
                if i == pivot {
                    continue;
                }
                // Bezout bound on the resultant's total degree
                let predicted = with[pivot].degree_in(y) as u32 * q.total_degree()
                    + q.degree_in(y) as u32 * with[pivot].total_degree();
                if predicted > 2 * caps.max_degree {
                    return Err(Blowup(format!("resultant degree up to {predicted} expected")));
                }
                let r = resultant(&with[pivot], q, y);
                if r.is_zero() {
                    continue;
                }
                let r = r.primitive();
                within(&r, caps)?;
                if r.is_constant() {
                    // no common zero at all
                    return Ok(vec![BigInt::from(1)]);
                }
                rest.push(r);
            }
        }
        rest.sort();
        rest.dedup();
        if !rest.iter().any(|e| e.contains_var(x)) {
            return Err(Blowup("elimination lost the branch variable".into()));
        }
        sys = rest;
    }
}
