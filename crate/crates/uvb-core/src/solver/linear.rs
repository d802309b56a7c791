//! Reduced row echelon form of an equation set, monomials as columns in graded order.

use num_integer::Integer;

use crate::ring::{CoefPoly, Monomial};

/// `a*p - b*q` with `a, b` chosen to cancel the `m` coefficient of `p`, made primitive.
fn cancel(p: &CoefPoly, q: &CoefPoly, m: &Monomial) -> CoefPoly {
    let cp = p.coeff(m).expect("monomial present").clone();
    let cq = q.coeff(m).expect("pivot present").clone();
    let g = cp.gcd(&cq);
    let out = &p.scale(&(&cq / &g)) - &q.scale(&(&cp / &g));
    out.primitive()
}

/// Same zero set, every leading monomial distinct and absent from the other rows.
pub(crate) fn reduce(eqs: &[CoefPoly]) -> Vec<CoefPoly> {
    let mut basis: Vec<CoefPoly> = Vec::with_capacity(eqs.len());
    for e in eqs {
        let mut p = e.primitive();
        while let Some(lm) = p.leading().map(|(m, _)| m.clone()) {
            match basis.iter().find(|b| b.leading().map(|(m, _)| m) == Some(&lm)) {
                Some(b) => p = cancel(&p, b, &lm),
                None => break,
            }
        }
        if !p.is_zero() {
            basis.push(p);
        }
    }
    // back substitution, smallest leading monomials first
    basis.sort_by(|a, b| a.leading().map(|x| x.0).cmp(&b.leading().map(|x| x.0)));
    for i in 0..basis.len() {
        let lm = basis[i].leading().expect("nonzero").0.clone();
        for j in i + 1..basis.len() {
            if basis[j].coeff(&lm).is_some() {
                basis[j] = cancel(&basis[j], &basis[i], &lm);
            }
        }
    }
    for i in (0..basis.len()).rev() {
        let lm = basis[i].leading().expect("nonzero").0.clone();
        for j in 0..i {
            if basis[j].coeff(&lm).is_some() {
                basis[j] = cancel(&basis[j], &basis[i], &lm);
            }
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn poly(terms: &[(i64, &[u16])]) -> CoefPoly {
        CoefPoly::from_terms(terms.iter().map(|(c, e)| (Monomial::from_exponents(e.to_vec()), BigInt::from(*c))))
    }

    #[test]
    fn quadratic_parts_cancel() {
        // x^2 + y - 3, x^2 - y + 1  ->  x^2 - 1, y - 2
        let a = poly(&[(1, &[2]), (1, &[0, 1]), (-3, &[])]);
        let b = poly(&[(1, &[2]), (-1, &[0, 1]), (1, &[])]);
        let mut r = reduce(&[a, b]);
        r.sort();
        let mut want = vec![poly(&[(1, &[2]), (-1, &[])]), poly(&[(1, &[0, 1]), (-2, &[])])];
        want.sort();
        assert_eq!(r, want);
    }

    #[test]
    fn dependent_rows_vanish() {
        let a = poly(&[(2, &[1, 1]), (4, &[])]);
        let b = poly(&[(1, &[1, 1]), (2, &[])]);
        assert_eq!(reduce(&[a, b]).len(), 1);
    }
}
