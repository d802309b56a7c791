use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest interval scanned when neither a box nor a closed form is available.
const SCAN_LIMIT: i64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RootBlowup(pub String);

pub(crate) fn eval(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn trim(mut c: Vec<BigInt>) -> Vec<BigInt> {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

/// `1 + max |a_i / a_d|`, rounded up.
fn cauchy_bound(c: &[BigInt]) -> BigInt {
    let lead = c.last().expect("non-empty").abs();
    let m = c[..c.len() - 1].iter().map(|x| x.abs()).max().unwrap_or_default();
    BigInt::one() + m.div_ceil(&lead)
}

/// Distinct integer roots in `[lo, hi]` (each side optional), ascending.
pub(crate) fn integer_roots(
    coeffs: &[BigInt],
    lo: Option<i64>,
    hi: Option<i64>,
) -> Result<Vec<i64>, RootBlowup> {
    let mut c = trim(coeffs.to_vec());
    let mut roots = Vec::new();
    if c.is_empty() {
        return Err(RootBlowup("zero polynomial has every integer as a root".into()));
    }
    let inside = |x: i64| lo.is_none_or(|l| x >= l) && hi.is_none_or(|h| x <= h);
    if c[0].is_zero() {
        if inside(0) {
            roots.push(0);
        }
        let k = c.iter().position(|x| !x.is_zero()).expect("nonzero");
        c.drain(..k);
    }
    let push = |roots: &mut Vec<i64>, x: &BigInt| {
        if let Some(x) = x.to_i64() {
            if inside(x) && !roots.contains(&x) {
                roots.push(x);
            }
        }
    };
    match c.len() {
        1 => {}
        2 => {
            let (q, r) = (-&c[0]).div_rem(&c[1]);
            if r.is_zero() {
                push(&mut roots, &q);
            }
        }
        3 => {
            let disc = &c[1] * &c[1] - BigInt::from(4) * &c[2] * &c[0];
            if !disc.is_negative() {
                let s = disc.sqrt();
                if &s * &s == disc {
                    let den = BigInt::from(2) * &c[2];
                    for num in [-&c[1] + &s, -&c[1] - &s] {
                        let (q, r) = num.div_rem(&den);
                        if r.is_zero() {
                            push(&mut roots, &q);
                        }
                    }
                }
            }
        }
        _ => {
            let cb = cauchy_bound(&c);
            let cb = cb.to_i64().unwrap_or(i64::MAX);
            let a = lo.map_or(-cb, |l| l.max(-cb));
            let b = hi.map_or(cb, |h| h.min(cb));
            if b.saturating_sub(a) <= SCAN_LIMIT {
                for x in a..=b {
                    if x == 0 {
                        continue;
                    }
                    let bx = BigInt::from(x);
                    if (&c[0] % &bx).is_zero() && eval(&c, &bx).is_zero() {
                        push(&mut roots, &bx);
                    }
                }
            } else {
                for d in divisors(&c[0])? {
                    for x in [d.clone(), -d] {
                        if eval(&c, &x).is_zero() {
                            push(&mut roots, &x);
                        }
                    }
                }
            }
        }
    }
    roots.sort_unstable();
    Ok(roots)
}

/// Positive divisors by trial division; refuses constants beyond 10^14.
fn divisors(a: &BigInt) -> Result<Vec<BigInt>, RootBlowup> {
    let a = a.abs().to_u64().filter(|&x| x <= 100_000_000_000_000).ok_or_else(|| {
        RootBlowup(format!("constant term with {} bits is too large to factor", a.bits()))
    })?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= a {
        if a % d == 0 {
            small.push(d);
            if d * d != a {
                large.push(a / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small.into_iter().map(BigInt::from).collect())
}
