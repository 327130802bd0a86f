//! Multivariate gcd by recursive primitive pseudo-remainder sequences.
//!
//! The first variable that occurs is taken as the main variable; contents
//! with respect to it are computed recursively in the remaining variables.
//! Two cheaper routes are tried first. Univariate images bound the degree
//! of the gcd in every variable (and often prove it constant), and a
//! heuristic gcd by evaluation at a large integer proposes a candidate,
//! which is accepted only if it divides both inputs and meets every degree
//! bound.

use num::{BigInt, Integer, One, Signed, Zero};

use super::{BigRat, MPoly};

const PROJECTION_ATTEMPTS: i64 = 3;
const HEURISTIC_ATTEMPTS: usize = 6;

/// Gcd over Q, normalized to an integer polynomial with content 1 and
/// positive leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() || b.is_zero() || a.is_constant() || b.is_constant() {
        return gcd_from(a, b, 0).primitive();
    }
    let (a, b) = (a.primitive(), b.primitive());
    let bounds = degree_bounds(&a, &b);
    if bounds.iter().all(|d| *d == Some(0)) {
        return MPoly::one(a.context());
    }
    let vars: Vec<usize> = (0..a.context().len()).filter(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0).collect();
    if let Some(g) = heuristic(&a, &b, &vars) {
        let meets = bounds.iter().enumerate().all(|(v, d)| d.is_some_and(|d| g.degree_in(v) == d as i64));
        if meets {
            return g;
        }
    }
    gcd_from(&a, &b, 0).primitive()
}

/// Upper bounds on the degree of the gcd in each variable, from univariate
/// images at points that keep both leading coefficients nonzero. The gcd
/// specializes to a divisor of each image gcd with the same degree in that
/// variable.
fn degree_bounds(a: &MPoly, b: &MPoly) -> Vec<Option<usize>> {
    let n = a.context().len();
    (0..n)
        .map(|v| {
            let (da, db) = (a.degree_in(v), b.degree_in(v));
            if da <= 0 || db <= 0 {
                return Some(0);
            }
            let (ca, cb) = (a.coeffs_in(v), b.coeffs_in(v));
            let mut best: Option<usize> = None;
            for k in 0..PROJECTION_ATTEMPTS {
                if best == Some(0) {
                    break;
                }
                let point = projection_point(n, k);
                let ua: Vec<BigRat> = ca.iter().map(|c| c.eval(&point)).collect();
                let ub: Vec<BigRat> = cb.iter().map(|c| c.eval(&point)).collect();
                if ua.last().map_or(true, Zero::is_zero) || ub.last().map_or(true, Zero::is_zero) {
                    continue;
                }
                let d = univariate_gcd_degree(ua, ub);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
            best
        })
        .collect()
}

fn projection_point(n: usize, k: i64) -> Vec<BigRat> {
    (0..n).map(|j| BigRat::from_integer((2 + 3 * k + 5 * j as i64 + k * j as i64).into())).collect()
}

fn max_norm(a: &MPoly) -> BigInt {
    a.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_default()
}

/// `a` with `x_v` replaced by the integer `xi`.
fn eval_at(a: &MPoly, v: usize, xi: &BigInt) -> MPoly {
    MPoly::from_terms(
        a.context(),
        a.terms().map(|(m, c)| {
            let mut e = m.exponents().to_vec();
            let k = std::mem::take(&mut e[v]);
            (e, c * BigRat::from_integer(num::pow(xi.clone(), k as usize)))
        }),
    )
}

/// Coefficientwise symmetric remainder modulo `xi`.
fn symmetric_mod(a: &MPoly, xi: &BigInt) -> MPoly {
    let half = xi / 2;
    MPoly::from_terms(
        a.context(),
        a.terms().map(|(m, c)| {
            let mut r = c.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            (m.exponents().to_vec(), BigRat::from_integer(r))
        }),
    )
}

/// Heuristic gcd of primitive integer polynomials in the variables `vars`:
/// the last variable is evaluated at a large integer, the gcd of the images
/// is computed recursively and lifted back by xi-adic expansion. Returns a
/// common divisor, or `None` after a few unlucky evaluations. Coefficients
/// must be integers.
fn heuristic(a: &MPoly, b: &MPoly, vars: &[usize]) -> Option<MPoly> {
    let ctx = a.context();
    let Some((&v, rest)) = vars.split_last() else {
        let g = a.constant_value()?.numer().gcd(b.constant_value()?.numer());
        return Some(MPoly::constant(ctx, BigRat::from_integer(g)));
    };
    // integer contents are split off so the lift sees the full image gcd
    let (ca, cb) = (a.numerator_gcd(), b.numerator_gcd());
    let content = BigRat::from_integer(ca.gcd(&cb));
    let a = &a.scale(&BigRat::from_integer(ca).recip());
    let b = &b.scale(&BigRat::from_integer(cb).recip());
    let bound = max_norm(a).min(max_norm(b));
    let mut xi: BigInt = bound * 2u32 + 29u32;
    for _ in 0..HEURISTIC_ATTEMPTS {
        let (ax, bx) = (eval_at(a, v, &xi), eval_at(b, v, &xi));
        if !ax.is_zero() && !bx.is_zero() {
            if let Some(mut gamma) = heuristic(&ax, &bx, rest) {
                let mut g = MPoly::zero(ctx);
                let mut i = 0u32;
                while !gamma.is_zero() {
                    let gi = symmetric_mod(&gamma, &xi);
                    g = &g + &gi.mul_monomial(&super::Monomial::var(ctx.len(), v, i), &BigRat::one());
                    gamma = (&gamma - &gi).scale(&BigRat::from_integer(xi.clone()).recip());
                    i += 1;
                }
                let g = g.primitive();
                if !g.is_zero() && a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                    return Some(g.scale(&content));
                }
            }
        }
        xi = xi * 73794u32 / 27011u32;
    }
    None
}

/// Sufficient test for `gcd(a, b) = 1`, see [`degree_bounds`].
fn coprime_by_projection(a: &MPoly, b: &MPoly) -> bool {
    degree_bounds(a, b).iter().all(|d| *d == Some(0))
}

/// Degree of the gcd of two dense univariate polynomials over Q with
/// nonzero leading coefficients (coefficients in increasing degree).
fn univariate_gcd_degree(mut f: Vec<BigRat>, mut g: Vec<BigRat>) -> usize {
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        while g.last().is_some_and(Zero::is_zero) {
            g.pop();
        }
        if g.is_empty() {
            return f.len() - 1;
        }
        if g.len() == 1 {
            return 0;
        }
        // f <- f mod g
        let lg = g.last().expect("nonempty").clone();
        while f.len() >= g.len() {
            let q = f.last().expect("nonempty") / &lg;
            let shift = f.len() - g.len();
            for (i, c) in g.iter().enumerate() {
                f[i + shift] -= &q * c;
            }
            f.pop();
            while f.last().is_some_and(Zero::is_zero) {
                f.pop();
            }
        }
        if let Some(lead) = f.last().cloned() {
            let inv = BigRat::one() / lead;
            f.iter_mut().for_each(|c| *c *= &inv);
        }
        std::mem::swap(&mut f, &mut g);
    }
}

fn gcd_from(a: &MPoly, b: &MPoly, start: usize) -> MPoly {
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    let ctx = a.context();
    if a.is_constant() || b.is_constant() || coprime_by_projection(a, b) {
        return MPoly::one(ctx);
    }
    let n = ctx.len();
    let Some(v) = (start..n).find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0) else {
        return MPoly::one(ctx);
    };
    match (a.degree_in(v), b.degree_in(v)) {
        (0, _) => content_fold(a, b, v),
        (_, 0) => content_fold(b, a, v),
        _ => {
            let ca = content(a, v);
            let cb = content(b, v);
            let c = gcd_from(&ca, &cb, v + 1);
            let pa = a.div_exact(&ca).expect("content divides");
            let pb = b.div_exact(&cb).expect("content divides");
            let (mut f, mut g) = if pa.degree_in(v) >= pb.degree_in(v) { (pa, pb) } else { (pb, pa) };
            while !g.is_zero() {
                let r = prem(&f, &g, v);
                f = g;
                g = if r.is_zero() { r } else { primitive_part(&r, v) };
            }
            let h = primitive_part(&f, v);
            (&c * &h).primitive()
        }
    }
}

/// Gcd of `free` (free of `x_v`) with every coefficient of `other` in `x_v`.
fn content_fold(free: &MPoly, other: &MPoly, v: usize) -> MPoly {
    let mut g = free.primitive();
    for c in other.coeffs_in(v) {
        if c.is_zero() {
            continue;
        }
        g = gcd_from(&g, &c, v + 1);
        if g.is_constant() {
            break;
        }
    }
    g
}

/// Content with respect to `x_v`: gcd of the coefficients in the other
/// variables.
pub(crate) fn content(a: &MPoly, v: usize) -> MPoly {
    let mut coeffs = a.coeffs_in(v).into_iter().filter(|c| !c.is_zero());
    let Some(first) = coeffs.next() else {
        return MPoly::zero(a.context());
    };
    let mut g = first.primitive();
    for c in coeffs {
        if g.is_constant() {
            break;
        }
        g = gcd_from(&g, &c, v + 1);
    }
    g
}

fn primitive_part(a: &MPoly, v: usize) -> MPoly {
    let c = content(a, v);
    a.div_exact(&c).expect("content divides").primitive()
}

/// Pseudo-remainder of `a` by `b` in the variable `x_v`.
pub(crate) fn prem(a: &MPoly, b: &MPoly, v: usize) -> MPoly {
    let db = b.degree_in(v);
    let lcb = b.coeff_in(v, db as u32);
    let n = a.context().len();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lcr = r.coeff_in(v, dr as u32);
        let shift = super::Monomial::var(n, v, (dr - db) as u32);
        let lhs = &lcb * &r;
        let rhs = &(&lcr * b).mul_monomial(&shift, &super::BigRat::from_integer(1.into()));
        r = &lhs - rhs;
    }
    r
}
