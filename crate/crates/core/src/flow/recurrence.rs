//! Berlekamp-Massey over the rational function field.

use num::Zero;

use crate::arith::{ArithError, BigRat, RatFunc, VarContext};

/// Minimal connection polynomial of a sequence.
#[derive(Debug, Clone)]
pub struct Recurrence {
    /// `C(t) = 1 + c_1 t + ... ` with trailing zeros trimmed.
    pub connection: Vec<RatFunc>,
    /// Linear complexity `L`: `sum_{j=0}^{L} c_j s_{k-j} = 0` for `k >= L`.
    pub length: usize,
}

/// Shortest linear recurrence generating `seq`, computed exactly.
pub fn berlekamp_massey(ctx: &VarContext, seq: &[RatFunc]) -> Result<Recurrence, ArithError> {
    Ok(berlekamp_massey_within(ctx, seq, usize::MAX)?.expect("unbounded"))
}

/// As [`berlekamp_massey`], but gives up with `None` as soon as the linear
/// complexity exceeds `max_length` (it never decreases).
pub fn berlekamp_massey_within(
    ctx: &VarContext,
    seq: &[RatFunc],
    max_length: usize,
) -> Result<Option<Recurrence>, ArithError> {
    let one = RatFunc::one(ctx);
    let mut c = vec![one.clone()];
    let mut b = vec![one.clone()];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last_disc = one;

    for n in 0..seq.len() {
        let mut disc = seq[n].clone();
        for i in 1..=len.min(c.len() - 1) {
            if !c[i].is_zero() && !seq[n - i].is_zero() {
                disc = disc.checked_add(&c[i].checked_mul(&seq[n - i])?)?;
            }
        }
        if disc.is_zero() {
            shift += 1;
            continue;
        }
        let coef = disc.checked_div(&last_disc)?;
        let mut next = c.clone();
        if next.len() < b.len() + shift {
            next.resize(b.len() + shift, RatFunc::zero(ctx));
        }
        for (i, bi) in b.iter().enumerate() {
            if !bi.is_zero() {
                next[i + shift] = next[i + shift].checked_sub(&coef.checked_mul(bi)?)?;
            }
        }
        if 2 * len <= n {
            b = std::mem::replace(&mut c, next);
            len = n + 1 - len;
            if len > max_length {
                return Ok(None);
            }
            last_disc = disc;
            shift = 1;
        } else {
            c = next;
            shift += 1;
        }
    }
    while c.len() > 1 && c.last().is_some_and(RatFunc::is_zero) {
        c.pop();
    }
    Ok(Some(Recurrence { connection: c, length: len }))
}

/// Linear complexity of a sequence over Q, or `None` once it exceeds
/// `max_length`.
pub fn linear_complexity_within(seq: &[BigRat], max_length: usize) -> Option<usize> {
    let one = BigRat::from_integer(1.into());
    let mut c = vec![one.clone()];
    let mut b = vec![one.clone()];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last_disc = one;
    for n in 0..seq.len() {
        let mut disc = seq[n].clone();
        for i in 1..=len.min(c.len() - 1) {
            disc += &c[i] * &seq[n - i];
        }
        if disc.is_zero() {
            shift += 1;
            continue;
        }
        let coef = &disc / &last_disc;
        let mut next = c.clone();
        if next.len() < b.len() + shift {
            next.resize(b.len() + shift, BigRat::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            next[i + shift] -= &coef * bi;
        }
        if 2 * len <= n {
            b = std::mem::replace(&mut c, next);
            len = n + 1 - len;
            if len > max_length {
                return None;
            }
            last_disc = disc;
            shift = 1;
        } else {
            c = next;
            shift += 1;
        }
    }
    Some(len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn consts(ctx: &VarContext, v: &[i64]) -> Vec<RatFunc> {
        v.iter().map(|&k| RatFunc::constant(ctx, rat(k))).collect()
    }

    #[test]
    fn fibonacci() {
        let ctx = VarContext::new(&["x"]).unwrap();
        let r = berlekamp_massey(&ctx, &consts(&ctx, &[1, 1, 2, 3, 5, 8, 13, 21])).unwrap();
        assert_eq!(r.length, 2);
        assert_eq!(r.connection, consts(&ctx, &[1, -1, -1]));
    }

    #[test]
    fn eventually_zero() {
        let ctx = VarContext::new(&["x"]).unwrap();
        let mut s = vec![RatFunc::var(&ctx, 0), RatFunc::one(&ctx)];
        s.extend(std::iter::repeat(RatFunc::zero(&ctx)).take(8));
        let r = berlekamp_massey(&ctx, &s).unwrap();
        assert_eq!(r.length, 2);
        assert_eq!(r.connection, consts(&ctx, &[1]));
    }

    #[test]
    fn geometric_over_function_field() {
        // x, -x^2, x^3, ... has connection polynomial 1 + x t
        let ctx = VarContext::new(&["x"]).unwrap();
        let s: Vec<RatFunc> = (0..10)
            .map(|k| RatFunc::laurent_monomial(&ctx, &[k + 1], rat(if k % 2 == 0 { 1 } else { -1 })))
            .collect();
        let r = berlekamp_massey(&ctx, &s).unwrap();
        assert_eq!(r.length, 1);
        assert_eq!(r.connection, vec![RatFunc::one(&ctx), RatFunc::var(&ctx, 0)]);
    }

    #[test]
    fn scalar_complexity_matches() {
        let fib: Vec<BigRat> = [1, 1, 2, 3, 5, 8, 13, 21].iter().map(|&k| rat(k)).collect();
        assert_eq!(linear_complexity_within(&fib, 5), Some(2));
        assert_eq!(linear_complexity_within(&fib, 1), None);
        let ctx = VarContext::new(&["x"]).unwrap();
        let s: Vec<RatFunc> = fib.iter().map(|c| RatFunc::constant(&ctx, c.clone())).collect();
        assert_eq!(berlekamp_massey(&ctx, &s).unwrap().length, 2);
    }

    #[test]
    fn bounded_search_gives_up() {
        let ctx = VarContext::new(&["x"]).unwrap();
        let s = consts(&ctx, &[1, 1, 2, 3, 5, 8, 13, 21]);
        assert!(berlekamp_massey_within(&ctx, &s, 1).unwrap().is_none());
        assert_eq!(berlekamp_massey_within(&ctx, &s, 2).unwrap().unwrap().length, 2);
    }
}
