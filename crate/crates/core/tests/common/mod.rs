#![allow(dead_code)]

use ga_kernel_core::arith::{BigRat, MPoly, RatFunc, VarContext};
use ga_kernel_core::derivation::Derivation;
use ga_kernel_core::parser::{parse_ratfunc, Mode};
use proptest::prelude::*;
use rand::Rng;

pub fn ctx(names: &[&str]) -> VarContext {
    VarContext::new(names).unwrap()
}

pub fn rf(ctx: &VarContext, s: &str) -> RatFunc {
    parse_ratfunc(s, ctx, Mode::Plain).unwrap()
}

pub fn der(vars: &[&str], images: &[&str]) -> Derivation {
    let c = ctx(vars);
    let imgs = images.iter().map(|s| rf(&c, s)).collect();
    Derivation::new(&c, imgs).unwrap()
}

pub fn q(n: i64) -> BigRat {
    BigRat::from_integer(n.into())
}

/// Random polynomial with up to `terms` terms, exponents up to `deg` per
/// variable and integer coefficients in [-5, 5].
pub fn random_poly<R: Rng>(rng: &mut R, ctx: &VarContext, terms: usize, deg: u32) -> MPoly {
    let n = ctx.len();
    let k = rng.gen_range(1..=terms);
    MPoly::from_terms(
        ctx,
        (0..k).map(|_| {
            let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=deg)).collect();
            (e, q(rng.gen_range(-5..=5)))
        }),
    )
}

pub fn random_nonzero_poly<R: Rng>(rng: &mut R, ctx: &VarContext, terms: usize, deg: u32) -> MPoly {
    loop {
        let p = random_poly(rng, ctx, terms, deg);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn random_ratfunc<R: Rng>(rng: &mut R, ctx: &VarContext) -> RatFunc {
    let n = random_poly(rng, ctx, 4, 2);
    let d = random_nonzero_poly(rng, ctx, 3, 2);
    RatFunc::new(n, d).unwrap()
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize) -> Vec<BigRat> {
    (0..n)
        .map(|_| BigRat::new(rng.gen_range(-40..=40).into(), rng.gen_range(1..=9).into()))
        .collect()
}

/// Triangular derivation on Q(x, y, z): dx = 0, dy in Q[x], dz in Q[x, y].
pub fn random_triangular<R: Rng>(rng: &mut R) -> Derivation {
    let c = ctx(&["x", "y", "z"]);
    let in_x = |rng: &mut R| {
        let terms: Vec<(Vec<u32>, BigRat)> =
            (0..rng.gen_range(1..=3)).map(|_| (vec![rng.gen_range(0..=2), 0, 0], q(rng.gen_range(-4..=4)))).collect();
        MPoly::from_terms(&c, terms)
    };
    let in_xy = |rng: &mut R| {
        let terms: Vec<(Vec<u32>, BigRat)> = (0..rng.gen_range(1..=3))
            .map(|_| (vec![rng.gen_range(0..=2), rng.gen_range(0..=3), 0], q(rng.gen_range(-4..=4))))
            .collect();
        MPoly::from_terms(&c, terms)
    };
    let dy = in_x(rng);
    let dz = in_xy(rng);
    Derivation::new(&c, vec![RatFunc::zero(&c), RatFunc::from_poly(dy), RatFunc::from_poly(dz)]).unwrap()
}

/// Proptest strategy for small polynomials in `ctx`.
pub fn poly_strategy(ctx: VarContext, max_terms: usize) -> impl Strategy<Value = MPoly> {
    let n = ctx.len();
    prop::collection::vec((prop::collection::vec(0u32..3, n), -6i64..=6), 0..=max_terms)
        .prop_map(move |terms| MPoly::from_terms(&ctx, terms.into_iter().map(|(e, c)| (e, q(c)))))
}

pub fn ratfunc_strategy(ctx: VarContext) -> impl Strategy<Value = RatFunc> {
    (poly_strategy(ctx.clone(), 4), poly_strategy(ctx, 3).prop_filter("nonzero", |p| !p.is_zero()))
        .prop_map(|(n, d)| RatFunc::new(n, d).unwrap())
}
