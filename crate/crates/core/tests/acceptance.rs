//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{ctx, der, q, random_point, random_ratfunc, random_triangular};
use ga_kernel_core::arith::RatFunc;
use ga_kernel_core::derivation::{Derivation, DEFAULT_LND_CAP};
use ga_kernel_core::flow::{
    coaction_check, derivation_from_flow, find_slice, integrability_check, verify_flow, RationalFlow,
    DEFAULT_DETECT_DEGREE, DEFAULT_SERIES_ORDER,
};
use ga_kernel_core::parser::{parse_ratfunc, render, Mode};
use ga_kernel_core::toric::{
    enumerate_roots, extends_to_cone, integrable_criterion, is_primitive, to_derivation, Cone, Fan, HomogDeriv,
    LatticeVec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Certified flows met along the way, for the group-law sweep.
#[derive(Default)]
struct Pool {
    flows: Vec<RationalFlow>,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn certified_flow(d: &Derivation) -> Result<RationalFlow, String> {
    let v = integrability_check(d, DEFAULT_DETECT_DEGREE, DEFAULT_SERIES_ORDER).map_err(|e| e.to_string())?;
    match (v.flow, v.certificate) {
        (Some(f), Some(c)) if c.holds() && f.is_certified() => Ok(f),
        _ => Err(format!("no certified flow, status {}", v.status.as_str())),
    }
}

fn criterion_1(pool: &mut Pool) -> Outcome {
    let d = der(&["x"], &["-x^2"]);
    let f = certified_flow(&d)?;
    let expected = parse_ratfunc("x/(1+t*x)", &ctx(&["x"]), Mode::Flow).map_err(|e| e.to_string())?;
    ensure(f.value(0).checked_eq(&expected).unwrap(), || format!("flow is {}", f.value(0)))?;
    let (_, s) = find_slice(&f).map_err(|e| e.to_string())?.ok_or("no slice")?;
    ensure(s.to_string() == "1/x", || format!("slice is {s}"))?;
    ensure(verify_flow(&d, &f).map_err(|e| e.to_string())?.holds(), || "ODE certificate".into())?;
    ensure(coaction_check(&f).map_err(|e| e.to_string())?, || "co-action".into())?;
    pool.flows.push(f);
    Ok("flow x/(t*x + 1), slice 1/x".into())
}

fn criterion_2(pool: &mut Pool) -> Outcome {
    let d = der(&["x", "y"], &["0", "1/x"]);
    let f = certified_flow(&d)?;
    let c = ctx(&["x", "y"]);
    let ex = parse_ratfunc("x", &c, Mode::Flow).unwrap();
    let ey = parse_ratfunc("y + t/x", &c, Mode::Flow).unwrap();
    ensure(f.value(0).checked_eq(&ex).unwrap() && f.value(1).checked_eq(&ey).unwrap(), || {
        format!("flow is ({}, {})", f.value(0), f.value(1))
    })?;
    let (_, s) = find_slice(&f).map_err(|e| e.to_string())?.ok_or("no slice")?;
    // alpha*s = s + t, checked directly by substitution
    let ext = f.extended_context().clone();
    let lifted = s.substitute(&f.values()).unwrap();
    let moved = s.embed(&ext, &[2, 3]).checked_add(&RatFunc::var(&ext, 0)).unwrap();
    ensure(lifted.checked_eq(&moved).unwrap(), || format!("alpha*s != s + t for s = {s}"))?;
    ensure(coaction_check(&f).map_err(|e| e.to_string())?, || "co-action".into())?;
    pool.flows.push(f);
    Ok(format!("flow (x, (x*y + t)/x), slice {s}"))
}

fn primitive_vectors(bound: i64) -> Vec<LatticeVec> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            let v = LatticeVec::from_i64(&[a, b]);
            if is_primitive(&v) {
                out.push(v);
            }
        }
    }
    out
}

fn all_vectors(bound: i64) -> Vec<LatticeVec> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            out.push(LatticeVec::from_i64(&[a, b]));
        }
    }
    out
}

fn criterion_3(pool: &mut Pool) -> Outcome {
    use rayon::prelude::*;
    let pairs: Vec<(LatticeVec, LatticeVec)> = primitive_vectors(3)
        .into_iter()
        .flat_map(|p| all_vectors(3).into_iter().map(move |e| (p.clone(), e)))
        .collect();
    let results: Vec<Result<(bool, Option<RationalFlow>), String>> = pairs
        .par_iter()
        .map(|(p, e)| {
            let h = HomogDeriv::new(p.clone(), e.clone()).map_err(|e| e.to_string())?;
            let predicted = integrable_criterion(&h).map_err(|e| e.to_string())?;
            let d = to_derivation(&h).map_err(|e| e.to_string())?;
            let v = integrability_check(&d, DEFAULT_DETECT_DEGREE, DEFAULT_SERIES_ORDER).map_err(|e| e.to_string())?;
            let certified = v.is_certified();
            if predicted != certified {
                return Err(format!("p = {p}, e = {e}: criterion {predicted}, check {}", v.status.as_str()));
            }
            Ok((certified, v.flow))
        })
        .collect();
    let mut integrable = 0;
    for r in results {
        let (c, f) = r?;
        if c {
            integrable += 1;
            pool.flows.extend(f);
        }
    }
    Ok(format!("{} pairs agree, {integrable} integrable", pairs.len()))
}

fn criterion_4(pool: &mut Pool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..25 {
        let d = random_triangular(&mut rng);
        let lnd = d.lnd_check(DEFAULT_LND_CAP).map_err(|e| e.to_string())?;
        ensure(lnd.is_nilpotent(), || format!("case {k}: lnd_check {}", lnd.status.as_str()))?;
        let f = certified_flow(&d).map_err(|e| format!("case {k}: {e}"))?;
        ensure(f.components().iter().all(|c| c.is_polynomial()), || format!("case {k}: denominator"))?;
        ensure(f.values().iter().all(|v| v.denom().is_constant()), || format!("case {k}: denominator"))?;
        pool.flows.push(f);
    }
    Ok("25 triangular derivations nilpotent with polynomial flows".into())
}

/// Roots of a fan by direct filtering of every `e` in the box.
fn brute_roots(rays: &[Vec<i64>], rank: usize, bound: i64) -> Vec<(Vec<i64>, Vec<i64>)> {
    let mut out = Vec::new();
    let side = 2 * bound + 1;
    for k in 0..side.pow(rank as u32) {
        let e: Vec<i64> = (0..rank).map(|i| (k / side.pow(i as u32)) % side - bound).collect();
        let dot = |r: &Vec<i64>| r.iter().zip(&e).map(|(a, b)| a * b).sum::<i64>();
        for rho in rays {
            if dot(rho) == -1 && rays.iter().filter(|r| *r != rho).all(|r| dot(r) >= 0) {
                out.push((e.clone(), rho.clone()));
            }
        }
    }
    out.sort();
    out
}

fn roots_as_vec(f: &Fan, bound: i64) -> Result<Vec<(Vec<i64>, Vec<i64>)>, String> {
    let to_i64 = |v: &LatticeVec| v.coords().iter().map(|c| i64::try_from(c).unwrap()).collect::<Vec<_>>();
    let mut out: Vec<_> =
        enumerate_roots(f, bound).map_err(|e| e.to_string())?.iter().map(|r| (to_i64(&r.e), to_i64(&r.witness))).collect();
    out.sort();
    Ok(out)
}

fn criterion_5(_: &mut Pool) -> Outcome {
    let quadrant = Fan::from_i64(2, &[&[&[1, 0], &[0, 1]], &[&[1, 0]], &[&[0, 1]], &[]]).map_err(|e| e.to_string())?;
    let got = roots_as_vec(&quadrant, 4)?;
    let mut expected: Vec<(Vec<i64>, Vec<i64>)> = (0..=4)
        .flat_map(|k| [(vec![-1, k], vec![1, 0]), (vec![k, -1], vec![0, 1])])
        .collect();
    expected.sort();
    ensure(got == expected, || format!("quadrant roots {got:?}"))?;
    ensure(brute_roots(&[vec![1, 0], vec![0, 1]], 2, 4) == got, || "quadrant brute force".into())?;

    let p1 = Fan::from_i64(1, &[&[&[1]], &[&[-1]], &[]]).map_err(|e| e.to_string())?;
    let got = roots_as_vec(&p1, 4)?;
    let expected = vec![(vec![-1], vec![1]), (vec![1], vec![-1])];
    ensure(got == expected, || format!("P1 roots {got:?}"))?;
    ensure(brute_roots(&[vec![1], vec![-1]], 1, 4) == got, || "P1 brute force".into())?;
    Ok("quadrant: 10 roots, P1: {-1, 1}".into())
}

fn criterion_6(_: &mut Pool) -> Outcome {
    let quadrant = Cone::from_i64(2, &[&[1, 0], &[0, 1]]).map_err(|e| e.to_string())?;
    let (mut lnd_count, mut outside_count) = (0, 0);
    for p in primitive_vectors(3) {
        for e in all_vectors(3) {
            let h = HomogDeriv::new(p.clone(), e.clone()).map_err(|e| e.to_string())?;
            let v = extends_to_cone(&h, &quadrant).map_err(|e| e.to_string())?;
            let d = to_derivation(&h).map_err(|e| e.to_string())?;
            if v.lnd {
                lnd_count += 1;
                let l = d.lnd_check(DEFAULT_LND_CAP).map_err(|e| e.to_string())?;
                ensure(l.is_nilpotent(), || format!("p = {p}, e = {e}: not nilpotent"))?;
            }
            if !v.extends {
                outside_count += 1;
                ensure(d.images().iter().any(|img| !img.is_polynomial()), || {
                    format!("p = {p}, e = {e}: all images polynomial")
                })?;
            }
        }
    }
    Ok(format!("{lnd_count} nilpotent, {outside_count} leave the chart ring"))
}

fn criterion_7(pool: &mut Pool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut derivations: Vec<Derivation> = (0..15).map(|_| random_triangular(&mut rng)).collect();
    while derivations.len() < 25 {
        let p = LatticeVec::from_i64(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
        let e = LatticeVec::from_i64(&[rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
        if !is_primitive(&p) {
            continue;
        }
        let h = HomogDeriv::new(p, e).unwrap();
        if integrable_criterion(&h).unwrap() {
            derivations.push(to_derivation(&h).unwrap());
        }
    }
    for (k, d) in derivations.iter().enumerate() {
        let f = certified_flow(d).map_err(|e| format!("case {k}: {e}"))?;
        let back = derivation_from_flow(&f).map_err(|e| e.to_string())?;
        for (a, b) in back.images().iter().zip(d.images()) {
            ensure(a.checked_eq(b).unwrap(), || format!("case {k}: recovered {a}, expected {b}"))?;
        }
        pool.flows.push(f);
    }

    let c = ctx(&["x", "y", "z"]);
    for k in 0..100 {
        let f = random_ratfunc(&mut rng, &c);
        let text = render(&f);
        let back = parse_ratfunc(&text, &c, Mode::Plain).map_err(|e| format!("{text}: {e}"))?;
        ensure(back.checked_eq(&f).unwrap(), || format!("case {k}: {text} reparsed as {back}"))?;
        ensure(render(&back) == text, || format!("case {k}: render not stable"))?;
    }
    Ok("25 flow round trips, 100 parse/render round trips".into())
}

fn criterion_8(pool: &mut Pool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let c = ctx(&["x", "y", "z"]);
    let zero = RatFunc::zero(&c);
    let one = RatFunc::one(&c);
    for k in 0..100 {
        let (a, b, d) = (random_ratfunc(&mut rng, &c), random_ratfunc(&mut rng, &c), random_ratfunc(&mut rng, &c));
        let eq = |u: &RatFunc, v: &RatFunc| u.checked_eq(v).unwrap();
        let ok = eq(&(&(&a + &b) + &d), &(&a + &(&b + &d)))
            && eq(&(&(&a * &b) * &d), &(&a * &(&b * &d)))
            && eq(&(&a + &b), &(&b + &a))
            && eq(&(&a * &b), &(&b * &a))
            && eq(&(&a * &(&b + &d)), &(&(&a * &b) + &(&a * &d)))
            && eq(&(&a + &zero), &a)
            && eq(&(&a * &one), &a)
            && eq(&(&a - &a), &zero)
            && (a.is_zero() || eq(&(&a * &a.recip().unwrap()), &one));
        ensure(ok, || format!("field axioms, triple {k}: {a}, {b}, {d}"))?;
        // independent check at a random point
        let pt = random_point(&mut rng, 3);
        if let (Ok(va), Ok(vb), Ok(vs)) = (a.eval(&pt), b.eval(&pt), (&a * &b).eval(&pt)) {
            ensure(va * vb == vs, || format!("product disagrees with evaluation, triple {k}"))?;
        }
    }

    for k in 0..50 {
        let d = Derivation::new(&c, (0..3).map(|_| random_ratfunc(&mut rng, &c)).collect()).unwrap();
        let (f, g) = (random_ratfunc(&mut rng, &c), random_ratfunc(&mut rng, &c));
        let (a, b) = (q(rng.gen_range(-9..=9)), q(rng.gen_range(-9..=9)));
        let df = d.apply(&f).unwrap();
        let dg = d.apply(&g).unwrap();
        let leibniz = d.apply(&(&f * &g)).unwrap();
        ensure(leibniz.checked_eq(&(&(&df * &g) + &(&f * &dg))).unwrap(), || format!("Leibniz, case {k}"))?;
        let lin = d.apply(&(&f.scale(&a) + &g.scale(&b))).unwrap();
        ensure(lin.checked_eq(&(&df.scale(&a) + &dg.scale(&b))).unwrap(), || format!("linearity, case {k}"))?;
    }

    let mut checked = 0;
    for f in &pool.flows {
        ensure(coaction_check(f).map_err(|e| e.to_string())?, || {
            format!("group law fails for {:?}", f.values().iter().map(ToString::to_string).collect::<Vec<_>>())
        })?;
        checked += 1;
    }
    // a flow that is not a group action must be rejected
    let x = ctx(&["x"]);
    let bad = RationalFlow::from_ratfuncs(&x, &[parse_ratfunc("x + t^2", &x, Mode::Flow).unwrap()])
        .map_err(|e| e.to_string())?;
    ensure(!coaction_check(&bad).unwrap(), || "x + t^2 accepted".into())?;
    Ok(format!("100 field triples, 50 Leibniz/linearity cases, group law on {checked} certified flows"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(&mut Pool) -> Outcome, Duration); 8] = [
        ("1 flow regression", criterion_1, Duration::from_secs(1)),
        ("2 rational vector field", criterion_2, Duration::from_secs(1)),
        ("3 toric criterion vs series", criterion_3, Duration::from_secs(300)),
        ("4 LND => polynomial flow", criterion_4, Duration::from_secs(60)),
        ("5 Demazure roots", criterion_5, Duration::from_secs(1)),
        ("6 extension cross-check", criterion_6, Duration::from_secs(60)),
        ("7 round trips", criterion_7, Duration::from_secs(600)),
        ("8 property suites", criterion_8, Duration::from_secs(600)),
    ];
    let mut pool = Pool::default();
    let mut failed = 0;
    let start = Instant::now();
    for (name, run, budget) in criteria {
        let t = Instant::now();
        let outcome = run(&mut pool);
        let elapsed = t.elapsed();
        let over = elapsed > budget;
        match (&outcome, over) {
            (Ok(detail), false) => println!("PASS criterion {name}: {detail} [{elapsed:.2?}]"),
            (Ok(detail), true) => println!("FAIL criterion {name}: {detail} [{elapsed:.2?} exceeds {budget:?}]"),
            (Err(why), _) => println!("FAIL criterion {name}: {why} [{elapsed:.2?}]"),
        }
        if outcome.is_err() || over {
            failed += 1;
        }
    }
    println!("acceptance: {} of 8 criteria passed in {:.2?}", 8 - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
