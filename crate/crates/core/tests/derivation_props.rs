mod common;

use common::{ctx, der, poly_strategy, q, random_triangular, ratfunc_strategy, rf};
use ga_kernel_core::arith::{RatFunc, VarContext};
use ga_kernel_core::derivation::{Derivation, DerivationError, LndStatus};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn xyz() -> VarContext {
    ctx(&["x", "y", "z"])
}

fn derivation_strategy() -> impl Strategy<Value = Derivation> {
    prop::collection::vec(ratfunc_strategy(xyz()), 3).prop_map(|imgs| Derivation::new(&xyz(), imgs).unwrap())
}

fn polynomial_derivation_strategy() -> impl Strategy<Value = Derivation> {
    prop::collection::vec(poly_strategy(xyz(), 3), 3)
        .prop_map(|imgs| Derivation::new(&xyz(), imgs.into_iter().map(RatFunc::from_poly).collect()).unwrap())
}

fn eq(a: &RatFunc, b: &RatFunc) -> bool {
    a.checked_eq(b).unwrap()
}

#[test]
fn iterates() {
    let d = der(&["x", "y"], &["0", "x^2"]);
    let y = rf(d.context(), "y");
    assert!(d.iterate(&y, 2).unwrap().is_zero());
    let d = der(&["x"], &["-x^2"]);
    let x = rf(d.context(), "x");
    assert!(eq(&d.iterate(&x, 2).unwrap(), &rf(d.context(), "2*x^3")));
}

#[test]
fn kernel_and_slices() {
    let d = der(&["x", "y"], &["0", "x^2"]);
    assert!(d.in_kernel(&rf(d.context(), "x")).unwrap());
    assert!(!d.in_kernel(&rf(d.context(), "y")).unwrap());

    let d = der(&["x", "y"], &["0", "1/x"]);
    assert!(d.is_slice(&rf(d.context(), "x*y")).unwrap());
    assert!(!d.is_slice(&rf(d.context(), "y")).unwrap());

    // toric realization of p = (1,0), e = (-1,1): dx = y, dy = 0
    let d = der(&["x", "y"], &["y", "0"]);
    let xy = rf(d.context(), "x*y");
    assert!(eq(&d.apply(&xy).unwrap(), &rf(d.context(), "y^2")));
}

#[test]
fn nilpotency() {
    let v = der(&["x", "y"], &["0", "x^2"]).lnd_check(10).unwrap();
    assert_eq!(v.status, LndStatus::Nilpotent);
    assert_eq!(v.degrees, Some(vec![1, 2]));

    let v = der(&["x"], &["1"]).lnd_check(10).unwrap();
    assert_eq!(v.degrees, Some(vec![2]));

    let v = der(&["x"], &["x"]).lnd_check(10).unwrap();
    assert_eq!(v.status, LndStatus::NotNilpotentWithinCap);

    assert!(matches!(der(&["x"], &["1/x"]).lnd_check(10), Err(DerivationError::NonPolynomialImage(_))));
    assert!(der(&["x"], &["0"]).is_trivial());
}

#[test]
fn lnd_degrees_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let d = random_triangular(&mut rng);
        let v = d.lnd_check(64).unwrap();
        let degrees = v.degrees.expect("triangular derivations are nilpotent");
        for (i, &m) in degrees.iter().enumerate() {
            let x = RatFunc::var(d.context(), i);
            assert!(d.iterate(&x, m).unwrap().is_zero());
            assert!(!d.iterate(&x, m - 1).unwrap().is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn leibniz(d in derivation_strategy(), f in ratfunc_strategy(xyz()), g in ratfunc_strategy(xyz())) {
        let lhs = d.apply(&(&f * &g)).unwrap();
        let rhs = &(&f * &d.apply(&g).unwrap()) + &(&g * &d.apply(&f).unwrap());
        prop_assert!(eq(&lhs, &rhs));
    }

    #[test]
    fn linearity(
        d in derivation_strategy(),
        f in ratfunc_strategy(xyz()),
        g in ratfunc_strategy(xyz()),
        a in -20i64..20,
        b in 1i64..20,
    ) {
        let (a, b) = (q(a), q(1) / q(b));
        let lhs = d.apply(&(&f.scale(&a) + &g.scale(&b))).unwrap();
        let rhs = &d.apply(&f).unwrap().scale(&a) + &d.apply(&g).unwrap().scale(&b);
        prop_assert!(eq(&lhs, &rhs));
    }

    #[test]
    fn chain_consistency(
        d in derivation_strategy(),
        p in polynomial_derivation_strategy(),
        f in ratfunc_strategy(xyz()),
        g in poly_strategy(xyz(), 4),
        m in 0usize..4,
    ) {
        let g = RatFunc::from_poly(g);
        let next = p.iterate(&g, m + 1).unwrap();
        let step = p.apply(&p.iterate(&g, m).unwrap()).unwrap();
        prop_assert!(eq(&next, &step));
        // rational images swell quickly, so stay shallow there
        let next = d.iterate(&f, 1).unwrap();
        prop_assert!(eq(&next, &d.apply(&f).unwrap()));
        let next = d.iterate(&g, 2).unwrap();
        let step = d.apply(&d.iterate(&g, 1).unwrap()).unwrap();
        prop_assert!(eq(&next, &step));
    }

    #[test]
    fn slices_are_not_invariants(
        r in ratfunc_strategy(ctx(&["x"])),
        dz in ratfunc_strategy(xyz()),
        s in ratfunc_strategy(xyz()),
    ) {
        prop_assume!(!r.is_zero());
        // dx = 0, dy = r(x): y / r(x) is a slice
        let r = r.embed(&xyz(), &[0]);
        let d = Derivation::new(&xyz(), vec![RatFunc::zero(&xyz()), r.clone(), dz]).unwrap();
        let slice = RatFunc::var(&xyz(), 1).checked_div(&r).unwrap();
        prop_assert!(d.is_slice(&slice).unwrap());
        prop_assert!(!d.in_kernel(&slice).unwrap());
        if d.is_slice(&s).unwrap() {
            prop_assert!(!d.in_kernel(&s).unwrap());
        }
    }
}
