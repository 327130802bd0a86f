//! Derivations of `Q(x_1, ..., x_n)` given by the images of the generators.

use thiserror::Error;

use crate::arith::{ArithError, MPoly, RatFunc, VarContext};

/// Default iteration bound for [`Derivation::lnd_check`].
pub const DEFAULT_LND_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("expected {expected} generator images, got {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("image of `{0}` is not a polynomial")]
    NonPolynomialImage(String),
    #[error("iteration cap must be positive")]
    ZeroCap,
}

/// A derivation `d` of the rational function field, `images[i] = d(x_i)`.
#[derive(Clone, Debug)]
pub struct Derivation {
    ctx: VarContext,
    images: Vec<RatFunc>,
}

impl Derivation {
    pub fn new(ctx: &VarContext, images: Vec<RatFunc>) -> Result<Self, DerivationError> {
        if images.len() != ctx.len() {
            return Err(DerivationError::ImageCount { expected: ctx.len(), found: images.len() });
        }
        if images.iter().any(|f| f.context() != ctx) {
            return Err(ArithError::ContextMismatch.into());
        }
        Ok(Derivation { ctx: ctx.clone(), images })
    }

    /// The zero derivation.
    pub fn zero(ctx: &VarContext) -> Self {
        Derivation { ctx: ctx.clone(), images: vec![RatFunc::zero(ctx); ctx.len()] }
    }

    pub fn context(&self) -> &VarContext {
        &self.ctx
    }

    pub fn images(&self) -> &[RatFunc] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &RatFunc {
        &self.images[i]
    }

    /// All images vanish.
    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(RatFunc::is_zero)
    }

    /// `d(f) = sum_i (df/dx_i) d(x_i)`.
    pub fn apply(&self, f: &RatFunc) -> Result<RatFunc, DerivationError> {
        if f.context() != &self.ctx {
            return Err(ArithError::ContextMismatch.into());
        }
        let mut acc = RatFunc::zero(&self.ctx);
        for i in f.support() {
            let img = &self.images[i];
            if img.is_zero() {
                continue;
            }
            acc = acc.checked_add(&f.partial(i).checked_mul(img)?)?;
        }
        Ok(acc)
    }

    /// `d^m(f)`.
    pub fn iterate(&self, f: &RatFunc, m: usize) -> Result<RatFunc, DerivationError> {
        let mut g = f.clone();
        for _ in 0..m {
            if g.is_zero() {
                break;
            }
            g = self.apply(&g)?;
        }
        Ok(g)
    }

    pub fn in_kernel(&self, f: &RatFunc) -> Result<bool, DerivationError> {
        Ok(self.apply(f)?.is_zero())
    }

    /// `d(s) = 1`.
    pub fn is_slice(&self, s: &RatFunc) -> Result<bool, DerivationError> {
        let ds = self.apply(s)?;
        Ok(ds.checked_eq(&RatFunc::one(&self.ctx))?)
    }

    /// Decides, up to `cap` iterations per generator, whether the
    /// derivation is locally nilpotent on the polynomial ring. Requires
    /// polynomial images.
    pub fn lnd_check(&self, cap: usize) -> Result<LndVerdict, DerivationError> {
        if cap == 0 {
            return Err(DerivationError::ZeroCap);
        }
        let images = self.polynomial_images()?;
        let mut degrees = Vec::with_capacity(images.len());
        for i in 0..self.ctx.len() {
            let mut g = MPoly::var(&self.ctx, i);
            let mut m = 0;
            while !g.is_zero() && m < cap {
                g = apply_poly(&images, &g);
                m += 1;
            }
            if !g.is_zero() {
                return Ok(LndVerdict { status: LndStatus::NotNilpotentWithinCap, degrees: None, cap });
            }
            degrees.push(m);
        }
        Ok(LndVerdict { status: LndStatus::Nilpotent, degrees: Some(degrees), cap })
    }

    fn polynomial_images(&self) -> Result<Vec<MPoly>, DerivationError> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.as_polynomial()
                    .ok_or_else(|| DerivationError::NonPolynomialImage(self.ctx.name(i).to_string()))
            })
            .collect()
    }
}

fn apply_poly(images: &[MPoly], f: &MPoly) -> MPoly {
    let mut acc = MPoly::zero(f.context());
    for (i, img) in images.iter().enumerate() {
        if img.is_zero() || f.degree_in(i) <= 0 {
            continue;
        }
        acc = &acc + &(&f.partial(i) * img);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LndStatus {
    Nilpotent,
    /// No generator-wise nilpotency found within the cap. Not a proof.
    NotNilpotentWithinCap,
}

impl LndStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LndStatus::Nilpotent => "nilpotent",
            LndStatus::NotNilpotentWithinCap => "not-nilpotent-within-cap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LndVerdict {
    pub status: LndStatus,
    /// Smallest `m` with `d^m(x_i) = 0`, per generator, when nilpotent.
    pub degrees: Option<Vec<usize>>,
    pub cap: usize,
}

impl LndVerdict {
    pub fn is_nilpotent(&self) -> bool {
        self.status == LndStatus::Nilpotent
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::parser::{parse_ratfunc, Mode};

    fn der(vars: &[&str], images: &[&str]) -> Derivation {
        let ctx = VarContext::new(vars).unwrap();
        let imgs = images.iter().map(|s| parse_ratfunc(s, &ctx, Mode::Plain).unwrap()).collect();
        Derivation::new(&ctx, imgs).unwrap()
    }

    fn rf(d: &Derivation, s: &str) -> RatFunc {
        parse_ratfunc(s, d.context(), Mode::Plain).unwrap()
    }

    #[test]
    fn apply_examples() {
        let d = der(&["x"], &["-x^2"]);
        assert_eq!(d.apply(&rf(&d, "x")).unwrap(), rf(&d, "-x^2"));
        let d = der(&["x", "y"], &["0", "1/x"]);
        assert_eq!(d.apply(&rf(&d, "y")).unwrap(), rf(&d, "1/x"));
        let c = RatFunc::constant(d.context(), ratio(7, 3));
        assert!(d.apply(&c).unwrap().is_zero());
    }

    #[test]
    fn iterate_examples() {
        let d = der(&["x", "y"], &["0", "x^2"]);
        assert!(d.iterate(&rf(&d, "y"), 2).unwrap().is_zero());
        let d = der(&["x"], &["-x^2"]);
        assert_eq!(d.iterate(&rf(&d, "x"), 2).unwrap(), rf(&d, "2*x^3"));
        assert_eq!(d.iterate(&rf(&d, "x"), 0).unwrap(), rf(&d, "x"));
    }

    #[test]
    fn kernel_and_slices() {
        let d = der(&["x", "y"], &["0", "x^2"]);
        assert!(d.in_kernel(&rf(&d, "x")).unwrap());
        assert!(!d.in_kernel(&rf(&d, "y")).unwrap());
        // the homogeneous derivation with p = (1,0), e = (-1,1): dx = y, dy = 0
        let h = der(&["x", "y"], &["y", "0"]);
        assert_eq!(h.apply(&rf(&h, "x*y")).unwrap(), rf(&h, "y^2"));
        assert!(!h.in_kernel(&rf(&h, "x*y")).unwrap());

        let d = der(&["x"], &["-x^2"]);
        assert!(d.is_slice(&rf(&d, "1/x")).unwrap());
        let d = der(&["x", "y"], &["0", "1/x"]);
        assert!(d.is_slice(&rf(&d, "x*y")).unwrap());
        let d = der(&["x"], &["1"]);
        assert!(!d.is_slice(&rf(&d, "x^2")).unwrap());
    }

    #[test]
    fn lnd_examples() {
        let v = der(&["x", "y"], &["0", "x^2"]).lnd_check(10).unwrap();
        assert_eq!(v.status, LndStatus::Nilpotent);
        assert_eq!(v.degrees, Some(vec![1, 2]));
        let v = der(&["x"], &["-x^2"]).lnd_check(10).unwrap();
        assert_eq!(v.status, LndStatus::NotNilpotentWithinCap);
        let v = der(&["x"], &["1"]).lnd_check(10).unwrap();
        assert_eq!(v.degrees, Some(vec![2]));
        assert_eq!(
            der(&["x", "y"], &["0", "1/x"]).lnd_check(10).unwrap_err(),
            DerivationError::NonPolynomialImage("y".into())
        );
        assert_eq!(der(&["x"], &["1"]).lnd_check(0).unwrap_err(), DerivationError::ZeroCap);
        // constant denominators are still polynomial images
        let v = der(&["x", "y"], &["0", "x/2"]).lnd_check(DEFAULT_LND_CAP).unwrap();
        assert!(v.is_nilpotent());
    }

    #[test]
    fn trivial_flag() {
        let ctx = VarContext::new(&["x", "y"]).unwrap();
        assert!(Derivation::zero(&ctx).is_trivial());
        assert!(!der(&["x"], &["1"]).is_trivial());
        assert!(Derivation::new(&ctx, vec![RatFunc::zero(&ctx)]).is_err());
    }
}
