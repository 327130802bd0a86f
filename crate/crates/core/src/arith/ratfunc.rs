//! Elements of the rational function field `Q(x_1, ..., x_n)`.

use std::fmt;

use num::{One, Signed, Zero};

use super::gcd::gcd;
use super::{ArithError, BigRat, MPoly, VarContext};

/// Above this many terms in numerator or denominator, construction also
/// cancels the full polynomial gcd.
pub const FULL_GCD_TERMS: usize = 64;

/// A quotient `num / den` of polynomials.
///
/// Every constructor applies the cheap normalization: both parts integral
/// with joint content 1, common monomial factor removed, and the leading
/// coefficient of `den` positive. Equality is decided by cross
/// multiplication, so it never depends on how far a value was reduced.
#[derive(Clone)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn new(num: MPoly, den: MPoly) -> Result<Self, ArithError> {
        if num.context() != den.context() {
            return Err(ArithError::ContextMismatch);
        }
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let r = normalize(num, den);
        if r.num.len() > FULL_GCD_TERMS || r.den.len() > FULL_GCD_TERMS {
            Ok(r.reduce_full())
        } else {
            Ok(r)
        }
    }

    pub fn from_poly(p: MPoly) -> Self {
        let den = MPoly::one(p.context());
        normalize(p, den)
    }

    pub fn zero(ctx: &VarContext) -> Self {
        RatFunc { num: MPoly::zero(ctx), den: MPoly::one(ctx) }
    }

    pub fn one(ctx: &VarContext) -> Self {
        Self::constant(ctx, BigRat::one())
    }

    pub fn constant(ctx: &VarContext, c: BigRat) -> Self {
        Self::from_poly(MPoly::constant(ctx, c))
    }

    pub fn var(ctx: &VarContext, i: usize) -> Self {
        Self::from_poly(MPoly::var(ctx, i))
    }

    /// The Laurent monomial `prod x_i^{e_i}`.
    pub fn laurent_monomial(ctx: &VarContext, exps: &[i64], c: BigRat) -> Self {
        assert_eq!(exps.len(), ctx.len());
        let pos: Vec<u32> = exps.iter().map(|&e| e.max(0) as u32).collect();
        let neg: Vec<u32> = exps.iter().map(|&e| (-e).max(0) as u32).collect();
        let num = MPoly::from_terms(ctx, [(pos, c)]);
        let den = MPoly::from_terms(ctx, [(neg, BigRat::one())]);
        normalize(num, den)
    }

    pub fn context(&self) -> &VarContext {
        self.num.context()
    }

    pub fn numer(&self) -> &MPoly {
        &self.num
    }

    pub fn denom(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the denominator is a nonzero constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial value, when this is one.
    pub fn as_polynomial(&self) -> Option<MPoly> {
        let d = self.den.constant_value()?;
        Some(self.num.scale(&d.recip()))
    }

    pub fn constant_value(&self) -> Option<BigRat> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    fn check(&self, other: &RatFunc) -> Result<(), ArithError> {
        if self.context() == other.context() {
            Ok(())
        } else {
            Err(ArithError::ContextMismatch)
        }
    }

    /// Sum with the shared denominator factor `g` taken out first and then
    /// cancelled against the new numerator, so reduced inputs give a reduced
    /// result.
    pub fn checked_add(&self, other: &RatFunc) -> Result<RatFunc, ArithError> {
        self.check(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.den.is_constant() || other.den.is_constant() {
            let n = &(&self.num * &other.den) + &(&other.num * &self.den);
            return RatFunc::new(n, &self.den * &other.den);
        }
        // a/(g b) + c/(g d) = (a d + c b) / (g b d)
        let g = gcd(&self.den, &other.den);
        let b = self.den.div_exact(&g).expect("gcd divides");
        let d = other.den.div_exact(&g).expect("gcd divides");
        let mut n = &(&self.num * &d) + &(&other.num * &b);
        let mut g = g;
        if !n.is_zero() && !g.is_constant() {
            let h = gcd(&n, &g);
            if !h.is_constant() {
                n = n.div_exact(&h).expect("gcd divides");
                g = g.div_exact(&h).expect("gcd divides");
            }
        }
        RatFunc::new(n, &(&g * &b) * &d)
    }

    pub fn checked_sub(&self, other: &RatFunc) -> Result<RatFunc, ArithError> {
        self.checked_add(&-other)
    }

    /// Product with the cross gcds cancelled first.
    pub fn checked_mul(&self, other: &RatFunc) -> Result<RatFunc, ArithError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(RatFunc::zero(self.context()));
        }
        let (a, d) = cancel(&self.num, &other.den);
        let (c, b) = cancel(&other.num, &self.den);
        RatFunc::new(&a * &c, &b * &d)
    }

    pub fn checked_div(&self, other: &RatFunc) -> Result<RatFunc, ArithError> {
        self.check(other)?;
        self.checked_mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<RatFunc, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, k: i64) -> Result<RatFunc, ArithError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = u32::try_from(k.unsigned_abs()).map_err(|_| ArithError::ExponentTooLarge)?;
        RatFunc::new(base.num.pow(e), base.den.pow(e))
    }

    pub fn scale(&self, c: &BigRat) -> RatFunc {
        normalize(self.num.scale(c), self.den.clone())
    }

    /// Field equality, decided by `a.num * b.den == b.num * a.den`.
    pub fn checked_eq(&self, other: &RatFunc) -> Result<bool, ArithError> {
        self.check(other)?;
        Ok(&self.num * &other.den == &other.num * &self.den)
    }

    /// Returns an equal element with the full polynomial gcd cancelled, so
    /// numerator and denominator are coprime.
    pub fn reduce_full(&self) -> RatFunc {
        if self.num.is_zero() || self.den.is_constant() || self.num.is_constant() {
            return self.clone();
        }
        let g = gcd(&self.num, &self.den);
        if g.is_constant() {
            return self.clone();
        }
        let n = self.num.div_exact(&g).expect("gcd divides numerator");
        let d = self.den.div_exact(&g).expect("gcd divides denominator");
        normalize(n, d)
    }

    /// Alias for [`RatFunc::reduce_full`].
    pub fn reduce(&self) -> RatFunc {
        self.reduce_full()
    }

    /// Partial derivative with respect to `x_i` (quotient rule).
    pub fn partial(&self, i: usize) -> RatFunc {
        let dn = self.num.partial(i);
        let dd = self.den.partial(i);
        if dd.is_zero() {
            return RatFunc::new(dn, self.den.clone()).expect("nonzero denominator");
        }
        let n = &(&dn * &self.den) - &(&self.num * &dd);
        RatFunc::new(n, self.den.pow(2)).expect("nonzero denominator")
    }

    /// Substitutes `x_i <- values[i]`, all values living in a common target
    /// context. Fails when the substituted denominator vanishes identically.
    pub fn substitute(&self, values: &[RatFunc]) -> Result<RatFunc, ArithError> {
        assert_eq!(values.len(), self.context().len(), "one value per variable");
        let target = match values.first() {
            Some(v) => v.context().clone(),
            None => return Ok(self.clone()),
        };
        if values.iter().any(|v| v.context() != &target) {
            return Err(ArithError::ContextMismatch);
        }
        let fracs: Vec<(MPoly, MPoly)> =
            values.iter().map(|v| (v.num.clone(), v.den.clone())).collect();
        let (n, dn) = self.num.substitute_fractions(&target, &fracs);
        let (d, dd) = self.den.substitute_fractions(&target, &fracs);
        if d.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        // value = n / prod b^dn  divided by  d / prod b^dd
        let mut top = n;
        let mut bottom = d;
        for (i, (_, b)) in fracs.iter().enumerate() {
            let (a, c) = (dn[i], dd[i]);
            if c > a {
                top = &top * &b.pow(c - a);
            } else if a > c {
                bottom = &bottom * &b.pow(a - c);
            }
        }
        RatFunc::new(top, bottom)
    }

    /// Evaluates at an exact rational point.
    pub fn eval(&self, point: &[BigRat]) -> Result<BigRat, ArithError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Re-embeds into another context (`map[i]` = target index of `x_i`).
    pub fn embed(&self, target: &VarContext, map: &[usize]) -> RatFunc {
        normalize(self.num.embed(target, map), self.den.embed(target, map))
    }

    /// Index of every variable that occurs.
    pub fn support(&self) -> Vec<usize> {
        (0..self.context().len())
            .filter(|&i| self.num.degree_in(i) > 0 || self.den.degree_in(i) > 0)
            .collect()
    }
}

/// Cheap normalization: integer coefficients with joint content 1, common
/// monomial factor removed, positive leading denominator coefficient.
/// `(p / g, q / g)` for `g = gcd(p, q)`, skipping constant operands.
fn cancel(p: &MPoly, q: &MPoly) -> (MPoly, MPoly) {
    if p.is_constant() || q.is_constant() {
        return (p.clone(), q.clone());
    }
    let g = gcd(p, q);
    if g.is_constant() {
        return (p.clone(), q.clone());
    }
    (p.div_exact(&g).expect("gcd divides"), q.div_exact(&g).expect("gcd divides"))
}

fn normalize(num: MPoly, den: MPoly) -> RatFunc {
    let ctx = num.context().clone();
    if num.is_zero() {
        return RatFunc { num, den: MPoly::one(&ctx) };
    }
    let mut num = num;
    let mut den = den;
    let lcm = num::integer::lcm(num.denominator_lcm(), den.denominator_lcm());
    if !lcm.is_one() {
        let s = BigRat::from_integer(lcm);
        num = num.scale(&s);
        den = den.scale(&s);
    }
    let g = num::integer::gcd(num.numerator_gcd(), den.numerator_gcd());
    let sign_neg = den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false);
    if !g.is_one() || sign_neg {
        let mut s = BigRat::from_integer(g).recip();
        if sign_neg {
            s = -s;
        }
        num = num.scale(&s);
        den = den.scale(&s);
    }
    if let (Some(a), Some(b)) = (num.min_exponents(), den.min_exponents()) {
        let common: Vec<u32> = a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect();
        if common.iter().any(|&e| e > 0) {
            num = num.div_monomial(&common);
            den = den.div_monomial(&common);
        }
    }
    RatFunc { num, den }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.checked_eq(other).unwrap_or(false)
    }
}

impl Eq for RatFunc {}

fn is_atom(p: &MPoly) -> bool {
    // A single positive term with coefficient 1 and at most one variable,
    // or a positive integer constant.
    match p.leading() {
        Some((m, c)) if p.len() == 1 && !c.is_negative() => {
            let vars = m.exponents().iter().filter(|&&e| e > 0).count();
            (vars == 0 && c.is_integer()) || (vars == 1 && c.is_one())
        }
        _ => false,
    }
}

impl fmt::Display for RatFunc {
    /// Canonical string; parses back to an equal value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if is_atom(&self.den) {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl MPoly {
    fn is_one_poly(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }
}

macro_rules! rat_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&RatFunc> for &RatFunc {
            type Output = RatFunc;
            /// Panics on context mismatch or division by zero; use the
            /// `checked_` method to get an error instead.
            fn $method(self, rhs: &RatFunc) -> RatFunc {
                self.$checked(rhs).expect(concat!("RatFunc ", stringify!($method)))
            }
        }
    };
}

rat_binop!(Add, add, checked_add);
rat_binop!(Sub, sub, checked_sub);
rat_binop!(Mul, mul, checked_mul);
rat_binop!(Div, div, checked_div);

impl std::ops::Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl std::ops::Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}
