//! Sparse multivariate polynomials over Q.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under the
//! graded-lexicographic order, so iteration (in reverse) always yields the
//! leading term first and serialized output is deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};

use super::{ArithError, BigRat, VarContext};

/// Dense exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub(crate) Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize, k: u32) -> Self {
        let mut e = vec![0; n];
        e[i] = k;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `Q[x_1, ..., x_n]`.
#[derive(Clone)]
pub struct MPoly {
    ctx: VarContext,
    terms: BTreeMap<Monomial, BigRat>,
}

impl MPoly {
    pub fn zero(ctx: &VarContext) -> Self {
        MPoly { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &VarContext, c: BigRat) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ctx.len()), c);
        }
        p
    }

    pub fn one(ctx: &VarContext) -> Self {
        Self::constant(ctx, BigRat::one())
    }

    /// The generator `x_i`.
    pub fn var(ctx: &VarContext, i: usize) -> Self {
        Self::monomial(ctx, Monomial::var(ctx.len(), i, 1), BigRat::one())
    }

    pub fn monomial(ctx: &VarContext, m: Monomial, c: BigRat) -> Self {
        assert_eq!(m.0.len(), ctx.len(), "exponent vector length");
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated exponents.
    pub fn from_terms<I>(ctx: &VarContext, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigRat)>,
    {
        let mut p = Self::zero(ctx);
        for (e, c) in terms {
            assert_eq!(e.len(), ctx.len(), "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn context(&self) -> &VarContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the leading one downwards.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRat)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRat)> {
        self.terms.iter().next_back()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Value of a constant polynomial.
    pub fn constant_value(&self) -> Option<BigRat> {
        if self.is_zero() {
            Some(BigRat::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    /// Total degree, `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.leading().map_or(-1, |(m, _)| m.degree() as i64)
    }

    /// Degree in `x_i`, `-1` for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> i64 {
        self.terms.keys().map(|m| m.0[i] as i64).max().unwrap_or(-1)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &MPoly) -> Result<(), ArithError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(ArithError::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &MPoly) -> Result<MPoly, ArithError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MPoly) -> Result<MPoly, ArithError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MPoly) -> Result<MPoly, ArithError> {
        self.check(other)?;
        let mut out = MPoly::zero(&self.ctx);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ctx);
        }
        MPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ctx);
        }
        MPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut result = MPoly::one(&self.ctx);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(&self.ctx);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e > 0 {
                let mut d = m.clone();
                d.0[i] -= 1;
                out.add_term(d, c * BigRat::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        assert!(self.ctx == d.ctx, "context mismatch");
        let (lm, lc) = d.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut q = MPoly::zero(&self.ctx);
        let mut r = self.clone();
        while let Some((m, c)) = r.leading() {
            if !lm.divides(m) {
                return None;
            }
            let tm = m.div(&lm);
            let tc = c / &lc;
            for (dm, dc) in &d.terms {
                r.add_term(dm.mul(&tm), -(dc * &tc));
            }
            q.add_term(tm, tc);
        }
        Some(q)
    }

    /// Coefficient of `x_i^k`, as a polynomial free of `x_i`.
    pub fn coeff_in(&self, i: usize, k: u32) -> MPoly {
        let mut out = MPoly::zero(&self.ctx);
        for (m, c) in &self.terms {
            if m.0[i] == k {
                let mut r = m.clone();
                r.0[i] = 0;
                out.terms.insert(r, c.clone());
            }
        }
        out
    }

    /// Splits into coefficients of `x_i^0, x_i^1, ...`.
    pub fn coeffs_in(&self, i: usize) -> Vec<MPoly> {
        let d = self.degree_in(i);
        if d < 0 {
            return Vec::new();
        }
        let mut out = vec![MPoly::zero(&self.ctx); d as usize + 1];
        for (m, c) in &self.terms {
            let k = m.0[i] as usize;
            let mut r = m.clone();
            r.0[i] = 0;
            out[k].terms.insert(r, c.clone());
        }
        out
    }

    /// Componentwise minimum of all exponent vectors.
    pub(crate) fn min_exponents(&self) -> Option<Vec<u32>> {
        let mut it = self.terms.keys();
        let mut acc = it.next()?.0.clone();
        for m in it {
            for (a, b) in acc.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
        }
        Some(acc)
    }

    /// Divides every term by the monomial `x^e`; `e` must divide each term.
    pub(crate) fn div_monomial(&self, e: &[u32]) -> MPoly {
        let e = Monomial(e.to_vec());
        MPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.div(&e), c.clone())).collect(),
        }
    }

    /// Least common multiple of the coefficient denominators.
    pub(crate) fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Gcd of the coefficient numerators (coefficients assumed integral).
    pub(crate) fn numerator_gcd(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
    }

    /// Scales to an integer polynomial with content 1 and positive leading
    /// coefficient. Zero stays zero.
    pub fn primitive(&self) -> MPoly {
        let Some((_, lc)) = self.leading() else {
            return self.clone();
        };
        let den = self.denominator_lcm();
        let scaled = self.scale(&BigRat::from_integer(den));
        let g = scaled.numerator_gcd();
        let mut f = BigRat::from_integer(g).recip();
        if lc.is_negative() {
            f = -f;
        }
        scaled.scale(&f)
    }

    /// Evaluates at an exact rational point.
    pub fn eval(&self, point: &[BigRat]) -> BigRat {
        assert_eq!(point.len(), self.ctx.len(), "point dimension");
        let mut acc = BigRat::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v *= num::pow::pow(x.clone(), e as usize);
                }
            }
            acc += v;
        }
        acc
    }

    /// Re-embeds into another context via a variable map
    /// (`map[i]` = index in the target of `x_i`).
    pub fn embed(&self, target: &VarContext, map: &[usize]) -> MPoly {
        assert_eq!(map.len(), self.ctx.len());
        let mut out = MPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Substitutes `x_i <- num_i / den_i` (polynomials in a common target
    /// context). Returns `(N, D)` where the result equals `N / prod den_i^{D_i}`.
    pub(crate) fn substitute_fractions(
        &self,
        target: &VarContext,
        values: &[(MPoly, MPoly)],
    ) -> (MPoly, Vec<u32>) {
        let n = self.ctx.len();
        assert_eq!(values.len(), n);
        let degs: Vec<u32> = (0..n).map(|i| self.degree_in(i).max(0) as u32).collect();
        let mut num_pows: Vec<Vec<MPoly>> = Vec::with_capacity(n);
        let mut den_pows: Vec<Vec<MPoly>> = Vec::with_capacity(n);
        for (i, (a, b)) in values.iter().enumerate() {
            num_pows.push(power_table(target, a, degs[i]));
            den_pows.push(power_table(target, b, degs[i]));
        }
        let mut total = MPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for i in 0..n {
                let e = m.0[i] as usize;
                let d = degs[i] as usize;
                if e > 0 {
                    t = &t * &num_pows[i][e];
                }
                if d > e {
                    t = &t * &den_pows[i][d - e];
                }
            }
            total = &total + &t;
        }
        (total, degs)
    }

    fn fmt_term(f: &mut fmt::Formatter<'_>, ctx: &VarContext, m: &Monomial, c: &BigRat, first: bool) -> fmt::Result {
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let mut parts: Vec<String> = Vec::new();
        if !a.is_one() || m.is_one() {
            parts.push(a.to_string());
        }
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(ctx.name(i).to_string()),
                _ => parts.push(format!("{}^{}", ctx.name(i), e)),
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

fn power_table(ctx: &VarContext, p: &MPoly, d: u32) -> Vec<MPoly> {
    let mut out = Vec::with_capacity(d as usize + 1);
    out.push(MPoly::one(ctx));
    for k in 1..=d as usize {
        let next = &out[k - 1] * p;
        out.push(next);
    }
    out
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}

impl Eq for MPoly {}

impl fmt::Display for MPoly {
    /// Canonical form: graded-lex descending, `*` products, `^` powers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            Self::fmt_term(f, &self.ctx, m, c, k == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&MPoly> for &MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &MPoly) -> MPoly {
                self.$checked(rhs).expect("polynomial context mismatch")
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-BigRat::one())
    }
}
