//! Exponential flows `exp(t d)` of derivations.
//!
//! A flow is computed as a truncated series in `t`, a closed rational form
//! is proposed by exact Berlekamp-Massey on each component, and a proposal
//! is only accepted once it satisfies the flow ODE with the identity as
//! initial value. That pair of identities characterizes `exp(t d)` among
//! formal series, so a certified flow is a proof of rational integrability.
//!
//! Flow components live in the extended context `(t, tp, x_1, ..., x_n)`
//! returned by [`VarContext::flow_extension`]; `tp` plays the role of a
//! second time parameter in the co-action check.

mod recurrence;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{rat, ArithError, BigRat, MPoly, RatFunc, VarContext};
use crate::derivation::{Derivation, DerivationError};

pub use recurrence::{berlekamp_massey, berlekamp_massey_within, linear_complexity_within, Recurrence};

pub const DEFAULT_DETECT_DEGREE: usize = 8;
pub const DEFAULT_SERIES_ORDER: usize = 2 * DEFAULT_DETECT_DEGREE + 4;

/// Index of `t` in the extended context.
pub const T: usize = 0;
/// Index of `tp` in the extended context.
pub const TP: usize = 1;
const OFFSET: usize = 2;

/// Series order needed to run detection at `detect_degree`.
pub fn required_order(detect_degree: usize) -> usize {
    2 * detect_degree + 4
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error("series order must be at least 1")]
    ZeroOrder,
    #[error("series order {order} is below the {needed} needed for detection degree {degree}")]
    InsufficientOrder { order: usize, needed: usize, degree: usize },
    #[error("component `{0}` has a denominator vanishing at t = 0")]
    ZeroAtOrigin(String),
    #[error("component `{0}` does not depend on t")]
    ConstantComponent(String),
    #[error("component `{0}` may only depend on t and the declared variables")]
    ForeignParameter(String),
    #[error("expected {expected} flow components, got {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("substitution into `{0}` produces an identically zero denominator")]
    Structural(String),
}

fn structural(ctx: &VarContext, i: usize) -> impl Fn(ArithError) -> FlowError + '_ {
    move |e| match e {
        ArithError::DivisionByZero => FlowError::Structural(ctx.name(i).to_string()),
        other => FlowError::Arith(other),
    }
}

/// Truncated exponential series, `coeffs[i][m] = d^m(x_i) / m!`.
#[derive(Debug, Clone)]
pub struct TruncFlow {
    derivation: Derivation,
    order: usize,
    coeffs: Vec<Vec<RatFunc>>,
}

impl TruncFlow {
    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn context(&self) -> &VarContext {
        self.derivation.context()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficients `c_0, ..., c_order` of the series of `x_i`.
    pub fn component(&self, i: usize) -> &[RatFunc] {
        &self.coeffs[i]
    }

    pub fn components(&self) -> &[Vec<RatFunc>] {
        &self.coeffs
    }
}

/// `exp(t d)(f)` up to and including `t^order`.
pub fn exp_series_of(d: &Derivation, f: &RatFunc, order: usize) -> Result<Vec<RatFunc>, FlowError> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(f.clone());
    for m in 0..order {
        let prev = &out[m];
        let next = if prev.is_zero() {
            prev.clone()
        } else {
            d.apply(prev)?.scale(&rat(m as i64 + 1).recip())
        };
        out.push(next);
    }
    Ok(out)
}

/// Truncated exponential flow of every generator.
pub fn exp_series(d: &Derivation, order: usize) -> Result<TruncFlow, FlowError> {
    if order == 0 {
        return Err(FlowError::ZeroOrder);
    }
    let ctx = d.context();
    let coeffs = (0..ctx.len())
        .into_par_iter()
        .map(|i| exp_series_of(d, &RatFunc::var(ctx, i), order))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TruncFlow { derivation: d.clone(), order, coeffs })
}

/// One component `P(t) / Q(t)` with coefficients in `Q(x)` and `Q(0) = 1`.
#[derive(Debug, Clone)]
pub struct FlowComponent {
    num: Vec<RatFunc>,
    den: Vec<RatFunc>,
}

impl FlowComponent {
    /// Normalizes `Q(0)` to 1 and trims trailing zeros.
    fn new(name: &str, mut num: Vec<RatFunc>, mut den: Vec<RatFunc>) -> Result<Self, FlowError> {
        trim(&mut num);
        trim(&mut den);
        let q0 = den.first().cloned().filter(|q| !q.is_zero());
        let Some(q0) = q0 else {
            return Err(FlowError::ZeroAtOrigin(name.to_string()));
        };
        if !q0.constant_value().is_some_and(|c| c == rat(1)) {
            let inv = q0.recip()?;
            num = num.iter().map(|c| c * &inv).collect();
            den = den.iter().map(|c| c * &inv).collect();
        }
        Ok(FlowComponent { num, den })
    }

    /// Coefficients of `P` in increasing powers of `t`.
    pub fn numerator(&self) -> &[RatFunc] {
        &self.num
    }

    /// Coefficients of `Q`, starting with 1.
    pub fn denominator(&self) -> &[RatFunc] {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }

    /// Independent of `t`.
    pub fn is_constant(&self) -> bool {
        self.num.len() <= 1 && self.den.len() == 1
    }

    fn value_at_zero(&self, ctx: &VarContext) -> RatFunc {
        self.num.first().cloned().unwrap_or_else(|| RatFunc::zero(ctx))
    }
}

fn trim(v: &mut Vec<RatFunc>) {
    while v.last().is_some_and(RatFunc::is_zero) {
        v.pop();
    }
}

/// A closed-form rational flow `x_i -> F_i(t)`.
#[derive(Debug, Clone)]
pub struct RationalFlow {
    ctx: VarContext,
    ext: VarContext,
    components: Vec<FlowComponent>,
    certified: bool,
}

impl RationalFlow {
    /// Builds a candidate flow from values in the extended context.
    pub fn from_ratfuncs(ctx: &VarContext, values: &[RatFunc]) -> Result<Self, FlowError> {
        if values.len() != ctx.len() {
            return Err(FlowError::ComponentCount { expected: ctx.len(), found: values.len() });
        }
        let ext = ctx.flow_extension();
        let mut components = Vec::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            if v.context() != &ext {
                return Err(ArithError::ContextMismatch.into());
            }
            let name = ctx.name(i);
            let v = v.reduce_full();
            if v.numer().degree_in(TP) > 0 || v.denom().degree_in(TP) > 0 {
                return Err(FlowError::ForeignParameter(name.to_string()));
            }
            let split = |p: &MPoly| -> Vec<RatFunc> {
                p.coeffs_in(T).iter().map(|c| RatFunc::from_poly(project(c, ctx))).collect()
            };
            components.push(FlowComponent::new(name, split(v.numer()), split(v.denom()))?);
        }
        Ok(RationalFlow { ctx: ctx.clone(), ext, components, certified: false })
    }

    fn from_components(ctx: &VarContext, components: Vec<FlowComponent>) -> Self {
        RationalFlow { ctx: ctx.clone(), ext: ctx.flow_extension(), components, certified: false }
    }

    pub fn context(&self) -> &VarContext {
        &self.ctx
    }

    /// The context `(t, tp, x...)` of [`RationalFlow::value`].
    pub fn extended_context(&self) -> &VarContext {
        &self.ext
    }

    pub fn components(&self) -> &[FlowComponent] {
        &self.components
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// `F_i` as a rational function of `(t, tp, x...)`.
    pub fn value(&self, i: usize) -> RatFunc {
        let c = &self.components[i];
        let p = self.poly_in_t(&c.num);
        let q = self.poly_in_t(&c.den);
        &p / &q
    }

    pub fn values(&self) -> Vec<RatFunc> {
        (0..self.components.len()).map(|i| self.value(i)).collect()
    }

    fn poly_in_t(&self, coeffs: &[RatFunc]) -> RatFunc {
        let t = RatFunc::var(&self.ext, T);
        let mut acc = RatFunc::zero(&self.ext);
        for c in coeffs.iter().rev() {
            acc = &(&acc * &t) + &self.lift(c);
        }
        acc
    }

    /// Embeds a value of `Q(x)` into the extended context.
    pub fn lift(&self, f: &RatFunc) -> RatFunc {
        lift(&self.ext, f)
    }

    /// Taylor coefficients `t^0 .. t^order` of every component.
    pub fn taylor(&self, order: usize) -> Vec<Vec<RatFunc>> {
        self.components
            .iter()
            .map(|c| {
                let mut out: Vec<RatFunc> = Vec::with_capacity(order + 1);
                for k in 0..=order {
                    let mut v = c.num.get(k).cloned().unwrap_or_else(|| RatFunc::zero(&self.ctx));
                    for j in 1..=k.min(c.den.len() - 1) {
                        if !c.den[j].is_zero() && !out[k - j].is_zero() {
                            v = &v - &(&c.den[j] * &out[k - j]);
                        }
                    }
                    out.push(v);
                }
                out
            })
            .collect()
    }
}

fn lift(ext: &VarContext, f: &RatFunc) -> RatFunc {
    let map: Vec<usize> = (0..f.context().len()).map(|j| j + OFFSET).collect();
    f.embed(ext, &map)
}

/// Drops the leading `t, tp` slots of an extended-context polynomial that
/// does not involve them.
fn project(p: &MPoly, base: &VarContext) -> MPoly {
    MPoly::from_terms(base, p.terms().map(|(m, c)| (m.exponents()[OFFSET..].to_vec(), c.clone())))
}

/// The two halves of the flow certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowCertificate {
    /// `F(0) = x`.
    pub unit: bool,
    /// `dF_i/dt = d(x_i)` evaluated at `F`.
    pub ode: bool,
}

impl FlowCertificate {
    pub fn holds(&self) -> bool {
        self.unit && self.ode
    }
}

/// Checks, as exact identities, that `f` is the exponential flow of `d`.
pub fn verify_flow(d: &Derivation, f: &RationalFlow) -> Result<FlowCertificate, FlowError> {
    let ctx = d.context();
    if ctx != f.context() {
        return Err(ArithError::ContextMismatch.into());
    }
    let mut unit = true;
    for (i, c) in f.components.iter().enumerate() {
        if !c.value_at_zero(ctx).checked_eq(&RatFunc::var(ctx, i))? {
            unit = false;
        }
    }
    let values = f.values();
    let mut ode = true;
    for (i, v) in values.iter().enumerate() {
        let lhs = v.partial(T);
        let rhs = d.image(i).substitute(&values).map_err(structural(ctx, i))?;
        if !lhs.checked_eq(&rhs)? {
            ode = false;
            break;
        }
    }
    Ok(FlowCertificate { unit, ode })
}

/// Certifies `f` against `d`, marking it certified on success.
pub fn certify(d: &Derivation, mut f: RationalFlow) -> Result<(RationalFlow, FlowCertificate), FlowError> {
    let cert = verify_flow(d, &f)?;
    f.certified = cert.holds();
    Ok((f, cert))
}

/// Group law `F(t + tp; x) = F(tp; F(t; x))`, as exact identities.
pub fn coaction_check(f: &RationalFlow) -> Result<bool, FlowError> {
    let ext = f.extended_context();
    let n = f.context().len();
    let t = RatFunc::var(ext, T);
    let tp = RatFunc::var(ext, TP);
    let values = f.values();

    let mut shifted = Vec::with_capacity(n + OFFSET);
    shifted.push(&t + &tp);
    shifted.push(tp.clone());
    shifted.extend((0..n).map(|j| RatFunc::var(ext, j + OFFSET)));

    let mut composed = Vec::with_capacity(n + OFFSET);
    composed.push(tp.clone());
    composed.push(tp);
    composed.extend(values.iter().cloned());

    for (i, v) in values.iter().enumerate() {
        let lhs = v.substitute(&shifted).map_err(structural(f.context(), i))?;
        let rhs = v.substitute(&composed).map_err(structural(f.context(), i))?;
        if !lhs.checked_eq(&rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `d(x_i) = dF_i/dt` at `t = 0`.
pub fn derivation_from_flow(f: &RationalFlow) -> Result<Derivation, FlowError> {
    let ctx = f.context();
    let zero = RatFunc::zero(ctx);
    let images = f
        .components
        .iter()
        .map(|c| {
            let p0 = c.num.first().unwrap_or(&zero);
            let p1 = c.num.get(1).unwrap_or(&zero);
            let q1 = c.den.get(1).unwrap_or(&zero);
            p1 - &(p0 * q1)
        })
        .collect();
    Ok(Derivation::new(ctx, images)?)
}

/// Rational slice read off component `i`, returned only if `s(F) = s + t`
/// holds exactly.
///
/// Writing `F_i = a(t) / (1 + b(t))`, the candidate is
/// `b_{m-1} / (m b_m)` with `m = deg b` (and `b_0 = 1`), or
/// `a_{n-1} / (n a_n)` when `b = 0`.
pub fn extract_slice(f: &RationalFlow, i: usize) -> Result<Option<RatFunc>, FlowError> {
    let ctx = f.context();
    let c = &f.components[i];
    if c.is_constant() {
        return Err(FlowError::ConstantComponent(ctx.name(i).to_string()));
    }
    let (lower, top, k) = if c.den.len() > 1 {
        let m = c.den.len() - 1;
        (&c.den[m - 1], &c.den[m], m)
    } else {
        let n = c.num.len() - 1;
        (&c.num[n - 1], &c.num[n], n)
    };
    let s = lower.checked_div(&top.scale(&rat(k as i64)))?;
    Ok(check_slice(f, &s)?.then_some(s))
}

/// `s(F(t; x)) = s(x) + t`.
pub fn check_slice(f: &RationalFlow, s: &RatFunc) -> Result<bool, FlowError> {
    let values = f.values();
    let moved = match s.substitute(&values) {
        Ok(v) => v,
        Err(ArithError::DivisionByZero) => return Ok(false),
        Err(e) => return Err(e.into()),
    };
    let expected = &f.lift(s) + &RatFunc::var(f.extended_context(), T);
    Ok(moved.checked_eq(&expected)?)
}

/// First verified slice over all components that move.
pub fn find_slice(f: &RationalFlow) -> Result<Option<(usize, RatFunc)>, FlowError> {
    for (i, c) in f.components.iter().enumerate() {
        if c.is_constant() {
            continue;
        }
        if let Some(s) = extract_slice(f, i)? {
            return Ok(Some((i, s)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrabilityStatus {
    /// A rational flow passed the exact certificate.
    Certified,
    /// No certified rational flow with denominators of degree at most the
    /// detection degree. Not a proof of non-integrability.
    NotDetected,
    /// Certification hit an identically vanishing denominator.
    DivergentStructure,
}

impl IntegrabilityStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            IntegrabilityStatus::Certified => "integrable-certified",
            IntegrabilityStatus::NotDetected => "not-detected-within-degree",
            IntegrabilityStatus::DivergentStructure => "divergent-structure",
        }
    }
}

#[derive(Debug, Clone)]
pub struct IntegrabilityVerdict {
    pub status: IntegrabilityStatus,
    /// Present (and certified) exactly when the status is `Certified`.
    pub flow: Option<RationalFlow>,
    pub certificate: Option<FlowCertificate>,
    pub detect_degree: usize,
}

impl IntegrabilityVerdict {
    pub fn is_certified(&self) -> bool {
        self.status == IntegrabilityStatus::Certified
    }

    fn not_detected(detect_degree: usize, certificate: Option<FlowCertificate>) -> Self {
        IntegrabilityVerdict { status: IntegrabilityStatus::NotDetected, flow: None, certificate, detect_degree }
    }
}

/// Proposes `P_i / Q_i` with `deg Q_i, deg P_i <= detect_degree` for each
/// series component and certifies the proposal against the generating
/// derivation.
pub fn detect_rational(s: &TruncFlow, detect_degree: usize) -> Result<IntegrabilityVerdict, FlowError> {
    let needed = required_order(detect_degree);
    if s.order < needed {
        return Err(FlowError::InsufficientOrder { order: s.order, needed, degree: detect_degree });
    }
    let ctx = s.context();
    let proposals = s
        .coeffs
        .par_iter()
        .enumerate()
        .map(|(i, series)| propose(ctx, i, &series[..needed + 1], detect_degree))
        .collect::<Result<Vec<_>, _>>()?;
    let Some(components) = proposals.into_iter().collect::<Option<Vec<_>>>() else {
        return Ok(IntegrabilityVerdict::not_detected(detect_degree, None));
    };
    let candidate = RationalFlow::from_components(ctx, components);
    match certify(s.derivation(), candidate) {
        Ok((flow, cert)) if cert.holds() => Ok(IntegrabilityVerdict {
            status: IntegrabilityStatus::Certified,
            flow: Some(flow),
            certificate: Some(cert),
            detect_degree,
        }),
        Ok((_, cert)) => Ok(IntegrabilityVerdict::not_detected(detect_degree, Some(cert))),
        Err(FlowError::Structural(_)) => Ok(IntegrabilityVerdict {
            status: IntegrabilityStatus::DivergentStructure,
            flow: None,
            certificate: None,
            detect_degree,
        }),
        Err(e) => Err(e),
    }
}

/// Number of specializations that must all reject before a component is
/// dropped without running the exact recurrence search.
const REJECTING_POINTS: usize = 2;

/// A recurrence over `Q(x)` specializes to one over `Q` that is no longer,
/// at every point where its coefficients are defined. So a specialized
/// complexity above `max_length` at generic points rules the component
/// out; only a point on the pole locus of the (unknown) connection
/// coefficients could mislead, and every rejecting point must agree.
fn exceeds_at_points(ctx: &VarContext, series: &[RatFunc], max_length: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut rejected = 0;
    for _ in 0..4 * REJECTING_POINTS {
        let point: Vec<BigRat> = (0..ctx.len())
            .map(|_| BigRat::new(rng.gen_range(-100_000i64..=100_000).into(), rng.gen_range(1i64..=997).into()))
            .collect();
        let Ok(values) = series.iter().map(|c| c.eval(&point)).collect::<Result<Vec<_>, _>>() else {
            continue;
        };
        if linear_complexity_within(&values, max_length).is_some() {
            return false;
        }
        rejected += 1;
        if rejected == REJECTING_POINTS {
            return true;
        }
    }
    false
}

fn propose(
    ctx: &VarContext,
    i: usize,
    series: &[RatFunc],
    detect_degree: usize,
) -> Result<Option<FlowComponent>, FlowError> {
    // A window that vanishes past index k is a polynomial of degree k: with
    // k <= detect_degree the window is at least twice the complexity k + 1,
    // so this is the unique minimal recurrence.
    let k = series.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    if 2 * (k + 1) < series.len() {
        if k > detect_degree {
            return Ok(None);
        }
        return FlowComponent::new(ctx.name(i), series[..=k].to_vec(), vec![RatFunc::one(ctx)]).map(Some);
    }
    if exceeds_at_points(ctx, series, detect_degree + 1) {
        return Ok(None);
    }
    let Some(rec) = berlekamp_massey_within(ctx, series, detect_degree + 1)? else {
        return Ok(None);
    };
    if rec.connection.len() > detect_degree + 1 {
        return Ok(None);
    }
    // P = (S * C) mod t^L
    let mut num = Vec::with_capacity(rec.length);
    for k in 0..rec.length {
        let mut v = RatFunc::zero(ctx);
        for (j, c) in rec.connection.iter().enumerate().take(k + 1) {
            if !c.is_zero() && !series[k - j].is_zero() {
                v = &v + &(c * &series[k - j]);
            }
        }
        num.push(v);
    }
    FlowComponent::new(ctx.name(i), num, rec.connection).map(Some)
}

/// `exp_series`, then `detect_rational`.
pub fn integrability_check(
    d: &Derivation,
    detect_degree: usize,
    order: usize,
) -> Result<IntegrabilityVerdict, FlowError> {
    let needed = required_order(detect_degree);
    if order < needed {
        return Err(FlowError::InsufficientOrder { order, needed, degree: detect_degree });
    }
    let s = exp_series(d, order)?;
    detect_rational(&s, detect_degree)
}
