//! Homogeneous derivations on toric varieties.
//!
//! `N` and `M` are identified with `Z^r` in mutually dual bases, so the
//! pairing `<p, m>` is the dot product. The homogeneous derivation
//! `D_{p,e}` sends the character `x^m` to `<p, m> x^{m+e}`; on the torus
//! chart `Q(x_1, ..., x_r)` it is `D(x_j) = p_j x^{e + b_j}`.

mod fm;

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{rat, BigRat, RatFunc, VarContext};
use crate::derivation::Derivation;

pub use fm::{feasible, Row};

pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_ROOT_BOUND: i64 = 5;
const SAMPLE_DENOMINATOR: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("the zero vector has no primitive part")]
    ZeroVector,
    #[error("vector {0} is not primitive")]
    NonPrimitive(LatticeVec),
    #[error("cone {0} is not strongly convex")]
    NotStronglyConvex(usize),
    #[error("cones {0} and {1} do not meet along a common face")]
    IncompatibleCones(usize, usize),
    #[error("rank must be positive")]
    ZeroRank,
    #[error("exponent {0} does not fit a machine integer")]
    ExponentTooLarge(BigInt),
    #[error("bound must be at least 1")]
    ZeroBound,
}

/// A vector of `N` or `M`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LatticeVec(pub Vec<BigInt>);

impl LatticeVec {
    pub fn from_i64(v: &[i64]) -> Self {
        LatticeVec(v.iter().map(|&k| BigInt::from(k)).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &LatticeVec) -> BigInt {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn neg(&self) -> LatticeVec {
        LatticeVec(self.0.iter().map(|a| -a).collect())
    }

    fn gcd(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, a| g.gcd(a))
    }

    /// Gcd of the coordinates is 1.
    pub fn is_primitive(&self) -> bool {
        self.gcd().is_one()
    }

    /// The vector divided by the gcd of its coordinates.
    pub fn primitive_part(&self) -> Result<LatticeVec, ToricError> {
        let g = self.gcd();
        if g.is_zero() {
            return Err(ToricError::ZeroVector);
        }
        Ok(LatticeVec(self.0.iter().map(|a| a / &g).collect()))
    }

    fn to_i64s(&self) -> Result<Vec<i64>, ToricError> {
        self.0
            .iter()
            .map(|a| a.to_i64().ok_or_else(|| ToricError::ExponentTooLarge(a.clone())))
            .collect()
    }

    fn as_rats(&self) -> Vec<BigRat> {
        self.0.iter().map(|a| BigRat::from_integer(a.clone())).collect()
    }

    /// Graded order: l1 norm, then lexicographic.
    fn graded_cmp(&self, other: &LatticeVec) -> Ordering {
        let norm = |v: &LatticeVec| v.0.iter().map(|a| a.abs()).sum::<BigInt>();
        norm(self).cmp(&norm(other)).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn is_primitive(v: &LatticeVec) -> bool {
    v.is_primitive()
}

pub fn primitive_part(v: &LatticeVec) -> Result<LatticeVec, ToricError> {
    v.primitive_part()
}

/// Rational polyhedral cone generated by primitive rays. The empty ray list
/// is the zero cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    rank: usize,
    rays: Vec<LatticeVec>,
}

impl Cone {
    /// Validates rank, primitivity and strong convexity.
    pub fn new(rank: usize, rays: Vec<LatticeVec>) -> Result<Self, ToricError> {
        let c = Cone::unchecked(rank, rays)?;
        if !strongly_convex(&c) {
            return Err(ToricError::NotStronglyConvex(0));
        }
        Ok(c)
    }

    /// Checks rank and primitivity only.
    pub fn unchecked(rank: usize, rays: Vec<LatticeVec>) -> Result<Self, ToricError> {
        for r in &rays {
            if r.rank() != rank {
                return Err(ToricError::RankMismatch { expected: rank, found: r.rank() });
            }
            if !r.is_primitive() {
                return Err(ToricError::NonPrimitive(r.clone()));
            }
        }
        Ok(Cone { rank, rays })
    }

    pub fn from_i64(rank: usize, rays: &[&[i64]]) -> Result<Self, ToricError> {
        Cone::new(rank, rays.iter().map(|r| LatticeVec::from_i64(r)).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVec] {
        &self.rays
    }

    /// Exact membership of a rational point.
    pub fn contains(&self, v: &[BigRat]) -> bool {
        let k = self.rays.len();
        let eqs = (0..self.rank)
            .map(|d| {
                let coeffs = self.rays.iter().map(|r| BigRat::from_integer(r.0[d].clone())).collect();
                Row::new(coeffs, v[d].clone())
            })
            .collect();
        if k == 0 {
            return v.iter().all(Zero::is_zero);
        }
        feasible(eqs, fm::nonnegativity(k))
    }
}

/// No nonzero non-negative combination of the rays vanishes, decided by
/// Fourier-Motzkin on `{lambda >= 0, sum lambda = 1, R lambda = 0}`.
pub fn strongly_convex(c: &Cone) -> bool {
    let k = c.rays.len();
    if k == 0 {
        return true;
    }
    let mut eqs: Vec<Row> = (0..c.rank)
        .map(|d| {
            let coeffs = c.rays.iter().map(|r| BigRat::from_integer(r.0[d].clone())).collect();
            Row::new(coeffs, BigRat::zero())
        })
        .collect();
    eqs.push(Row::new(vec![BigRat::one(); k], BigRat::one()));
    !feasible(eqs, fm::nonnegativity(k))
}

/// `<e, rho> >= 0` for every ray.
pub fn in_dual(e: &LatticeVec, c: &Cone) -> Result<bool, ToricError> {
    check_rank(c.rank, e)?;
    Ok(c.rays.iter().all(|r| !e.dot(r).is_negative()))
}

fn check_rank(rank: usize, v: &LatticeVec) -> Result<(), ToricError> {
    if v.rank() == rank {
        Ok(())
    } else {
        Err(ToricError::RankMismatch { expected: rank, found: v.rank() })
    }
}

/// A fan given by its cones; `rays` is the deduplicated union of the cone
/// rays in order of first appearance.
#[derive(Clone, Debug)]
pub struct Fan {
    rank: usize,
    cones: Vec<Cone>,
    rays: Vec<LatticeVec>,
}

impl Fan {
    /// Validates every cone. In rank at most 2, pairwise face compatibility
    /// is also checked unless `trust` is set.
    pub fn new(rank: usize, cones: Vec<Cone>, trust: bool) -> Result<Self, ToricError> {
        if rank == 0 {
            return Err(ToricError::ZeroRank);
        }
        for (i, c) in cones.iter().enumerate() {
            if c.rank != rank {
                return Err(ToricError::RankMismatch { expected: rank, found: c.rank });
            }
            if !strongly_convex(c) {
                return Err(ToricError::NotStronglyConvex(i));
            }
        }
        let mut rays: Vec<LatticeVec> = Vec::new();
        for c in &cones {
            for r in &c.rays {
                if !rays.contains(r) {
                    rays.push(r.clone());
                }
            }
        }
        let fan = Fan { rank, cones, rays };
        if rank == 2 && !trust {
            fan.check_planar_faces()?;
        }
        Ok(fan)
    }

    pub fn from_i64(rank: usize, cones: &[&[&[i64]]]) -> Result<Self, ToricError> {
        let cones = cones
            .iter()
            .map(|c| Cone::unchecked(rank, c.iter().map(|r| LatticeVec::from_i64(r)).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Fan::new(rank, cones, false)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    /// The primitive ray generators `Sigma(1)`.
    pub fn rays(&self) -> &[LatticeVec] {
        &self.rays
    }

    /// In the plane, two cones meet along a common face iff no ray of the
    /// fan lies strictly inside a two-dimensional cone.
    fn check_planar_faces(&self) -> Result<(), ToricError> {
        for (i, c) in self.cones.iter().enumerate() {
            let Some((a, b)) = planar_sector(c) else { continue };
            for (j, other) in self.cones.iter().enumerate() {
                if other.rays.iter().any(|r| strictly_between(&a, r, &b)) {
                    return Err(ToricError::IncompatibleCones(i.min(j), i.max(j)));
                }
            }
        }
        Ok(())
    }

    fn support_contains(&self, v: &[BigRat]) -> bool {
        self.cones.iter().any(|c| c.contains(v))
    }
}

fn cross(a: &LatticeVec, b: &LatticeVec) -> BigInt {
    &a.0[0] * &b.0[1] - &a.0[1] * &b.0[0]
}

/// Boundary rays `(a, b)`, counterclockwise, of a two-dimensional planar
/// cone; `None` for cones of lower dimension.
fn planar_sector(c: &Cone) -> Option<(LatticeVec, LatticeVec)> {
    let a = c.rays.iter().find(|a| c.rays.iter().all(|r| !cross(a, r).is_negative()))?;
    let b = c.rays.iter().find(|b| c.rays.iter().all(|r| !cross(r, b).is_negative()))?;
    cross(a, b).is_positive().then(|| (a.clone(), b.clone()))
}

fn strictly_between(a: &LatticeVec, v: &LatticeVec, b: &LatticeVec) -> bool {
    cross(a, v).is_positive() && cross(v, b).is_positive()
}

/// The pair `(p, e)` of the homogeneous derivation `D_{p,e}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogDeriv {
    p: LatticeVec,
    e: LatticeVec,
}

impl HomogDeriv {
    /// Requires `p` primitive.
    pub fn new(p: LatticeVec, e: LatticeVec) -> Result<Self, ToricError> {
        check_rank(p.rank(), &e)?;
        if !p.is_primitive() {
            return Err(ToricError::NonPrimitive(p));
        }
        Ok(HomogDeriv { p, e })
    }

    /// Replaces `p` by its primitive part (a positive rescaling of the
    /// derivation). The flag reports whether `p` changed.
    pub fn normalized(p: LatticeVec, e: LatticeVec) -> Result<(Self, bool), ToricError> {
        let prim = p.primitive_part()?;
        let changed = prim != p;
        Ok((HomogDeriv::new(prim, e)?, changed))
    }

    pub fn from_i64(p: &[i64], e: &[i64]) -> Result<Self, ToricError> {
        HomogDeriv::new(LatticeVec::from_i64(p), LatticeVec::from_i64(e))
    }

    pub fn p(&self) -> &LatticeVec {
        &self.p
    }

    pub fn e(&self) -> &LatticeVec {
        &self.e
    }

    pub fn rank(&self) -> usize {
        self.p.rank()
    }

    /// `<p, e>`.
    pub fn pairing(&self) -> BigInt {
        self.p.dot(&self.e)
    }
}

/// Rational integrability of `D_{p,e}`: `<p, e> = +-1`.
pub fn integrable_criterion(h: &HomogDeriv) -> Result<bool, ToricError> {
    if !h.p.is_primitive() {
        return Err(ToricError::NonPrimitive(h.p.clone()));
    }
    Ok(h.pairing().abs().is_one())
}

/// Variables `x, y, z` in rank at most 3, `x1 .. xr` beyond.
pub fn chart_context(rank: usize) -> VarContext {
    let names: Vec<String> = if rank <= 3 {
        ["x", "y", "z"][..rank].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=rank).map(|i| format!("x{i}")).collect()
    };
    VarContext::new(&names).expect("chart variable names are valid")
}

/// `D_{p,e}` on the torus chart `Q(x_1, ..., x_r)`.
pub fn to_derivation(h: &HomogDeriv) -> Result<Derivation, ToricError> {
    let ctx = chart_context(h.rank());
    let e = h.e.to_i64s()?;
    let images = h
        .p
        .0
        .iter()
        .enumerate()
        .map(|(j, pj)| {
            let mut exps = e.clone();
            exps[j] += 1;
            RatFunc::laurent_monomial(&ctx, &exps, BigRat::from_integer(pj.clone()))
        })
        .collect();
    Ok(Derivation::new(&ctx, images).expect("one image per chart variable"))
}

/// The character `x^m` on the torus chart.
pub fn character(ctx: &VarContext, m: &LatticeVec) -> Result<RatFunc, ToricError> {
    Ok(RatFunc::laurent_monomial(ctx, &m.to_i64s()?, rat(1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootCase {
    /// `e` lies in the dual cone.
    DualCone,
    /// A ray `rho_e` with `p = +-rho_e`, `rho_e(e) = -1` and `rho(e) >= 0`
    /// for the remaining rays.
    Root,
}

impl RootCase {
    pub fn as_str(self) -> &'static str {
        match self {
            RootCase::DualCone => "dual-cone",
            RootCase::Root => "root",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootVerdict {
    pub integrable: bool,
    pub extends: bool,
    pub lnd: bool,
    pub regular_on_fan: bool,
    pub witness_ray: Option<LatticeVec>,
    pub case: Option<RootCase>,
}

/// The ray `rho_e` among `rays` with `p = +-rho_e`, `rho_e(e) = -1` and
/// `rho(e) >= 0` for every other ray.
fn root_witness(rays: &[LatticeVec], p: &LatticeVec, e: &LatticeVec) -> Option<LatticeVec> {
    let minus_one = -BigInt::one();
    let w = rays.iter().find(|r| r.dot(e) == minus_one)?;
    let others_ok = rays.iter().filter(|r| *r != w).all(|r| !r.dot(e).is_negative());
    (others_ok && (p == w || *p == w.neg())).then(|| w.clone())
}

/// Witness ray for `e` being a root of `rays`, regardless of `p`.
fn root_ray(rays: &[LatticeVec], e: &LatticeVec) -> Option<LatticeVec> {
    let minus_one = -BigInt::one();
    let mut found = None;
    for r in rays {
        let v = r.dot(e);
        if v == minus_one && found.is_none() {
            found = Some(r.clone());
        } else if v.is_negative() {
            return None;
        }
    }
    found
}

/// Whether `D_{p,e}` extends to the affine chart of `c`, and whether it is
/// locally nilpotent there.
pub fn extends_to_cone(h: &HomogDeriv, c: &Cone) -> Result<RootVerdict, ToricError> {
    check_rank(c.rank, &h.p)?;
    let integrable = integrable_criterion(h)?;
    let dual = in_dual(&h.e, c)?;
    let witness = root_witness(&c.rays, &h.p, &h.e);
    let root = witness.is_some();
    Ok(RootVerdict {
        integrable,
        extends: dual || root,
        lnd: root,
        regular_on_fan: root,
        witness_ray: witness,
        case: if root {
            Some(RootCase::Root)
        } else if dual {
            Some(RootCase::DualCone)
        } else {
            None
        },
    })
}

/// Whether `D_{p,e}` is the derivation of a regular homogeneous action on
/// the (semi-affine) toric variety of `f`.
pub fn regular_on_fan(h: &HomogDeriv, f: &Fan) -> Result<RootVerdict, ToricError> {
    check_rank(f.rank, &h.p)?;
    let integrable = integrable_criterion(h)?;
    let witness = root_witness(&f.rays, &h.p, &h.e);
    let regular = witness.is_some();
    let mut extends = true;
    let mut all_dual = true;
    for c in &f.cones {
        let v = extends_to_cone(h, c)?;
        extends &= v.extends;
        all_dual &= v.case == Some(RootCase::DualCone);
    }
    Ok(RootVerdict {
        integrable,
        extends,
        lnd: regular,
        regular_on_fan: regular,
        witness_ray: witness,
        case: if regular {
            Some(RootCase::Root)
        } else if all_dual {
            Some(RootCase::DualCone)
        } else {
            None
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Root {
    pub e: LatticeVec,
    pub witness: LatticeVec,
}

/// Every root `e` with `max |e_i| <= bound`, ordered by l1 norm and then
/// lexicographically.
pub fn enumerate_roots(f: &Fan, bound: i64) -> Result<Vec<Root>, ToricError> {
    if bound < 1 {
        return Err(ToricError::ZeroBound);
    }
    let r = f.rank as u32;
    let side = (2 * bound + 1) as u64;
    let total = side.pow(r);
    let mut roots: Vec<Root> = (0..total)
        .into_par_iter()
        .filter_map(|mut k| {
            let mut coords = Vec::with_capacity(r as usize);
            for _ in 0..r {
                coords.push((k % side) as i64 - bound);
                k /= side;
            }
            let e = LatticeVec::from_i64(&coords);
            root_ray(&f.rays, &e).map(|witness| Root { e, witness })
        })
        .collect();
    roots.sort_by(|a, b| a.e.graded_cmp(&b.e));
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiAffineVerdict {
    Convex,
    NotConvex,
    /// Sampling verdict for rank at least 3: `pass` means every sampled
    /// point of the ray hull lay in some cone.
    Probabilistic { pass: bool, samples: usize },
}

impl SemiAffineVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            SemiAffineVerdict::Convex => "convex",
            SemiAffineVerdict::NotConvex => "not-convex",
            SemiAffineVerdict::Probabilistic { pass: true, .. } => "unknown-probabilistic(pass)",
            SemiAffineVerdict::Probabilistic { pass: false, .. } => "unknown-probabilistic(fail)",
        }
    }
}

/// Convexity of the support of `f`, which for toric varieties is
/// semi-affineness. The support is convex iff it equals the cone spanned by
/// all rays.
pub fn semi_affine(f: &Fan, samples: usize, seed: u64) -> SemiAffineVerdict {
    match f.rank {
        1 => SemiAffineVerdict::Convex,
        2 => planar_convexity(f),
        _ => sampled_convexity(f, samples, seed),
    }
}

fn planar_convexity(f: &Fan) -> SemiAffineVerdict {
    let mut rays = f.rays.clone();
    if rays.len() < 2 {
        return SemiAffineVerdict::Convex;
    }
    rays.sort_by(angle_cmp);
    for k in 0..rays.len() {
        let a = &rays[k];
        let b = &rays[(k + 1) % rays.len()];
        if !cross(a, b).is_positive() {
            continue;
        }
        // the open sector between consecutive rays lies in the hull; it is
        // covered iff some cone contains its bisector
        let mid: Vec<BigRat> = a.0.iter().zip(&b.0).map(|(x, y)| BigRat::from_integer(x + y)).collect();
        if !f.support_contains(&mid) {
            return SemiAffineVerdict::NotConvex;
        }
    }
    SemiAffineVerdict::Convex
}

fn half(v: &LatticeVec) -> u8 {
    let (x, y) = (&v.0[0], &v.0[1]);
    if y.is_positive() || (y.is_zero() && x.is_positive()) {
        0
    } else {
        1
    }
}

/// Counterclockwise order by angle in `[0, 2 pi)`.
fn angle_cmp(a: &LatticeVec, b: &LatticeVec) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| BigInt::zero().cmp(&cross(a, b)))
}

fn sampled_convexity(f: &Fan, samples: usize, seed: u64) -> SemiAffineVerdict {
    if f.rays.is_empty() {
        return SemiAffineVerdict::Probabilistic { pass: true, samples: 0 };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<BigRat>> = (0..samples)
        .map(|_| {
            let mut v = vec![BigRat::zero(); f.rank];
            for r in &f.rays {
                let d = rng.gen_range(1..=SAMPLE_DENOMINATOR);
                let k = rng.gen_range(0..=d);
                let lambda = BigRat::new(k.into(), d.into());
                for (x, a) in v.iter_mut().zip(r.as_rats()) {
                    *x += &lambda * a;
                }
            }
            v
        })
        .collect();
    let pass = points.par_iter().all(|p| f.support_contains(p));
    SemiAffineVerdict::Probabilistic { pass, samples }
}
