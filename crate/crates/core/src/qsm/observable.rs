//! Finitely supported observables on the boundary groupoid.
//!
//! A point is `(g, M, x, u, s)`: `g` a rational matrix, `M` an integral source
//! matrix with `gM` integral, `x ∈ [0,1]`, and the coset slot `u·s` kept lazily as
//! a rational matrix `u` acting on a base coset `s`. Functions only see the
//! invariants: the tag `Herm(gM)·Herm(M)⁻¹`, the source class `Herm(M)`, and the
//! canonical slot `(Herm(M)·M⁻¹·u)·s`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use super::lattice::{act_slot, QMat2};
use super::scalar::{coef_i64, coef_to_c64, Coef, Scalar};
use crate::arith::{moebius_act, ExtendedPoint, Mat2Z, Rat};
use crate::cf::{boundary_digit, word_matrix};
use crate::coset::P1Elt;
use crate::cusp::CuspContext;
use crate::error::{Error, Result};
use crate::lms::boundary_value;

#[derive(Clone, Debug)]
pub struct Point {
    pub g: QMat2,
    pub m: QMat2,
    pub x: ExtendedPoint,
    pub u: QMat2,
    pub s: P1Elt,
}

impl Point {
    /// `(1, ρ, x, s)` with `ρ = I`.
    pub fn base(x: ExtendedPoint, s: P1Elt) -> Self {
        Point { g: QMat2::identity(), m: QMat2::identity(), x, u: QMat2::identity(), s }
    }

    pub fn tag(&self) -> Result<QMat2> {
        let r = self.g.mul(&self.m).hermite()?;
        Ok(r.mul(&self.m.hermite()?.inverse().expect("nonsingular")))
    }

    pub fn slot(&self) -> Result<Option<P1Elt>> {
        let hm = self.m.hermite()?;
        let gamma = hm.mul(&self.m.inverse().expect("nonsingular"));
        Ok(act_slot(&gamma.mul(&self.u), &self.s))
    }
}

/// Digit of `x ∈ (0, 1]` with the cylinder boundary convention.
pub fn digit(x: &ExtendedPoint) -> Result<u64> {
    match x {
        ExtendedPoint::Rational(r) => boundary_digit(r),
        ExtendedPoint::Surd(_) => {
            let inv = moebius_act(&Mat2Z::from_i64(0, 1, 1, 0), x)?;
            inv.floor().and_then(|f| f.to_u64()).filter(|&k| k >= 1)
        }
        ExtendedPoint::Infinity => None,
    }
    .ok_or_else(|| Error::Qsm(format!("{x} has no digit")))
}

pub fn in_cylinder(x: &ExtendedPoint, word: &[u64]) -> Result<bool> {
    let mut y = x.clone();
    for &k in word {
        let inside = y.cmp_finite(&ExtendedPoint::from_int(0)).is_some_and(|o| o.is_gt())
            && y.cmp_finite(&ExtendedPoint::from_int(1)).is_some_and(|o| o.is_le());
        if !inside || digit(&y)? != k {
            return Ok(false);
        }
        y = moebius_act(&Mat2Z::from_i64(-(k as i64), 1, 1, 0), &y)?;
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub enum SSupport {
    All(Coef),
    Map(BTreeMap<P1Elt, Coef>),
}

impl SSupport {
    fn eval(&self, slot: Option<P1Elt>) -> Coef {
        match (self, slot) {
            (SSupport::All(c), _) => c.clone(),
            (SSupport::Map(m), Some(s)) => m.get(&s).cloned().unwrap_or_else(Coef::zero),
            (SSupport::Map(_), None) => Coef::zero(),
        }
    }

    fn sup(&self) -> f64 {
        match self {
            SSupport::All(c) => coef_to_c64(c).norm(),
            SSupport::Map(m) => m.values().map(|c| coef_to_c64(c).norm()).fold(0.0, f64::max),
        }
    }
}

/// Constraint on the source lattice `Herm(M)` reduced mod N.
#[derive(Clone, Debug, PartialEq)]
pub enum RhoPattern {
    Any,
    Mod([u64; 4]),
}

/// Bulk pairing `c·⟨ψ, h(x, σ)⟩` with a cache keyed by `(x, σ)`.
pub struct BoundaryProfile {
    pub ctx: Arc<CuspContext>,
    pub c: Complex64,
    cache: Mutex<HashMap<(String, P1Elt), Complex64>>,
}

impl BoundaryProfile {
    pub fn new(ctx: Arc<CuspContext>, c: Complex64) -> Self {
        BoundaryProfile { ctx, c, cache: Mutex::new(HashMap::new()) }
    }

    pub fn value(&self, x: &ExtendedPoint, s: &P1Elt) -> Result<Complex64> {
        let key = (x.to_string(), *s);
        if let Some(v) = self.cache.lock().expect("cache").get(&key) {
            return Ok(*v);
        }
        let v = boundary_value(self.c, Some(&self.ctx), x, s)?;
        self.cache.lock().expect("cache").insert(key, v);
        Ok(v)
    }
}

impl fmt::Debug for BoundaryProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundaryProfile(level {}, c = {})", self.ctx.space.level, self.c)
    }
}

#[derive(Clone, Debug)]
pub enum XProfile {
    Const(Coef),
    /// Indicator of the cylinder of a digit word.
    Cylinder(Vec<u64>),
    BoundaryValue(Arc<BoundaryProfile>),
    /// `p(g_w·x)`.
    Pullback(Vec<u64>, Box<XProfile>),
    Product(Box<XProfile>, Box<XProfile>),
}

impl XProfile {
    pub fn eval<S: Scalar>(&self, x: &ExtendedPoint, slot: Option<P1Elt>) -> Result<S> {
        match self {
            XProfile::Const(c) => Ok(S::from_coef(c)),
            XProfile::Cylinder(w) => Ok(if in_cylinder(x, w)? { S::one() } else { S::zero() }),
            XProfile::BoundaryValue(b) => {
                let Some(s) = slot else { return Ok(S::zero()) };
                if !matches!(x, ExtendedPoint::Surd(_)) {
                    return Err(Error::Qsm(format!("boundary value needs a quadratic irrationality, got {x}")));
                }
                S::from_c64(b.value(x, &s)?)
                    .ok_or_else(|| Error::Qsm("boundary values are not exact; evaluate in floating mode".into()))
            }
            XProfile::Pullback(w, p) => p.eval(&moebius_act(&word_matrix(w), x)?, slot),
            XProfile::Product(a, b) => {
                let va: S = a.eval(x, slot)?;
                if va.is_zero() {
                    return Ok(va);
                }
                Ok(va * b.eval(x, slot)?)
            }
        }
    }

    fn sup(&self) -> f64 {
        match self {
            XProfile::Const(c) => coef_to_c64(c).norm(),
            XProfile::Cylinder(_) => 1.0,
            XProfile::BoundaryValue(_) => f64::INFINITY,
            XProfile::Pullback(_, p) => p.sup(),
            XProfile::Product(a, b) => a.sup() * b.sup(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub coef: Coef,
    pub tag: QMat2,
    pub rho: RhoPattern,
    pub s_support: SSupport,
    pub x_profile: XProfile,
}

impl Term {
    /// `coef·[tag = L]` with no slot or x dependence.
    pub fn delta(tag: QMat2, coef: Coef) -> Self {
        Term { coef, tag, rho: RhoPattern::Any, s_support: SSupport::All(coef_i64(1)), x_profile: XProfile::Const(coef_i64(1)) }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Terms(Vec<Term>),
    Sum(Vec<Observable>),
    Scale(Coef, Observable),
    Conv(Observable, Observable),
    Star(Observable),
    Evolve(f64, Observable),
    EvolveImag(f64, Observable),
    Compose(Mat2Z, Observable),
    ShiftT(Observable),
    MulProfile(XProfile, Observable),
}

#[derive(Clone, Debug)]
pub struct Observable {
    node: Arc<Node>,
    tags: Arc<BTreeSet<QMat2>>,
    level: u64,
}

impl Observable {
    fn wrap(node: Node, tags: BTreeSet<QMat2>, level: u64) -> Self {
        Observable { node: Arc::new(node), tags: Arc::new(tags), level }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Tags that can carry nonzero values.
    pub fn tags(&self) -> &BTreeSet<QMat2> {
        &self.tags
    }

    pub fn terms(level: u64, terms: Vec<Term>) -> Result<Self> {
        if level == 0 {
            return Err(Error::Qsm("level must be positive".into()));
        }
        for t in &terms {
            if t.tag.det().is_zero() {
                return Err(Error::Qsm(format!("singular tag {}", t.tag)));
            }
            if let SSupport::Map(m) = &t.s_support {
                if m.keys().any(|s| s.n != level) {
                    return Err(Error::Qsm("slot support at a different level".into()));
                }
            }
        }
        let tags = terms.iter().map(|t| t.tag.clone()).collect();
        Ok(Self::wrap(Node::Terms(terms), tags, level))
    }

    /// The convolution unit: `[tag = 1]` with full slot support.
    pub fn unit(level: u64) -> Self {
        Self::terms(level, vec![Term::delta(QMat2::identity(), coef_i64(1))]).expect("valid unit")
    }

    pub fn zero(level: u64) -> Self {
        Self::terms(level, vec![]).expect("valid zero")
    }

    fn check_level(a: &Observable, b: &Observable) -> Result<()> {
        if a.level != b.level {
            return Err(Error::Qsm(format!("level mismatch: {} vs {}", a.level, b.level)));
        }
        Ok(())
    }

    pub fn convolve(&self, other: &Observable) -> Result<Self> {
        Self::check_level(self, other)?;
        let tags = self.tags.iter().flat_map(|a| other.tags.iter().map(move |b| a.mul(b))).collect();
        Ok(Self::wrap(Node::Conv(self.clone(), other.clone()), tags, self.level))
    }

    pub fn star(&self) -> Self {
        let tags = self.tags.iter().map(|t| t.inverse().expect("nonsingular tag")).collect();
        Self::wrap(Node::Star(self.clone()), tags, self.level)
    }

    pub fn add(&self, other: &Observable) -> Result<Self> {
        Self::check_level(self, other)?;
        let tags = self.tags.union(&other.tags).cloned().collect();
        Ok(Self::wrap(Node::Sum(vec![self.clone(), other.clone()]), tags, self.level))
    }

    pub fn scale(&self, c: Coef) -> Self {
        Self::wrap(Node::Scale(c, self.clone()), (*self.tags).clone(), self.level)
    }

    /// `σ_t`: multiplies by `|det g|^{it}`.
    pub fn evolve(&self, t: f64) -> Self {
        Self::wrap(Node::Evolve(t, self.clone()), (*self.tags).clone(), self.level)
    }

    /// `σ_{iβ}`: multiplies by `|det g|^{−β}`.
    pub fn evolve_imag(&self, beta: f64) -> Self {
        Self::wrap(Node::EvolveImag(beta, self.clone()), (*self.tags).clone(), self.level)
    }

    /// `f∘c` for `c ∈ GL₂(ℤ)` acting on both `x` and the slot.
    pub fn compose(&self, c: &Mat2Z) -> Result<Self> {
        if !c.is_gl2z() {
            return Err(Error::Qsm(format!("{c} is not in GL2(Z)")));
        }
        Ok(Self::wrap(Node::Compose(c.clone(), self.clone()), (*self.tags).clone(), self.level))
    }

    /// `f∘T` for the shift `T(x, s) = g_k⁻¹·(x, s)`, `k` the digit of `x`.
    pub fn shift_t(&self) -> Self {
        Self::wrap(Node::ShiftT(self.clone()), (*self.tags).clone(), self.level)
    }

    pub fn mul_profile(&self, p: XProfile) -> Self {
        Self::wrap(Node::MulProfile(p, self.clone()), (*self.tags).clone(), self.level)
    }

    /// `χ_{X_k}·(f∘g_k⁻¹)`.
    pub fn cylinder_translate(&self, k: u64) -> Self {
        let gk_inv = Mat2Z::from_i64(-(k as i64), 1, 1, 0);
        self.compose(&gk_inv).expect("g_k is invertible").mul_profile(XProfile::Cylinder(vec![k]))
    }

    /// Crude bound on `sup |f|`, used for truncation errors.
    pub fn sup_bound(&self) -> f64 {
        match &*self.node {
            Node::Terms(ts) => ts.iter().map(|t| coef_to_c64(&t.coef).norm() * t.s_support.sup() * t.x_profile.sup()).sum(),
            Node::Sum(v) => v.iter().map(Observable::sup_bound).sum(),
            Node::Scale(c, f) => coef_to_c64(c).norm() * f.sup_bound(),
            Node::Conv(a, b) => a.sup_bound() * b.sup_bound() * b.tags.len() as f64,
            Node::EvolveImag(beta, f) => {
                let worst = f.tags.iter().map(|t| t.det().abs().to_f64().unwrap_or(f64::NAN).powf(-beta)).fold(0.0, f64::max);
                worst * f.sup_bound()
            }
            Node::MulProfile(p, f) => p.sup() * f.sup_bound(),
            Node::Star(f) | Node::Evolve(_, f) | Node::Compose(_, f) | Node::ShiftT(f) => f.sup_bound(),
        }
    }

    pub fn eval<S: Scalar>(&self, p: &Point) -> Result<S> {
        match &*self.node {
            Node::Terms(ts) => {
                if ts.is_empty() {
                    return Ok(S::zero());
                }
                let tag = p.tag()?;
                if !ts.iter().any(|t| t.tag == tag) {
                    return Ok(S::zero());
                }
                let slot = p.slot()?;
                let hm = p.m.hermite()?;
                let mut acc = S::zero();
                for t in ts.iter().filter(|t| t.tag == tag) {
                    if let RhoPattern::Mod(pat) = &t.rho {
                        if !rho_matches(&hm, pat, self.level) {
                            continue;
                        }
                    }
                    let c = &t.coef * t.s_support.eval(slot);
                    if c.is_zero() {
                        continue;
                    }
                    acc = acc + S::from_coef(&c) * t.x_profile.eval::<S>(&p.x, slot)?;
                }
                Ok(acc)
            }
            Node::Sum(v) => v.iter().try_fold(S::zero(), |acc, f| Ok(acc + f.eval::<S>(p)?)),
            Node::Scale(c, f) => Ok(S::from_coef(c) * f.eval::<S>(p)?),
            Node::Conv(a, b) => {
                let hm = p.m.hermite()?;
                let minv = p.m.inverse().expect("nonsingular");
                let mut acc = S::zero();
                for l2 in b.tags.iter() {
                    let hsrc = l2.mul(&hm);
                    if !hsrc.is_hermite() {
                        continue;
                    }
                    let h = hsrc.mul(&minv);
                    let vb: S = b.eval(&Point { g: h.clone(), m: p.m.clone(), x: p.x.clone(), u: p.u.clone(), s: p.s })?;
                    if vb.is_zero() {
                        continue;
                    }
                    let hinv = h.inverse().expect("nonsingular");
                    let va: S = a.eval(&Point { g: p.g.mul(&hinv), m: hsrc, x: p.x.clone(), u: h.mul(&p.u), s: p.s })?;
                    acc = acc + va * vb;
                }
                Ok(acc)
            }
            Node::Star(f) => {
                let ginv = p.g.inverse().expect("nonsingular");
                let q = Point { g: ginv, m: p.g.mul(&p.m), x: p.x.clone(), u: p.g.mul(&p.u), s: p.s };
                Ok(f.eval::<S>(&q)?.conj())
            }
            Node::Evolve(t, f) => {
                let v: S = f.eval(p)?;
                if v.is_zero() {
                    return Ok(v);
                }
                let det = p.tag()?.det().abs().to_f64().unwrap_or(f64::NAN);
                let phase = Complex64::from_polar(1.0, t * det.ln());
                let phase = S::from_c64(phase)
                    .ok_or_else(|| Error::Qsm("time evolution is not exact; evaluate in floating mode".into()))?;
                Ok(phase * v)
            }
            Node::EvolveImag(beta, f) => {
                let v: S = f.eval(p)?;
                if v.is_zero() {
                    return Ok(v);
                }
                let det = p.tag()?.det().abs();
                Ok(det_power::<S>(&det, -beta)? * v)
            }
            Node::Compose(c, f) => {
                let q = Point {
                    g: p.g.clone(),
                    m: p.m.clone(),
                    x: moebius_act(c, &p.x)?,
                    u: QMat2::from_mat(c).mul(&p.u),
                    s: p.s,
                };
                f.eval(&q)
            }
            Node::ShiftT(f) => {
                let k = digit(&p.x)?;
                let ginv = Mat2Z::from_i64(-(k as i64), 1, 1, 0);
                let q = Point {
                    g: p.g.clone(),
                    m: p.m.clone(),
                    x: moebius_act(&ginv, &p.x)?,
                    u: QMat2::from_mat(&ginv).mul(&p.u),
                    s: p.s,
                };
                f.eval(&q)
            }
            Node::MulProfile(prof, f) => {
                // profile first: `f` may be undefined off its cylinder
                let c: S = prof.eval(&p.x, p.slot()?)?;
                if c.is_zero() {
                    return Ok(c);
                }
                Ok(c * f.eval::<S>(p)?)
            }
        }
    }
}

fn rho_matches(hm: &QMat2, pat: &[u64; 4], n: u64) -> bool {
    let nn = num_bigint::BigInt::from(n);
    hm.0.iter().zip(pat).all(|(x, &p)| {
        use num_integer::Integer;
        x.to_integer().mod_floor(&nn) == num_bigint::BigInt::from(p % n)
    })
}

/// `d^e` for rational `d > 0`: exact when `e` is a small integer.
fn det_power<S: Scalar>(d: &Rat, e: f64) -> Result<S> {
    if e.fract() == 0.0 && e.abs() <= 64.0 {
        let k = e as i32;
        return Ok(S::from_rat(&d.pow(k)));
    }
    let v = d.to_f64().unwrap_or(f64::NAN).powf(e);
    S::from_c64(Complex64::new(v, 0.0)).ok_or_else(|| Error::Qsm("non-integral exponent is not exact".into()))
}
