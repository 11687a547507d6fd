//! Continued fractions and the Gauss shift on [0,1] × ℙ¹(ℤ/N).

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{moebius_act, ExtendedPoint, Mat2Z, Rat};
use crate::coset::{act_left, P1Elt};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CFExpansion {
    pub preperiod: Vec<u64>,
    pub period: Vec<u64>,
    #[serde(skip)]
    pub source: ExtendedPoint,
}

impl CFExpansion {
    pub fn is_periodic(&self) -> bool {
        !self.period.is_empty()
    }

    /// Number of available digits; `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        (!self.is_periodic()).then_some(self.preperiod.len())
    }

    pub fn is_empty(&self) -> bool {
        self.preperiod.is_empty() && self.period.is_empty()
    }

    /// The `i`-th digit (0-based).
    pub fn digit(&self, i: usize) -> Option<u64> {
        if i < self.preperiod.len() {
            return Some(self.preperiod[i]);
        }
        if self.period.is_empty() {
            return None;
        }
        let j = (i - self.preperiod.len()) % self.period.len();
        Some(self.period[j])
    }

    pub fn prefix(&self, n: usize) -> Vec<u64> {
        (0..n).map_while(|i| self.digit(i)).collect()
    }

    /// Product of the period generators `∏ g_{k_i}`.
    pub fn period_matrix(&self) -> Option<Mat2Z> {
        self.is_periodic().then(|| word_matrix(&self.period))
    }

    pub fn preperiod_matrix(&self) -> Mat2Z {
        word_matrix(&self.preperiod)
    }
}

impl fmt::Display for CFExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
        if self.is_periodic() {
            write!(f, "[{}; ({})]", join(&self.preperiod), join(&self.period))
        } else {
            write!(f, "[{}]", join(&self.preperiod))
        }
    }
}

pub fn word_matrix(digits: &[u64]) -> Mat2Z {
    digits.iter().fold(Mat2Z::identity(), |acc, &k| acc.mul(&Mat2Z::g(k)))
}

fn unit_interval_check(x: &ExtendedPoint) -> Result<()> {
    let zero = ExtendedPoint::from_int(0);
    let one = ExtendedPoint::from_int(1);
    match (x.cmp_finite(&zero), x.cmp_finite(&one)) {
        (Some(a), Some(b)) if a.is_ge() && b.is_le() => Ok(()),
        _ => Err(Error::Cf(format!("{x} is outside [0,1]"))),
    }
}

const MAX_PERIOD_SEARCH: usize = 1_000_000;

/// Floor-digit expansion; periodicity of surds detected by exact repetition.
pub fn cf_expand(x: &ExtendedPoint) -> Result<CFExpansion> {
    unit_interval_check(x)?;
    match x {
        ExtendedPoint::Rational(r) => {
            let mut digits = Vec::new();
            let mut r = r.clone();
            while !r.is_zero() {
                let y = r.recip();
                let k = y.floor();
                digits.push(k.to_integer().to_u64().ok_or_else(|| Error::Cf("digit overflow".into()))?);
                r = y - k;
            }
            Ok(CFExpansion { preperiod: digits, period: vec![], source: x.clone() })
        }
        ExtendedPoint::Surd(_) => {
            let mut seen: HashMap<ExtendedPoint, usize> = HashMap::new();
            let mut digits = Vec::new();
            let mut cur = x.clone();
            loop {
                if let Some(&start) = seen.get(&cur) {
                    let period = digits.split_off(start);
                    return Ok(CFExpansion { preperiod: digits, period, source: x.clone() });
                }
                if digits.len() > MAX_PERIOD_SEARCH {
                    return Err(Error::Cf("period search exhausted".into()));
                }
                seen.insert(cur.clone(), digits.len());
                let (k, next) = floor_step(&cur)?;
                digits.push(k);
                cur = next;
            }
        }
        ExtendedPoint::Infinity => Err(Error::Cf("∞ is outside [0,1]".into())),
    }
}

/// `x ↦ (⌊1/x⌋, 1/x − ⌊1/x⌋)`.
fn floor_step(x: &ExtendedPoint) -> Result<(u64, ExtendedPoint)> {
    let y = moebius_act(&Mat2Z::from_i64(0, 1, 1, 0), x)?;
    if y.is_infinity() {
        return Err(Error::Cf("shift undefined at the terminal point 0".into()));
    }
    let k = y.floor().expect("finite");
    let next = moebius_act(&Mat2Z::new(BigInt::one(), -&k, BigInt::zero(), BigInt::one()), &y)?;
    Ok((k.to_u64().ok_or_else(|| Error::Cf("digit overflow".into()))?, next))
}

/// Reconstructs the exact value of a finite or eventually periodic expansion.
pub fn cf_value(cf: &CFExpansion) -> Result<ExtendedPoint> {
    if !cf.is_periodic() {
        if cf.preperiod.is_empty() {
            return Ok(ExtendedPoint::from_int(0));
        }
        return moebius_act(&word_matrix(&cf.preperiod), &ExtendedPoint::from_int(0));
    }
    let q = word_matrix(&cf.period);
    let tail = crate::arith::hyperbolic_fixed_points(&q)?;
    // the purely periodic tail lies in (0,1): choose the fixed point there
    let zero = ExtendedPoint::from_int(0);
    let t = if tail.0.cmp_finite(&zero).is_some_and(|o| o.is_gt()) { tail.0 } else { tail.1 };
    moebius_act(&cf.preperiod_matrix(), &t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    pub g: Mat2Z,
}

/// `g_k` with columns `(p_{k−1}, q_{k−1})`, `(p_k, q_k)`; `g_0` is the identity.
pub fn convergent_matrix(cf: &CFExpansion, k: usize) -> Result<Mat2Z> {
    Ok(convergents(cf, k)?.pop().map(|c| c.g).unwrap_or_else(Mat2Z::identity))
}

/// The first `k` convergents (indices 1..=k).
pub fn convergents(cf: &CFExpansion, k: usize) -> Result<Vec<Convergent>> {
    if let Some(n) = cf.len() {
        if k > n {
            return Err(Error::Cf(format!("requested {k} convergents of a {n}-digit expansion")));
        }
    }
    let mut g = Mat2Z::identity();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let digit = cf.digit(i).expect("checked length");
        g = g.mul(&Mat2Z::g(digit));
        out.push(Convergent { p: g.b.clone(), q: g.d.clone(), g: g.clone() });
    }
    Ok(out)
}

/// One step of `T(x, s) = (1/x − ⌊1/x⌋, M·s)` with `M = (−⌊1/x⌋, 1; 1, 0)`.
pub fn shift(x: &ExtendedPoint, s: &P1Elt) -> Result<(ExtendedPoint, P1Elt, Mat2Z)> {
    unit_interval_check(x)?;
    if x.cmp_finite(&ExtendedPoint::from_int(0)) == Some(std::cmp::Ordering::Equal) {
        return Err(Error::Cf("shift undefined at the terminal point 0".into()));
    }
    let (k, next) = floor_step(x)?;
    let m = Mat2Z::new(-BigInt::from(k), BigInt::one(), BigInt::one(), BigInt::zero());
    let s2 = act_left(&m, s)?;
    Ok((next, s2, m))
}

/// Digit under the "smaller digit wins" convention used for cylinder sets:
/// `X_1 = [1/2, 1]`, `X_k = [1/(k+1), 1/k)` for `k ≥ 2`.
pub fn boundary_digit(x: &Rat) -> Option<u64> {
    if !x.is_positive() || *x > Rat::one() {
        return None;
    }
    let y = x.recip();
    if y.is_integer() {
        let k = y.to_integer().to_u64()?;
        return Some(if k == 1 { 1 } else { k - 1 });
    }
    y.floor().to_integer().to_u64()
}

/// `g_k⁻¹·x` with `k` the boundary digit.
pub fn boundary_step(x: &Rat) -> Option<(u64, Rat)> {
    let k = boundary_digit(x)?;
    Some((k, x.recip() - Rat::from_integer(BigInt::from(k))))
}

pub fn boundary_digit_f64(x: f64) -> Option<u64> {
    if !(x > 0.0 && x <= 1.0) {
        return None;
    }
    let y = 1.0 / x;
    let k = y.floor();
    if k == y {
        return Some(if k as u64 == 1 { 1 } else { k as u64 - 1 });
    }
    Some(k as u64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// `(1/log 2)·log((1+hi)/(1+lo))`.
pub fn gauss_measure(iv: &Interval) -> f64 {
    let ratio = iv.width() / (Rat::one() + &iv.lo);
    ratio.to_f64().unwrap_or(f64::NAN).ln_1p() / std::f64::consts::LN_2
}

/// `μ(g_k·A)` where `g_k·x = 1/(k + x)`.
fn image_measure(k: f64, lo: f64, hi: f64) -> f64 {
    // log((1 + 1/(k+lo)) / (1 + 1/(k+hi)))
    let a = (1.0 / (k + lo)).ln_1p();
    let b = (1.0 / (k + hi)).ln_1p();
    (a - b) / std::f64::consts::LN_2
}

/// `∫_X^∞ μ(g_t·A) dt` in closed form, via `Φ(y) = y·log(1+1/y) + log(1+y)`.
fn tail_integral(x: f64, lo: f64, hi: f64) -> f64 {
    let (yl, yh) = (x + lo, x + hi);
    let phi_diff = yh * (1.0 / yh).ln_1p() - yl * (1.0 / yl).ln_1p() + ((hi - lo) / (1.0 + yl)).ln_1p();
    phi_diff / std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub measure: f64,
    pub preimage_measure: f64,
    pub terms: u64,
    pub tail_estimate: f64,
    pub tail_error_bound: f64,
    pub residual: f64,
}

/// Compares `μ(A)` with `Σ_{k≤K} μ(g_k·A)` plus the midpoint-rule tail
/// `∫_{K+1/2}^∞`, choosing `K` so the analytic remainder bound
/// `|A| / (12·log 2·(K−1)³)` is below `tol/10`.
pub fn gauss_invariance(iv: &Interval, tol: f64) -> InvarianceReport {
    let lo = iv.lo.to_f64().unwrap_or(0.0);
    let hi = iv.hi.to_f64().unwrap_or(0.0);
    let w = iv.width().to_f64().unwrap_or(0.0);
    let k = 2 + (10.0 * w / (12.0 * std::f64::consts::LN_2 * tol)).cbrt().ceil() as u64;
    let bound = w / (12.0 * std::f64::consts::LN_2 * ((k - 1) as f64).powi(3));
    // sum small terms first
    let mut s = 0.0;
    for j in (1..=k).rev() {
        s += image_measure(j as f64, lo, hi);
    }
    let tail = tail_integral(k as f64 + 0.5, lo, hi);
    let mu = gauss_measure(iv);
    InvarianceReport {
        measure: mu,
        preimage_measure: s + tail,
        terms: k,
        tail_estimate: tail,
        tail_error_bound: bound,
        residual: (mu - s - tail).abs(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lyapunov {
    pub value: f64,
    /// Exact form, e.g. `2/1*log((2+sqrt(8))/2)`; `None` for sampled estimates.
    pub symbolic: Option<String>,
    pub digits_used: usize,
}

/// Dominant eigenvalue modulus `Λ = (|tr| + √(tr² − 4det))/2` and its symbolic form.
pub fn dominant_eigenvalue(q: &Mat2Z) -> (f64, String) {
    let tr = q.trace().abs();
    let disc: BigInt = &tr * &tr - BigInt::from(4) * q.det();
    let t = tr.to_f64().unwrap_or(f64::NAN);
    let dsc = disc.to_f64().unwrap_or(f64::NAN);
    (0.5 * (t + dsc.sqrt()), format!("({tr}+sqrt({disc}))/2"))
}

/// Exact Lyapunov exponent `(2/ℓ)·log Λ` for surds.
pub fn lyapunov_exact(x: &ExtendedPoint) -> Result<Lyapunov> {
    let cf = cf_expand(x)?;
    let q = cf
        .period_matrix()
        .ok_or_else(|| Error::Cf(format!("{x} has a terminating expansion")))?;
    let (lam, sym) = dominant_eigenvalue(&q);
    let l = cf.period.len();
    Ok(Lyapunov {
        value: 2.0 * lam.ln() / l as f64,
        symbolic: Some(format!("2/{l}*log({sym})")),
        digits_used: l,
    })
}

/// `log q_n` for a digit prefix, with floating rescaling.
pub fn log_denominator(digits: &[u64]) -> f64 {
    let (mut q0, mut q1, mut acc) = (0.0f64, 1.0f64, 0.0f64);
    for &k in digits {
        let q2 = k as f64 * q1 + q0;
        q0 = q1;
        q1 = q2;
        if q1 > 1e200 {
            q0 /= q1;
            acc += q1.ln();
            q1 = 1.0;
        }
    }
    acc + q1.ln()
}

/// Sampled estimate `2·log(q_n)/n`.
pub fn lyapunov_sampled(digits: &[u64]) -> Result<Lyapunov> {
    if digits.is_empty() {
        return Err(Error::Cf("no digits supplied".into()));
    }
    Ok(Lyapunov {
        value: 2.0 * log_denominator(digits) / digits.len() as f64,
        symbolic: None,
        digits_used: digits.len(),
    })
}

pub fn cylinder(digits: &[u64]) -> Result<Interval> {
    if digits.is_empty() {
        return Err(Error::Cf("cylinder needs a nonempty word".into()));
    }
    if digits.contains(&0) {
        return Err(Error::Cf("digits must be ≥ 1".into()));
    }
    let g = word_matrix(digits);
    let e0 = Rat::new(g.b.clone(), g.d.clone());
    let e1 = Rat::new(&g.a + &g.b, &g.c + &g.d);
    let e0_in = *digits.last().expect("nonempty") == 1;
    Ok(if e0 < e1 {
        Interval { lo: e0, hi: e1, lo_closed: e0_in, hi_closed: true }
    } else {
        Interval { lo: e1, hi: e0, lo_closed: true, hi_closed: e0_in }
    })
}
