//! Limiting modular symbols: exact values at quadratic irrationalities, sampled
//! averages along continued-fraction orbits, Birkhoff averages and boundary values.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{squarefree_split, ExtendedPoint, Mat2Z, Rat};
use crate::cf::{cf_expand, lyapunov_exact, CFExpansion};
use crate::coset::{act_right, P1Elt};
use crate::cusp::{self, CuspContext};
use crate::error::{Error, Result};
use crate::linalg;
use crate::modsym::{SymbolSpace, SymbolVector};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Normalizer {
    /// `2*log(Λ)` with `Λ` written as a surd.
    pub symbolic: String,
    pub numeric: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitingSymbol {
    /// Sum of the twisted convergent segments over one full period of the orbit of
    /// `(x, s)` (cuspidal coordinates).
    pub vector: SymbolVector,
    /// `λ(x)·L` with `L` the orbit period in digits.
    pub normalizer: Normalizer,
    #[serde(serialize_with = "ser_display")]
    pub x: ExtendedPoint,
    pub s: P1Elt,
    pub preperiod: Vec<u64>,
    pub period: Vec<u64>,
    /// Number of digit periods needed before the coset returns.
    pub repeats: usize,
    /// Segment sum over a single digit period, and its normalizer `2·log Λ(Q)`.
    pub one_period_vector: SymbolVector,
    pub one_period_normalizer: Normalizer,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl LimitingSymbol {
    pub fn orbit_length(&self) -> usize {
        self.repeats * self.period.len()
    }

    /// `vector / normalizer` as floats.
    pub fn value(&self) -> Vec<f64> {
        self.vector.to_f64().iter().map(|v| v / self.normalizer.numeric).collect()
    }
}

/// Elements `r + s√d` of ℚ(√d), `d` squarefree, for exact unit identities.
#[derive(Clone, Debug, PartialEq, Eq)]
struct QuadElt {
    r: Rat,
    s: Rat,
    d: BigInt,
}

impl QuadElt {
    fn mul(&self, o: &QuadElt) -> QuadElt {
        let d = Rat::from_integer(self.d.clone());
        QuadElt {
            r: &self.r * &o.r + &self.s * &o.s * d,
            s: &self.r * &o.s + &self.s * &o.r,
            d: self.d.clone(),
        }
    }
}

/// Dominant eigenvalue `(|tr| + √(tr² − 4det))/2` of a hyperbolic matrix in ℚ(√d).
fn dominant_quad(q: &Mat2Z) -> Result<QuadElt> {
    let disc = discriminant(q)?;
    let (_, d) = squarefree_split(&disc);
    if d.is_one() {
        return Err(Error::Lms("period matrix has rational eigenvalues".into()));
    }
    dominant_quad_in(q, &d)
}

fn discriminant(q: &Mat2Z) -> Result<BigInt> {
    let tr = q.trace();
    let disc: BigInt = &tr * &tr - BigInt::from(4) * q.det();
    if !disc.is_positive() {
        return Err(Error::Lms("period matrix is not hyperbolic".into()));
    }
    Ok(disc)
}

/// As [`dominant_quad`] with the radicand `d` given: `disc/d` must be a square.
/// Avoids factoring the large discriminants of matrix powers.
fn dominant_quad_in(q: &Mat2Z, d: &BigInt) -> Result<QuadElt> {
    let disc = discriminant(q)?;
    let (m, r) = disc.div_rem(d);
    let k = m.sqrt();
    if !r.is_zero() || &k * &k != m {
        return Err(Error::Lms(format!("discriminant {disc} is not in ℚ(√{d})")));
    }
    let two = BigInt::from(2);
    Ok(QuadElt { r: Rat::new(q.trace().abs(), two.clone()), s: Rat::new(k, two), d: d.clone() })
}

fn normalizer_of(q: &Mat2Z) -> Normalizer {
    let (lam, sym) = crate::cf::dominant_eigenvalue(q);
    Normalizer { symbolic: format!("2*log({sym})"), numeric: 2.0 * lam.ln() }
}

fn mat_pow(q: &Mat2Z, t: usize) -> Mat2Z {
    (0..t).fold(Mat2Z::identity(), |acc, _| acc.mul(q))
}

fn mod_i64(x: &BigInt, n: u64) -> i64 {
    x.mod_floor(&BigInt::from(n)).to_i64().expect("residue")
}

fn surd_in_unit_interval(x: &ExtendedPoint) -> Result<()> {
    match x {
        ExtendedPoint::Surd(_) => {
            let ok = x.cmp_finite(&ExtendedPoint::from_int(0)).is_some_and(|o| o.is_gt())
                && x.cmp_finite(&ExtendedPoint::from_int(1)).is_some_and(|o| o.is_lt());
            if ok {
                Ok(())
            } else {
                Err(Error::Lms(format!("{x} is outside (0,1)")))
            }
        }
        _ => Err(Error::Lms(format!("{x} is not a quadratic irrationality"))),
    }
}

/// Running convergent matrix `G_k = (p_{k−1}, p_k; q_{k−1}, q_k)` reduced mod N.
#[derive(Clone, Copy, Debug)]
pub struct ConvergentsModN {
    n: i64,
    m: [i64; 4],
    k: usize,
}

impl ConvergentsModN {
    pub fn new(n: u64) -> Self {
        ConvergentsModN { n: n as i64, m: [1, 0, 0, 1], k: 0 }
    }

    pub fn from_matrix(n: u64, g: &Mat2Z, k: usize) -> Self {
        let r = |x: &BigInt| mod_i64(x, n);
        ConvergentsModN { n: n as i64, m: [r(&g.a), r(&g.b), r(&g.c), r(&g.d)], k }
    }

    /// Right-multiplies by `g_digit`.
    #[inline]
    pub fn push(&mut self, digit: u64) {
        let [a, b, c, d] = self.m;
        let k = (digit % self.n as u64) as i64;
        self.m = [b, (a + k * b) % self.n, d, (c + k * d) % self.n];
        self.k += 1;
    }

    pub fn matrix(&self) -> [i64; 4] {
        self.m
    }

    /// `det G_k = (−1)^k`.
    pub fn det_negative(&self) -> bool {
        self.k % 2 == 1
    }
}

/// Table index of segment `k`'s Manin symbol: the segment equals minus this generator.
#[inline]
pub fn segment_index(space: &SymbolSpace, s: &P1Elt, g: &ConvergentsModN) -> usize {
    space.unimod_index(s, g.matrix(), g.det_negative())
}

/// Smallest `t ≥ 1` with `det(Q)^t = 1` and `s·G_r·Q^t = s·G_r` in ℙ¹(ℤ/N).
fn orbit_repeats(s: &P1Elt, gr: &Mat2Z, q: &Mat2Z) -> Result<usize> {
    let base = act_right(s, gr)?;
    let det_neg = q.det().is_negative();
    let mut cur = base;
    for t in 1..=4 * (s.n as usize + 1) * (s.n as usize + 1) {
        cur = act_right(&cur, q)?;
        if cur == base && (!det_neg || t % 2 == 0) {
            return Ok(t);
        }
    }
    Err(Error::Lms("coset orbit did not close".into()))
}

/// Both descriptions of the limiting symbol at a quadratic irrationality, computed
/// independently.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LmsForms {
    /// Sum of twisted convergent segments over one orbit period.
    pub period_sum: SymbolVector,
    /// `{G_r·0, G_r·Q^t·0}`.
    pub closed_geodesic: SymbolVector,
    pub one_period_sum: SymbolVector,
    pub one_period_geodesic: SymbolVector,
    /// `Λ(Q)^t = Λ(Q^t)` in `ℚ(√d)`.
    pub eigenvalue_power_exact: bool,
    /// `λ(x)·L`.
    pub lyapunov_length: f64,
    /// `2·log Λ(Q^t)`.
    pub normalizer: Normalizer,
    pub preperiod: Vec<u64>,
    pub period: Vec<u64>,
    pub repeats: usize,
    pub one_period_normalizer: Normalizer,
}

pub fn lms_forms(space: &SymbolSpace, x: &ExtendedPoint, s: &P1Elt) -> Result<LmsForms> {
    surd_in_unit_interval(x)?;
    if s.n != space.level {
        return Err(Error::Lms("coset level differs from the symbol space".into()));
    }
    let cf = cf_expand(x)?;
    let q = cf.period_matrix().ok_or_else(|| Error::Lms(format!("{x} is not periodic")))?;
    let gr = cf.preperiod_matrix();
    let t = orbit_repeats(s, &gr, &q)?;
    let r = cf.preperiod.len();
    let ell = cf.period.len();
    let big_l = t * ell;

    let mut g = ConvergentsModN::from_matrix(space.level, &gr, r);
    let dim = space.dim_cuspidal();
    let mut sum = linalg::zero_vec(dim);
    let mut one_period = linalg::zero_vec(dim);
    for j in 0..big_l {
        g.push(cf.period[j % ell]);
        let i = segment_index(space, s, &g);
        linalg::add_int(&mut sum, -1, space.generator_coords(i));
        if j == ell - 1 {
            one_period = sum.clone();
        }
    }

    let qt = mat_pow(&q, t);
    let zero = ExtendedPoint::from_int(0);
    let start = crate::arith::moebius_act(&gr, &zero)?;
    let end = crate::arith::moebius_act(&gr.mul(&qt), &zero)?;
    let end1 = crate::arith::moebius_act(&gr.mul(&q), &zero)?;

    let lam = dominant_quad(&q)?;
    let lam_t = (1..t).fold(lam.clone(), |acc, _| acc.mul(&lam));
    Ok(LmsForms {
        period_sum: SymbolVector { coords: sum },
        closed_geodesic: space.project(&space.path_full(s, &start, &end)?),
        one_period_sum: SymbolVector { coords: one_period },
        one_period_geodesic: space.project(&space.path_full(s, &start, &end1)?),
        eigenvalue_power_exact: dominant_quad_in(&qt, &lam.d).is_ok_and(|l| l == lam_t),
        lyapunov_length: lyapunov_exact(x)?.value * big_l as f64,
        normalizer: normalizer_of(&qt),
        preperiod: cf.preperiod.clone(),
        period: cf.period.clone(),
        repeats: t,
        one_period_normalizer: normalizer_of(&q),
    })
}

/// Exact limiting symbol at a quadratic irrationality. Errors if the two forms of
/// [`lms_forms`] disagree, or if `λ(x)·L ≠ 2·log Λ(Q^t)`.
pub fn lms_quadratic(space: &SymbolSpace, x: &ExtendedPoint, s: &P1Elt) -> Result<LimitingSymbol> {
    let f = lms_forms(space, x, s)?;
    if f.closed_geodesic != f.period_sum || f.one_period_geodesic != f.one_period_sum {
        return Err(Error::Lms("period-sum and closed-geodesic forms disagree".into()));
    }
    if !f.eigenvalue_power_exact {
        return Err(Error::Lms("Λ(Q)^t ≠ Λ(Q^t)".into()));
    }
    if (f.lyapunov_length - f.normalizer.numeric).abs() > 1e-9 * f.normalizer.numeric.max(1.0) {
        return Err(Error::Lms("λ(x)·L differs from 2·log Λ".into()));
    }
    Ok(LimitingSymbol {
        vector: f.period_sum,
        normalizer: f.normalizer,
        x: x.clone(),
        s: *s,
        preperiod: f.preperiod,
        period: f.period,
        repeats: f.repeats,
        one_period_vector: f.one_period_sum,
        one_period_normalizer: f.one_period_normalizer,
    })
}

/// Backward evaluation of `[0; d_0, d_1, …]` over at most `window` digits.
fn tail_value(digits: &[u64], window: usize) -> f64 {
    let w = &digits[..digits.len().min(window)];
    let mut v = 0.0f64;
    for &d in w.iter().rev() {
        v = 1.0 / (d as f64 + v);
    }
    v
}

const WINDOW: usize = 40;

/// Orbit values `x_j = T^j x`, `j < n`, from the digit stream.
pub fn orbit_values(digits: &[u64], n: usize) -> Result<Vec<f64>> {
    if digits.len() < n {
        return Err(Error::Lms(format!("digit stream exhausted after {} digits", digits.len())));
    }
    Ok((0..n).map(|j| tail_value(&digits[j..], WINDOW)).collect())
}

/// The first `n` digits of `x` (terminating expansions error out when too short).
pub fn digits_of(x: &ExtendedPoint, n: usize) -> Result<Vec<u64>> {
    let cf = cf_expand(x)?;
    digits_from(&cf, n)
}

fn digits_from(cf: &CFExpansion, n: usize) -> Result<Vec<u64>> {
    let d = cf.prefix(n);
    if d.len() < n {
        return Err(Error::Lms(format!("digit stream exhausted after {} digits", d.len())));
    }
    Ok(d)
}

/// Digits of a uniformly random rational `p/q` with a `bits`-bit denominator; the
/// expansion has about `0.58·bits` digits.
pub fn random_digits(seed: u64, bits: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = bits.div_ceil(32);
    let mut draw = |top: bool| {
        let mut w: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
        if top {
            *w.last_mut().expect("nonempty") |= 1 << 31;
        }
        BigUint::from_slice(&w)
    };
    let q = draw(true);
    let p = draw(false) % &q;
    let (mut p, mut q) = (p, q);
    let mut out = Vec::new();
    while !p.is_zero() {
        let (k, r) = q.div_rem(&p);
        out.push(k.to_u64().unwrap_or(u64::MAX));
        q = p;
        p = r;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SampledAverages {
    pub s: P1Elt,
    /// `(k, average_k)` at the requested checkpoints.
    pub checkpoints: Vec<(usize, Vec<f64>)>,
    /// `λ̂_k` at each checkpoint.
    pub lyapunov: Vec<f64>,
}

/// Partial averages `(1/(λ̂_k·k))·Σ_{j≤k} segment_j` with
/// `λ̂_k·k = −2·Σ_{j<k} log T^j x`, reported at `checkpoints` (all `k ≤ n` if empty).
pub fn lms_sampled(
    space: &SymbolSpace,
    digits: &[u64],
    s: &P1Elt,
    n: usize,
    checkpoints: &[usize],
) -> Result<SampledAverages> {
    if n == 0 {
        return Ok(SampledAverages { s: *s, checkpoints: vec![], lyapunov: vec![] });
    }
    let xs = orbit_values(digits, n)?;
    let dim = space.dim_cuspidal();
    let mut g = ConvergentsModN::new(space.level);
    let mut sum = vec![0.0f64; dim];
    let mut log_sum = 0.0f64;
    let mut out = Vec::new();
    let mut lyap = Vec::new();
    for k in 1..=n {
        g.push(digits[k - 1]);
        log_sum += -2.0 * xs[k - 1].ln();
        let i = segment_index(space, s, &g);
        for (acc, c) in sum.iter_mut().zip(space.generator_coords_f64(i)) {
            *acc -= c;
        }
        if checkpoints.is_empty() || checkpoints.contains(&k) {
            out.push((k, sum.iter().map(|v| v / log_sum).collect()));
            lyap.push(log_sum / k as f64);
        }
    }
    Ok(SampledAverages { s: *s, checkpoints: out, lyapunov: lyap })
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(1/n)·Σ_{k<n} φ(T^k(x, s))`, with the coset slot moved by the left action of
/// `(−k,1;1,0)`.
pub fn birkhoff_average<F: Fn(f64, &P1Elt) -> f64>(phi: F, digits: &[u64], s: &P1Elt, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Lms("n must be positive".into()));
    }
    let xs = orbit_values(digits, n)?;
    let mut cur = *s;
    let mut acc = 0.0;
    for (k, x) in xs.iter().enumerate() {
        acc += phi(*x, &cur);
        let m = Mat2Z::from_i64(-(digits[k] as i64), 1, 1, 0);
        cur = crate::coset::act_left(&m, &cur)?;
    }
    Ok(acc / n as f64)
}

/// `I_ψ` of a bulk element with constant profile `c`: `c·⟨ψ, h(x,s)⟩`, where
/// `h(x,s)` is the normalized limiting symbol. `psi = None` is the zero form.
pub fn boundary_value(c: Complex64, psi: Option<&CuspContext>, x: &ExtendedPoint, s: &P1Elt) -> Result<Complex64> {
    let Some(ctx) = psi else {
        return Ok(Complex64::zero());
    };
    let l = lms_quadratic(&ctx.space, x, s)?;
    Ok(c * cusp::pair(&ctx.periods, &l.vector)? / l.normalizer.numeric)
}
