//! Rational weight-2 newforms: q-expansions, antiderivatives, period pairings and
//! special values.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::ExtendedPoint;
use crate::coset::gcd_u;
use crate::error::{Error, Result};
use crate::linalg::{self, QMat};
use crate::modsym::{self, eigenvalue_at, is_prime, EigenSystem, SymbolSpace, SymbolVector};

/// Smallest height at which antiderivatives are evaluated.
pub const IM_FLOOR: f64 = 0.05;
const TAIL_TARGET: f64 = 1e-13;

#[derive(Clone, Debug, Serialize)]
pub struct Newform {
    pub level: u64,
    /// `a_n` for `0 ≤ n ≤ bound` (`a_0 = 0`).
    pub coefficients: Vec<i64>,
    /// Sign `ε` of the functional equation `Λ(2−s) = ε·Λ(s)`.
    pub sign: i8,
    /// Atkin–Lehner eigenvalue `w_N = −ε`.
    pub fricke: i8,
    pub bound: usize,
    #[serde(skip)]
    pub system: EigenSystem,
}

impl Newform {
    pub fn a(&self, n: usize) -> i64 {
        self.coefficients[n]
    }

    /// `f(z) = Σ a_n qⁿ`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let q = (Complex64::i() * 2.0 * PI * z).exp();
        let mut qn = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::zero();
        for n in 1..=self.bound {
            qn *= q;
            acc += qn * self.coefficients[n] as f64;
        }
        acc
    }

    /// `Σ a_n e^{−2πnt/√N} = f(it/√N)`.
    fn series_at(&self, t: f64) -> f64 {
        let x = (-2.0 * PI * t / (self.level as f64).sqrt()).exp();
        let mut xn = 1.0;
        let mut acc = 0.0;
        for n in 1..=self.bound {
            xn *= x;
            acc += self.coefficients[n] as f64 * xn;
        }
        acc
    }
}

/// Fills `a_n`, `n ≤ bound`, from the prime eigenvalues by multiplicativity and the
/// prime-power recursion; then fixes the functional-equation sign numerically.
pub fn qexp(space: &SymbolSpace, sys: &EigenSystem, bound: usize) -> Result<Newform> {
    if !sys.is_newform() {
        return Err(Error::Cusp(format!("eigensystem of dimension {} is not a newform", sys.dimension)));
    }
    let n_level = space.level;
    let mut a = vec![0i64; bound + 1];
    if bound >= 1 {
        a[1] = 1;
    }
    let mut ap = vec![0i64; bound + 1];
    for p in (2..=bound).filter(|&p| is_prime(p as u64)) {
        ap[p] = eigenvalue_at(space, sys, p as u64)?;
        if gcd_u(p as u64, n_level) == 1 && (ap[p] as f64).abs() > 2.0 * (p as f64).sqrt() {
            return Err(Error::Cusp(format!("a_{p} = {} violates the Ramanujan bound", ap[p])));
        }
    }
    // smallest prime factor sieve
    let mut spf = vec![0usize; bound + 1];
    for i in 2..=bound {
        if spf[i] == 0 {
            let mut j = i;
            while j <= bound {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    for n in 2..=bound {
        let p = spf[n];
        let mut m = n;
        let mut r = 0;
        while m % p == 0 {
            m /= p;
            r += 1;
        }
        let pr = n / m;
        if m > 1 {
            a[n] = a[pr] * a[m];
            continue;
        }
        a[n] = if r == 1 {
            ap[p]
        } else if n_level % p as u64 == 0 {
            ap[p] * a[n / p]
        } else {
            ap[p] * a[n / p] - p as i64 * a[n / p / p]
        };
    }
    let mut f = Newform {
        level: n_level,
        coefficients: a,
        sign: 1,
        fricke: -1,
        bound,
        system: sys.clone(),
    };
    let (eps, _) = functional_equation_sign(&f)?;
    f.sign = eps;
    f.fricke = -eps;
    Ok(f)
}

/// Determines `ε` from `F(1/t) = ε·t²·F(t)` with `F(t) = Σ a_n e^{−2πnt/√N}`,
/// tested at two points. Returns the sign and the worst residual.
pub fn functional_equation_sign(f: &Newform) -> Result<(i8, f64)> {
    let need = 13.0 * (f.level as f64).sqrt();
    if (f.bound as f64) < need {
        return Err(Error::Cusp(format!("coefficient bound {} below {need:.0}", f.bound)));
    }
    let mut sign: Option<i8> = None;
    let mut worst = 0.0f64;
    for t in [1.15f64, 1.4] {
        let lhs = f.series_at(1.0 / t);
        let rhs = t * t * f.series_at(t);
        let scale = lhs.abs().max(rhs.abs()).max(1e-300);
        let (e, res) = if (lhs - rhs).abs() <= (lhs + rhs).abs() { (1, (lhs - rhs).abs()) } else { (-1, (lhs + rhs).abs()) };
        if res > 1e-8 * scale.max(1.0) {
            return Err(Error::Cusp(format!("functional equation fails at t={t}: residual {res:e}")));
        }
        if sign.is_some_and(|s| s != e) {
            return Err(Error::Cusp("inconsistent functional-equation signs".into()));
        }
        sign = Some(e);
        worst = worst.max(res);
    }
    Ok((sign.expect("tested"), worst))
}

fn tail_bound(bound: usize, y: f64) -> f64 {
    // |a_n| ≤ d(n)√n ≤ 2n
    let r = (-2.0 * PI * y).exp();
    2.0 * (-2.0 * PI * (bound as f64 + 1.0) * y).exp() / (2.0 * PI * (1.0 - r))
}

/// `F(z) = Σ a_n/(2πin)·e^{2πinz}`, the antiderivative with `F(i∞) = 0`.
pub fn antiderivative(f: &Newform, z: Complex64) -> Result<Complex64> {
    if z.im < IM_FLOOR {
        return Err(Error::Cusp(format!("Im z = {} below floor {IM_FLOOR}", z.im)));
    }
    let tail = tail_bound(f.bound, z.im);
    if tail > TAIL_TARGET {
        return Err(Error::Cusp(format!("tail bound {tail:e} at Im z = {} needs more coefficients", z.im)));
    }
    let q = (Complex64::i() * 2.0 * PI * z).exp();
    let mut qn = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::zero();
    for n in 1..=f.bound {
        qn *= q;
        let a = f.coefficients[n];
        if a != 0 {
            acc += qn * (a as f64 / n as f64);
        }
    }
    Ok(acc / (Complex64::i() * 2.0 * PI))
}

/// Coefficient bound making the antiderivative tail negligible at height `y`.
pub fn bound_for_height(y: f64) -> usize {
    let mut b = 1usize;
    while tail_bound(b, y) > TAIL_TARGET * 1e-2 {
        b += 1;
    }
    b
}

fn moebius_c(g: &[i64; 4], z: Complex64) -> Complex64 {
    let [a, b, c, d] = *g;
    (z * a as f64 + b as f64) / (z * c as f64 + d as f64)
}

/// `∫_{z₀}^{γz₀} f(z) dz` for `γ ∈ Γ₀(N)`.
pub fn cycle_integral(f: &Newform, gamma: &[i64; 4], z0: Complex64) -> Result<Complex64> {
    Ok(antiderivative(f, moebius_c(gamma, z0))? - antiderivative(f, z0)?)
}

/// Basepoint maximizing `min(Im z₀, Im γz₀)`.
pub fn best_basepoint(gamma: &[i64; 4]) -> Complex64 {
    let [_, _, c, d] = *gamma;
    Complex64::new(-(d as f64) / c as f64, 1.0 / (c as f64).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodMatrix {
    pub level: u64,
    pub cycles: Vec<SymbolVector>,
    pub gammas: Vec<[i64; 4]>,
    pub values: Vec<Complex64>,
    pub precision: f64,
    /// Maps cuspidal coordinates to coordinates in the cycle basis.
    #[serde(skip)]
    to_cycles: QMat,
}

/// Closed cycles `{0, γ·0}` with `γ = (a,b;c,d) ∈ Γ₀(N)`, smallest `|c|` first,
/// until they span the cuspidal part.
pub fn cycle_basis(space: &SymbolSpace) -> Result<(Vec<SymbolVector>, Vec<[i64; 4]>)> {
    let n = space.level as i64;
    let dim = space.dim_cuspidal();
    let mut cycles: Vec<SymbolVector> = Vec::new();
    let mut gammas = Vec::new();
    let mut rows: QMat = Vec::new();
    'outer: for k in 1..=64i64 {
        let c = n * k;
        for d in 1..c {
            if rows.len() == dim {
                break 'outer;
            }
            if c.gcd(&d) != 1 {
                continue;
            }
            let a = inv_mod(d, c);
            let b = (a * d - 1) / c;
            let v = modsym::path_to_symbol(space, &ExtendedPoint::frac(0, 1), &ExtendedPoint::frac(b, d))?;
            let mut trial = rows.clone();
            trial.push(v.coords.clone());
            if linalg::rank(&trial) > rows.len() {
                rows = trial;
                cycles.push(v);
                gammas.push([a, b, c, d]);
            }
        }
    }
    if rows.len() < dim {
        return Err(Error::Cusp("could not find a cycle basis".into()));
    }
    Ok((cycles, gammas))
}

fn inv_mod(a: i64, m: i64) -> i64 {
    let (mut r0, mut r1, mut s0, mut s1) = (m, a.rem_euclid(m), 0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(m)
}

pub fn period_matrix(space: &SymbolSpace, f: &Newform) -> Result<PeriodMatrix> {
    if space.level != f.level {
        return Err(Error::Cusp("level mismatch".into()));
    }
    let (cycles, gammas) = cycle_basis(space)?;
    let mut values = Vec::new();
    let mut precision = 0.0f64;
    for g in &gammas {
        let z0 = best_basepoint(g);
        values.push(cycle_integral(f, g, z0)?);
        precision = precision.max(2.0 * tail_bound(f.bound, z0.im));
    }
    let cols: QMat = linalg::transpose(&cycles.iter().map(|c| c.coords.clone()).collect::<Vec<_>>());
    let to_cycles = linalg::inverse(&cols).ok_or_else(|| Error::Cusp("cycle basis is singular".into()))?;
    Ok(PeriodMatrix { level: space.level, cycles, gammas, values, precision, to_cycles })
}

/// `⟨f, v⟩ = ∫_v f(z) dz`, linear in the exact coordinates of `v`.
pub fn pair(pm: &PeriodMatrix, v: &SymbolVector) -> Result<Complex64> {
    if v.coords.len() != pm.values.len() {
        return Err(Error::Cusp(format!(
            "dimension mismatch: vector {} vs space {}",
            v.coords.len(),
            pm.values.len()
        )));
    }
    let w = linalg::to_f64_vec(&linalg::mat_vec(&pm.to_cycles, &v.coords));
    Ok(w.iter().zip(&pm.values).map(|(k, p)| p * *k).sum())
}

/// Pairing with floating cuspidal coordinates (sampled averages).
pub fn pair_f64(pm: &PeriodMatrix, v: &[f64]) -> Complex64 {
    let inv: Vec<Vec<f64>> = pm.to_cycles.iter().map(|r| linalg::to_f64_vec(r)).collect();
    let w: Vec<f64> = inv.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
    w.iter().zip(&pm.values).map(|(k, p)| p * *k).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct LValue {
    pub value: f64,
    pub method_a: f64,
    pub method_b: f64,
    pub discrepancy: f64,
    pub precision: f64,
}

/// `L(f,1)` two ways: the rapidly convergent series `(1+ε)·Σ a_n/n·e^{−2πn/√N}`
/// and `(2π/i)·⟨f, {0,∞}⟩`.
pub fn l_value(space: &SymbolSpace, f: &Newform, pm: &PeriodMatrix) -> Result<LValue> {
    let x = (-2.0 * PI / (f.level as f64).sqrt()).exp();
    let mut xn = 1.0;
    let mut series = 0.0;
    for n in 1..=f.bound {
        xn *= x;
        series += f.coefficients[n] as f64 / n as f64 * xn;
    }
    let method_a = (1.0 + f.sign as f64) * series;
    let w = modsym::path_to_symbol(space, &ExtendedPoint::frac(0, 1), &ExtendedPoint::Infinity)?;
    let method_b = (pair(pm, &w)? * 2.0 * PI / Complex64::i()).re;
    let discrepancy = (method_a - method_b).abs();
    let precision = 2.0 * x.powi(f.bound as i32 + 1) / (1.0 - x) + 2.0 * PI * pm.precision;
    if discrepancy > 1e-8 {
        return Err(Error::Cusp(format!(
            "L(1) methods disagree: {method_a} vs {method_b} (check orientation/sign)"
        )));
    }
    Ok(LValue { value: method_a, method_a, method_b, discrepancy, precision })
}

/// `Λ(s) = (2π)^{−s}Γ(s)L(s)` at `s = 1`.
pub fn lambda_completed(l1: f64) -> f64 {
    l1 / (2.0 * PI)
}

pub fn sigma1(m: u64) -> u64 {
    (1..=m).filter(|d| m % d == 0).sum()
}

/// `|(σ₁(m) − a_m)·L(f,1) − (2π/i)·Σ_{d|m, b mod d} ⟨f, {0, b/d}⟩|`.
pub fn manin_relation_check(space: &SymbolSpace, f: &Newform, pm: &PeriodMatrix, m: u64) -> Result<f64> {
    if gcd_u(m, f.level) != 1 {
        return Err(Error::Cusp(format!("gcd({m}, {}) ≠ 1", f.level)));
    }
    if m as usize > f.bound {
        return Err(Error::Cusp("m exceeds the coefficient bound".into()));
    }
    let l = l_value(space, f, pm)?.value;
    let mut acc = SymbolVector::zero(space.dim_cuspidal());
    for d in (1..=m).filter(|d| m % d == 0) {
        for b in 0..d {
            let v = modsym::path_to_symbol(space, &ExtendedPoint::frac(0, 1), &ExtendedPoint::frac(b as i64, d as i64))?;
            acc = acc.add(&v);
        }
    }
    let rhs = pair(pm, &acc)? * 2.0 * PI / Complex64::i();
    let lhs = (sigma1(m) as f64 - f.a(m as usize) as f64) * l;
    Ok((Complex64::new(lhs, 0.0) - rhs).norm())
}

/// The first rational newform at `level` with enough coefficients for periods.
pub struct CuspContext {
    pub space: SymbolSpace,
    pub newform: Newform,
    pub periods: PeriodMatrix,
}

impl CuspContext {
    pub fn new(level: u64) -> Result<Self> {
        let space = SymbolSpace::new(level)?;
        let systems = modsym::eigen_decompose(&space, 13)?;
        let sys = systems
            .into_iter()
            .find(EigenSystem::is_newform)
            .ok_or_else(|| Error::Cusp(format!("no rational newform at level {level}")))?;
        let (_, gammas) = cycle_basis(&space)?;
        let cmax = gammas.iter().map(|g| g[2].abs()).max().unwrap_or(1) as f64;
        let bound = bound_for_height(1.0 / cmax).max((13.0 * (level as f64).sqrt()).ceil() as usize);
        let newform = qexp(&space, &sys, bound)?;
        let periods = period_matrix(&space, &newform)?;
        Ok(CuspContext { space, newform, periods })
    }

    pub fn pair(&self, v: &SymbolVector) -> Result<Complex64> {
        pair(&self.periods, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_11_coefficients() {
        let ctx = CuspContext::new(11).unwrap();
        let f = &ctx.newform;
        assert_eq!(f.a(1), 1);
        assert_eq!(f.a(2), -2);
        assert_eq!(f.a(4), 2);
        assert_eq!(f.a(6), 2);
        assert_eq!(f.a(11), 1);
        assert_eq!(f.sign, 1);
    }

    #[test]
    fn level_11_l_value() {
        let ctx = CuspContext::new(11).unwrap();
        let l = l_value(&ctx.space, &ctx.newform, &ctx.periods).unwrap();
        assert!((l.value - 0.2538418609).abs() < 1e-8, "{l:?}");
        assert!(l.discrepancy < 1e-8);
        for m in [1, 2, 3] {
            let r = manin_relation_check(&ctx.space, &ctx.newform, &ctx.periods, m).unwrap();
            assert!(r < 1e-6, "m={m}: {r}");
        }
    }
}
