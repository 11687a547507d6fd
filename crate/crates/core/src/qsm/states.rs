//! Gibbs states, ground states and the KMS condition on truncations.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use super::lattice::QMat2;
use super::observable::{Observable, Point};
use super::repr::{represent, weight, Basis, SparseMat, WordSpace};
use super::scalar::Coef;
use crate::arith::{moebius_act, ExtendedPoint};
use crate::cf::word_matrix;
use crate::coset::P1Elt;
use crate::error::{Error, Result};
use crate::par;
use crate::zeta::partition_closed_form;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateValue {
    pub value: Complex64,
    pub truncation_error: f64,
    /// `None` for the ground state (β = ∞).
    pub beta: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Truncation {
    pub max_det: u64,
    pub max_weight: u64,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 2.0) {
        return Err(Error::Qsm(format!("Gibbs states need β > 2, got {beta}")));
    }
    Ok(())
}

fn check_rho(rho: &QMat2) -> Result<QMat2> {
    if !rho.is_integral() {
        return Err(Error::Qsm(format!("ρ = {rho} must be integral")));
    }
    rho.inverse().ok_or_else(|| Error::Qsm("ρ must be nonsingular".into()))
}

/// `Z⁻¹·Σ det(H)^{−β}·weight(w)^{−β}·f(1, H, g_w·(x, H·ρ⁻¹·s))` over the
/// spectral truncation, normalized by the truncated trace. The error bound is
/// `2·sup|f|·(Z − Z_trunc)/Z` with the closed-form `Z`.
pub fn gibbs_state(f: &Observable, beta: f64, rho: &QMat2, x: &ExtendedPoint, s: &P1Elt, t: Truncation) -> Result<StateValue> {
    check_beta(beta)?;
    let rho_inv = check_rho(rho)?;
    let words = WordSpace::spectral(t.max_weight)?;
    let basis = Basis::new(t.max_det, words)?;
    let wpoints: Vec<(ExtendedPoint, QMat2, f64)> = basis
        .words
        .words()
        .iter()
        .map(|w| {
            Ok((moebius_act(&word_matrix(w), x)?, QMat2::from_mat(&word_matrix(w)), (weight(w) as f64).powf(-beta)))
        })
        .collect::<Result<_>>()?;
    let shells = par::try_map(&basis.lattices, |lat| -> Result<(Complex64, f64)> {
        let hmat = lat.matrix();
        let h = hmat.mul(&rho_inv);
        let wdet = (lat.det() as f64).powf(-beta);
        let mut num = Complex64::zero();
        let mut den = 0.0;
        for (xw, gw, ww) in &wpoints {
            let p = Point { g: QMat2::identity(), m: hmat.clone(), x: xw.clone(), u: gw.mul(&h), s: *s };
            let v: Complex64 = f.eval(&p)?;
            num += v * wdet * ww;
            den += wdet * ww;
        }
        Ok((num, den))
    })?;
    let (num, z_trunc) = shells.into_iter().fold((Complex64::zero(), 0.0), |(a, b), (c, d)| (a + c, b + d));
    let z = partition_closed_form(beta);
    let err = 2.0 * f.sup_bound() * ((z - z_trunc).max(0.0) / z);
    Ok(StateValue { value: num / z_trunc, truncation_error: err, beta: Some(beta) })
}

/// `Tr(π(f)·e^{−βH}) / Tr(e^{−βH})` on the represented spectral truncation.
pub fn gibbs_via_trace(f: &Observable, beta: f64, rho: &QMat2, x: &ExtendedPoint, s: &P1Elt, t: Truncation) -> Result<Complex64> {
    check_beta(beta)?;
    let basis = Basis::new(t.max_det, WordSpace::spectral(t.max_weight)?)?;
    let pi: SparseMat<Complex64> = represent(f, rho, x, s, &basis)?;
    Ok(weighted_trace(&pi, &basis, beta))
}

pub fn weighted_trace(a: &SparseMat<Complex64>, basis: &Basis, beta: f64) -> Complex64 {
    let e = basis.energies();
    let mut num = Complex64::zero();
    let mut den = 0.0;
    for (i, ei) in e.iter().enumerate() {
        let w = (-beta * ei).exp();
        num += a.get(i, i) * w;
        den += w;
    }
    num / den
}

/// `f(1, ρ, x, s)`, with `ρ` entering as in [`represent`]: base lattice, slot `ρ⁻¹·s`.
pub fn ground_state(f: &Observable, rho: &QMat2, x: &ExtendedPoint, s: &P1Elt) -> Result<StateValue> {
    let value: Complex64 = f.eval(&ground_point(rho, x, s)?)?;
    Ok(StateValue { value, truncation_error: 0.0, beta: None })
}

/// Exact ground-state value when every factor of `f` is rational.
pub fn ground_state_exact(f: &Observable, rho: &QMat2, x: &ExtendedPoint, s: &P1Elt) -> Result<Coef> {
    f.eval(&ground_point(rho, x, s)?)
}

fn ground_point(rho: &QMat2, x: &ExtendedPoint, s: &P1Elt) -> Result<Point> {
    let rho_inv = check_rho(rho)?;
    Ok(Point { g: QMat2::identity(), m: QMat2::identity(), x: x.clone(), u: rho_inv, s: *s })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmsReport {
    /// `φ_β(a ⋆ b)`.
    pub lhs: Complex64,
    /// `φ_β(b ⋆ σ_{iβ}(a))`.
    pub rhs: Complex64,
    pub difference: f64,
    pub truncation_error: f64,
    /// Same identity for the represented operators, `Tr(π(a)π(b)e^{−βH})` against
    /// `Tr(π(b)π(σ_{iβ}a)e^{−βH})` (exact up to rounding on any truncation).
    pub matrix_difference: f64,
}

pub fn kms_check(a: &Observable, b: &Observable, beta: f64, rho: &QMat2, x: &ExtendedPoint, s: &P1Elt, t: Truncation) -> Result<KmsReport> {
    let ab = a.convolve(b)?;
    let ba = b.convolve(&a.evolve_imag(beta))?;
    let l = gibbs_state(&ab, beta, rho, x, s, t)?;
    let r = gibbs_state(&ba, beta, rho, x, s, t)?;
    let basis = Basis::new(t.max_det, WordSpace::spectral(t.max_weight)?)?;
    let pa: SparseMat<Complex64> = represent(a, rho, x, s, &basis)?;
    let pb: SparseMat<Complex64> = represent(b, rho, x, s, &basis)?;
    let psa: SparseMat<Complex64> = represent(&a.evolve_imag(beta), rho, x, s, &basis)?;
    let m1 = weighted_trace(&pa.mul(&pb)?, &basis, beta);
    let m2 = weighted_trace(&pb.mul(&psa)?, &basis, beta);
    Ok(KmsReport {
        lhs: l.value,
        rhs: r.value,
        difference: (l.value - r.value).norm(),
        truncation_error: l.truncation_error + r.truncation_error,
        matrix_difference: (m1 - m2).norm(),
    })
}
