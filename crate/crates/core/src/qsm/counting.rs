//! Spectrum of the boundary Hamiltonian and the partition function.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::lattice::lattices_of_det;
use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::par;
use crate::zeta::{partition_closed_form, zeta};

/// Number of Hermite forms of determinant `n`, by enumeration.
pub fn sigma1_bruteforce(n: u64) -> u64 {
    lattices_of_det(n).len() as u64
}

/// `σ₁(k)` for `k ≤ n` (index 0 unused).
pub fn sigma1_table(n: usize) -> Vec<u64> {
    let mut s = vec![0u64; n + 1];
    for d in 1..=n {
        for m in (d..=n).step_by(d) {
            s[m] += d as u64;
        }
    }
    s
}

/// `P_k` for `k ≤ n`: ordered factorizations into factors `≥ 2` (`P_1 = 1`), via
/// `P_k = Σ_{d | k, d < k} P_d`.
pub fn ordered_factorizations_table(n: usize) -> Vec<u64> {
    let mut p = vec![0u64; n + 1];
    if n >= 1 {
        p[1] = 1;
    }
    for d in 1..=n {
        let pd = p[d];
        for m in (2 * d..=n).step_by(d) {
            p[m] += pd;
        }
    }
    p
}

pub fn ordered_factorizations(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Qsm("n must be positive".into()));
    }
    Ok(ordered_factorizations_table(n as usize)[n as usize])
}

/// `P_k` for `k ≤ n` by listing every ordered factorization.
pub fn ordered_factorizations_exhaustive(n: usize) -> Vec<u64> {
    fn walk(prod: usize, n: usize, counts: &mut [u64]) {
        counts[prod] += 1;
        for k in 2..=n / prod {
            walk(prod * k, n, counts);
        }
    }
    let mut counts = vec![0u64; n + 1];
    if n >= 1 {
        walk(1, n, &mut counts);
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumLevel {
    /// `det(g)·weight(w)`.
    pub n: u64,
    pub energy: f64,
    pub multiplicity: u64,
}

/// Energies `log(det·weight)` with multiplicities `Σ σ₁(det)·P_weight` over
/// `det ≤ max_det`, `weight ≤ max_weight`.
pub fn spectrum(max_det: u64, max_weight: u64) -> Vec<SpectrumLevel> {
    let s = sigma1_table(max_det as usize);
    let p = ordered_factorizations_table(max_weight as usize);
    let mut levels: BTreeMap<u64, u64> = BTreeMap::new();
    for n in 1..=max_det {
        for m in 1..=max_weight {
            if p[m as usize] > 0 {
                *levels.entry(n * m).or_insert(0) += s[n as usize] * p[m as usize];
            }
        }
    }
    levels
        .into_iter()
        .map(|(n, multiplicity)| SpectrumLevel { n, energy: (n as f64).ln(), multiplicity })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub beta: f64,
    pub max_det: u64,
    pub max_weight: u64,
    pub truncated: f64,
    pub closed_form: f64,
    /// `closed_form − truncated` (positive-term tail when convergent).
    pub tail: f64,
    pub relative_gap: f64,
    /// True when `β ≤ 2`: the series diverges and the closed form is a continuation.
    pub divergent: bool,
}

/// `Σ_{n≤D} σ₁(n)n^{−β}` and `Σ_{m≤K} P_m m^{−β}`.
pub fn truncated_factors(beta: f64, max_det: u64, max_weight: u64) -> (f64, f64) {
    let s = sigma1_table(max_det as usize);
    let p = ordered_factorizations_table(max_weight as usize);
    let chunk = |v: &[u64]| -> f64 {
        // deterministic: parallel per-block sums, added in order
        let blocks: Vec<(usize, usize)> = (1..v.len()).step_by(4096).map(|a| (a, (a + 4096).min(v.len()))).collect();
        par::map(&blocks, |&(a, b)| (a..b).map(|k| v[k] as f64 * (k as f64).powf(-beta)).sum::<f64>())
            .into_iter()
            .sum()
    };
    (chunk(&s), chunk(&p))
}

pub fn partition_function(beta: f64, max_det: u64, max_weight: u64) -> Result<PartitionReport> {
    if max_det == 0 || max_weight == 0 {
        return Err(Error::Qsm("truncation bounds must be positive".into()));
    }
    if !(beta > 1.0) || (beta - 2.0).abs() < 1e-12 {
        return Err(Error::Qsm(format!("β = {beta}: closed form undefined")));
    }
    let (a, b) = truncated_factors(beta, max_det, max_weight);
    let truncated = a * b;
    let closed_form = partition_closed_form(beta);
    Ok(PartitionReport {
        beta,
        max_det,
        max_weight,
        truncated,
        closed_form,
        tail: closed_form - truncated,
        relative_gap: ((closed_form - truncated) / closed_form).abs(),
        divergent: beta <= 2.0,
    })
}

/// Exact `(Σ over the spectrum, factorized product)` at integer `β`.
pub fn tensor_identity_exact(beta: u32, max_det: u64, max_weight: u64) -> (Rat, Rat) {
    let pw = |n: u64| Rat::new(BigInt::one(), BigInt::from(n).pow(beta));
    let trace: Rat = spectrum(max_det, max_weight)
        .iter()
        .map(|l| pw(l.n) * Rat::from_integer(l.multiplicity.into()))
        .fold(Rat::zero(), |a, b| a + b);
    let s = sigma1_table(max_det as usize);
    let p = ordered_factorizations_table(max_weight as usize);
    let a: Rat = (1..=max_det).map(|n| pw(n) * Rat::from_integer(s[n as usize].into())).fold(Rat::zero(), |x, y| x + y);
    let b: Rat = (1..=max_weight).map(|m| pw(m) * Rat::from_integer(p[m as usize].into())).fold(Rat::zero(), |x, y| x + y);
    (trace, a * b)
}

/// `Σ_{m≤K} P_m m^{−β}` against `1/(2 − ζ(β))`.
pub fn factorization_series(beta: f64, max_weight: u64) -> (f64, f64) {
    let (_, b) = truncated_factors(beta, 1, max_weight);
    (b, 1.0 / (2.0 - zeta(beta)))
}

pub fn sweep(beta_from: f64, beta_to: f64, steps: usize, max_det: u64, max_weight: u64) -> Result<Vec<PartitionReport>> {
    if steps == 0 {
        return Err(Error::Qsm("steps must be positive".into()));
    }
    let betas: Vec<f64> = (0..steps)
        .map(|i| if steps == 1 { beta_from } else { beta_from + (beta_to - beta_from) * i as f64 / (steps - 1) as f64 })
        .collect();
    betas.iter().map(|&b| partition_function(b, max_det, max_weight)).collect()
}
