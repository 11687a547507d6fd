use std::collections::BTreeMap;

use gl2_boundary::qsm::counting::*;
use gl2_boundary::qsm::repr::{weight, Basis, WordSpace};
use gl2_boundary::zeta::*;

/// Direct partial sum plus the first Euler–Maclaurin corrections.
fn zeta_oracle(s: f64) -> f64 {
    let n = 200_000usize;
    let head: f64 = (1..n).map(|k| (k as f64).powf(-s)).sum();
    let nf = n as f64;
    head + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0)
}

#[test]
fn zeta_values() {
    let pi = std::f64::consts::PI;
    assert!((zeta(2.0) - pi * pi / 6.0).abs() < 1e-14);
    assert!((zeta(4.0) - pi.powi(4) / 90.0).abs() < 1e-14);
    for s in [1.3, 1.728647, 2.5, 3.0, 7.0] {
        assert!((zeta(s) - zeta_oracle(s)).abs() < 1e-10, "s = {s}");
    }
}

#[test]
fn critical_inverse_temperature() {
    let b = beta_critical();
    assert!((b - 1.728647).abs() < 5e-6, "{b}");
    assert!((zeta(b) - 2.0).abs() < 1e-8);
    assert!(b > 1.0 && b < 2.0);
    assert!((beta_critical_tol(1e-6) - b).abs() < 1e-6);
}

#[test]
fn lattice_counts_are_divisor_sums() {
    let table = sigma1_table(200);
    for n in 1..=200u64 {
        let oracle: u64 = (1..=n).filter(|d| n % d == 0).sum();
        assert_eq!(sigma1_bruteforce(n), oracle, "n = {n}");
        assert_eq!(table[n as usize], oracle);
    }
    assert_eq!((sigma1_bruteforce(1), sigma1_bruteforce(2), sigma1_bruteforce(4)), (1, 3, 7));
}

#[test]
fn ordered_factorization_examples() {
    assert_eq!(ordered_factorizations(1).unwrap(), 1);
    assert_eq!(ordered_factorizations(2).unwrap(), 1);
    // 12, 2·6, 6·2, 3·4, 4·3, 2·2·3, 2·3·2, 3·2·2
    assert_eq!(ordered_factorizations(12).unwrap(), 8);
    assert!(ordered_factorizations(0).is_err());
    assert_eq!(ordered_factorizations_exhaustive(5000), ordered_factorizations_table(5000));
}

#[test]
fn factorization_series_at_three() {
    let (series, closed) = factorization_series(3.0, 100_000);
    assert!((series - closed).abs() < 1e-2, "{series} vs {closed}");
    assert!((closed - 1.0 / (2.0 - zeta(3.0))).abs() < 1e-15);
}

#[test]
fn spectrum_examples() {
    let sp = spectrum(6, 6);
    assert_eq!((sp[0].n, sp[0].multiplicity, sp[0].energy), (1, 1, 0.0));
    assert_eq!(sp[1].n, 2);
    assert_eq!(sp[1].multiplicity, 4);
    assert!((sp[1].energy - 2f64.ln()).abs() < 1e-15);
    let s = sigma1_table(6);
    let p = ordered_factorizations_table(6);
    let total: u64 = (1..=6).flat_map(|n| (1..=6).map(move |m| (n, m))).map(|(n, m)| s[n] * p[m]).sum();
    assert_eq!(sp.iter().map(|l| l.multiplicity).sum::<u64>(), total);
}

#[test]
fn spectrum_matches_the_enumerated_basis() {
    let (d, k) = (8u64, 12u64);
    let basis = Basis::new(d, WordSpace::spectral(k).unwrap()).unwrap();
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for lat in &basis.lattices {
        for w in basis.words.words() {
            *counts.entry(lat.det() * weight(w)).or_insert(0) += 1;
        }
    }
    let sp: BTreeMap<u64, u64> = spectrum(d, k).into_iter().map(|l| (l.n, l.multiplicity)).collect();
    assert_eq!(sp, counts);
}

#[test]
fn tensor_identity_is_exact() {
    for (d, k) in [(1, 1), (3, 5), (7, 9), (12, 4)] {
        let (trace, product) = tensor_identity_exact(3, d, k);
        assert_eq!(trace, product, "D = {d}, K = {k}");
    }
}

#[test]
fn partition_function_at_three() {
    let r = partition_function(3.0, 10_000, 10_000).unwrap();
    let closed = zeta(3.0) * zeta(2.0) / (2.0 - zeta(3.0));
    assert!((r.closed_form - closed).abs() < 1e-12);
    assert!((r.closed_form - 2.4780).abs() < 1e-4, "{}", r.closed_form);
    assert!(r.relative_gap < 1e-3, "{}", r.relative_gap);
    assert!(r.truncated < r.closed_form);
    assert!(!r.divergent);
}

#[test]
fn partition_function_decreases_in_beta() {
    let rows = sweep(2.1, 6.0, 40, 2000, 2000).unwrap();
    assert_eq!(rows.len(), 40);
    assert!((rows[0].beta - 2.1).abs() < 1e-15 && (rows[39].beta - 6.0).abs() < 1e-15);
    for w in rows.windows(2) {
        assert!(w[1].truncated < w[0].truncated);
        assert!(w[1].closed_form < w[0].closed_form);
    }
    let lo = partition_function(2.2, 500, 500).unwrap();
    let hi = partition_function(5.0, 500, 500).unwrap();
    assert!(hi.truncated < lo.truncated);
}

#[test]
fn low_beta_is_flagged() {
    assert!(partition_function(1.9, 100, 100).unwrap().divergent);
    assert!(partition_function(2.0, 100, 100).is_err());
    assert!(partition_function(1.0, 100, 100).is_err());
    assert!(sweep(3.0, 4.0, 0, 10, 10).is_err());
}
