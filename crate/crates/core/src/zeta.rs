//! Riemann ζ on the real axis (Euler–Maclaurin) and the critical inverse temperature.

const EM_TERMS: usize = 20;

// B_2, B_4, …, B_20
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// ζ(s) for real `s ≠ 1`, `s > 0`; relative accuracy around 1e-15.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 0.0 && s != 1.0, "zeta evaluated at {s}");
    let n = EM_TERMS as f64;
    let head: f64 = (1..EM_TERMS).map(|k| (k as f64).powf(-s)).sum();
    let mut acc = head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j−2) · N^{−s−2j+1}
    let mut rising = s; // s(s+1)…(s+2j−2)
    let mut fact = 2.0; // (2j)!
    for (j, b) in BERNOULLI.iter().enumerate() {
        let j = j + 1;
        acc += b / fact * rising * n.powf(-s - 2.0 * j as f64 + 1.0);
        let k = 2.0 * j as f64;
        rising *= (s + k - 1.0) * (s + k);
        fact *= (k + 1.0) * (k + 2.0);
    }
    acc
}

/// Root of ζ(β) = 2 on (1, 2), by bisection to `tol`.
pub fn beta_critical_tol(tol: f64) -> f64 {
    let (mut lo, mut hi) = (1.5f64, 1.9f64);
    debug_assert!(zeta(lo) > 2.0 && zeta(hi) < 2.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if zeta(mid) > 2.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn beta_critical() -> f64 {
    beta_critical_tol(1e-12)
}

/// `ζ(β)·ζ(β−1)/(2 − ζ(β))`; for `β ≤ 2` this is the analytic continuation.
pub fn partition_closed_form(beta: f64) -> f64 {
    let z = zeta(beta);
    z * zeta(beta - 1.0) / (2.0 - z)
}
