use std::f64::consts::PI;

use gl2_boundary::arith::ExtendedPoint;
use gl2_boundary::cusp::*;
use gl2_boundary::modsym::{eigen_decompose, path_to_symbol, SymbolVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx() -> CuspContext {
    CuspContext::new(11).unwrap()
}

/// q∏(1−qⁿ)²(1−q¹¹ⁿ)²
fn eta_product_11(len: usize) -> Vec<i64> {
    let mut c = vec![0i64; len + 1];
    c[1] = 1;
    let mul = |c: &mut Vec<i64>, k: usize| {
        for i in (k..c.len()).rev() {
            c[i] -= c[i - k];
        }
    };
    for n in 1..=len {
        for _ in 0..2 {
            mul(&mut c, n);
            if 11 * n <= len {
                mul(&mut c, 11 * n);
            }
        }
    }
    c
}

#[test]
fn coefficients_match_the_eta_product() {
    let c = ctx();
    let f = &c.newform;
    let eta = eta_product_11(200.min(f.bound));
    for n in 1..eta.len() {
        assert_eq!(f.a(n), eta[n], "a_{n}");
    }
    assert_eq!((f.a(1), f.a(4), f.a(6)), (1, 2, 2));
    assert_eq!(f.sign, 1);
    assert_eq!(f.fricke, -1);
}

#[test]
fn hecke_relations_among_coefficients() {
    let f = ctx().newform;
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    for m in 1..=30 {
        for n in 1..=30 {
            if gcd(m, n) == 1 && m * n <= f.bound {
                assert_eq!(f.a(m * n), f.a(m) * f.a(n));
            }
        }
    }
    for p in [2usize, 3, 5, 7] {
        let mut pk = p;
        while pk * p * p <= f.bound {
            assert_eq!(f.a(pk * p), f.a(p) * f.a(pk) - p as i64 * f.a(pk / p));
            pk *= p;
        }
    }
    for p in (2..f.bound.min(500)).filter(|&p| (2..p).all(|q| p % q != 0) && p != 11) {
        assert!(((f.a(p) * f.a(p)) as f64) <= 4.0 * p as f64, "Deligne at {p}");
    }
}

#[test]
fn qexp_rejects_non_newform_systems() {
    let c = ctx();
    let mut sys = eigen_decompose(&c.space, 13).unwrap().remove(0);
    sys.plus.clear();
    assert!(qexp(&c.space, &sys, 40).is_err());
}

#[test]
fn antiderivative_examples() {
    let f = ctx().newform;
    assert!(antiderivative(&f, Complex64::new(0.0, 12.0)).unwrap().norm() < 1e-30);
    let z = Complex64::new(0.1, 0.5);
    let h = 1e-6;
    let fd = (antiderivative(&f, z + h).unwrap() - antiderivative(&f, z - h).unwrap()) / (2.0 * h);
    assert!((fd - f.eval(z)).norm() < 1e-8, "{}", (fd - f.eval(z)).norm());
    for z in [Complex64::new(0.3, 0.2), Complex64::new(-1.7, 0.9)] {
        assert!((antiderivative(&f, z + 1.0).unwrap() - antiderivative(&f, z).unwrap()).norm() < 1e-14);
    }
    assert!(antiderivative(&f, Complex64::new(0.0, 0.01)).is_err());
}

#[test]
fn closed_cycle_integrals_do_not_depend_on_the_basepoint() {
    let c = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (g, v) in c.periods.gammas.iter().zip(&c.periods.values) {
        let z0 = best_basepoint(g);
        assert!((cycle_integral(&c.newform, g, z0).unwrap() - v).norm() < 1e-12);
        for _ in 0..2 {
            // nearby basepoints: both ends stay close to the optimal height
            let y = z0.im;
            let z = z0 + Complex64::new(rng.gen_range(-0.25..0.25) * y, rng.gen_range(-0.05..0.05) * y);
            let w = cycle_integral(&c.newform, g, z).unwrap();
            assert!((w - v).norm() < 1e-10, "γ = {g:?}");
        }
    }
}

#[test]
fn pairing_examples() {
    let c = ctx();
    assert_eq!(c.pair(&SymbolVector::zero(2)).unwrap(), Complex64::new(0.0, 0.0));
    assert!(c.pair(&SymbolVector::zero(3)).is_err());
    let w = path_to_symbol(&c.space, &ExtendedPoint::frac(0, 1), &ExtendedPoint::Infinity).unwrap();
    let l = l_value(&c.space, &c.newform, &c.periods).unwrap();
    let p = c.pair(&w).unwrap();
    assert!((p - Complex64::i() * l.value / (2.0 * PI)).norm() < 1e-8);
    // the star involution conjugates the pairing
    for v in [w.clone(), path_to_symbol(&c.space, &ExtendedPoint::frac(1, 3), &ExtendedPoint::frac(2, 5)).unwrap()] {
        let a = c.pair(&v).unwrap();
        let b = c.pair(&c.space.star(&v)).unwrap();
        assert!((a + b.conj()).norm() < 1e-9 || (a - b.conj()).norm() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn special_value_at_level_11() {
    let c = ctx();
    let l = l_value(&c.space, &c.newform, &c.periods).unwrap();
    assert!((l.value - 0.2538419).abs() < 5e-8, "{}", l.value);
    assert!(l.discrepancy < 1e-8);
    // independent oracle: the same fast series on eta-product coefficients
    let eta = eta_product_11(400);
    let x = (-2.0 * PI / 11f64.sqrt()).exp();
    let oracle: f64 = 2.0 * (1..=400).map(|n| eta[n] as f64 / n as f64 * x.powi(n as i32)).sum::<f64>();
    assert!((l.value - oracle).abs() < 1e-12);
    assert!((lambda_completed(l.value) - l.value / (2.0 * PI)).abs() < 1e-16);
}

#[test]
fn manin_relation() {
    let c = ctx();
    assert_eq!(manin_relation_check(&c.space, &c.newform, &c.periods, 1).unwrap(), 0.0);
    for m in [2, 3, 4, 5, 7] {
        let r = manin_relation_check(&c.space, &c.newform, &c.periods, m).unwrap();
        assert!(r < 1e-6, "m = {m}: {r}");
    }
    assert!(manin_relation_check(&c.space, &c.newform, &c.periods, 11).is_err());
    assert_eq!(sigma1(12), 28);
}
