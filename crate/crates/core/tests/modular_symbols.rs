use gl2_boundary::arith::{ExtendedPoint, Rat};
use gl2_boundary::linalg;
use gl2_boundary::modsym::*;
use num_traits::One;

fn pt(s: &str) -> ExtendedPoint {
    s.parse().unwrap()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn totient(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

/// Genus of X₀(N) from the index, elliptic points and cusps.
fn genus_oracle(n: u64) -> i64 {
    let primes: Vec<u64> = (2..=n).filter(|&p| n % p == 0 && (2..p).all(|q| p % q != 0)).collect();
    let mu = primes.iter().fold(n as f64, |acc, &p| acc * (1.0 + 1.0 / p as f64)).round() as i64;
    let legendre = |a: i64, p: u64| -> i64 {
        // Kronecker symbol (a/p) for odd p, computed by Euler's criterion
        let r = (0..p).filter(|x| (x * x) % p == (a.rem_euclid(p as i64)) as u64).count();
        if (a.rem_euclid(p as i64)) == 0 { 0 } else if r > 0 { 1 } else { -1 }
    };
    let nu2 = if n % 4 == 0 { 0 } else { primes.iter().map(|&p| if p == 2 { 1 } else { 1 + legendre(-1, p) }).product::<i64>() };
    let nu3 = if n % 9 == 0 { 0 } else { primes.iter().map(|&p| if p == 3 { 1 } else if p == 2 { 1 + (-1) } else { 1 + legendre(-3, p) }).product::<i64>() };
    let cusps: i64 = (1..=n).filter(|d| n % d == 0).map(|d| totient(gcd(d, n / d)) as i64).sum();
    // 12g = 12 + μ − 3ν₂ − 4ν₃ − 6ν∞
    let g12 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
    assert_eq!(g12 % 12, 0, "N = {n}");
    g12 / 12
}

/// Coefficients of q∏(1−qⁿ)²(1−q¹¹ⁿ)² up to `len`.
fn eta_product_11(len: usize) -> Vec<i64> {
    let mut c = vec![0i64; len + 1];
    c[1] = 1;
    let mul = |c: &mut Vec<i64>, k: usize| {
        // multiply by (1 − q^k)
        for i in (k..c.len()).rev() {
            c[i] -= c[i - k];
        }
    };
    for n in 1..=len {
        mul(&mut c, n);
        mul(&mut c, n);
        if 11 * n <= len {
            mul(&mut c, 11 * n);
            mul(&mut c, 11 * n);
        }
    }
    c
}

#[test]
fn dimension_examples() {
    assert_eq!(symbol_space(11).unwrap().generators.len(), 12);
    assert_eq!(symbol_space(11).unwrap().dim_cuspidal(), 2);
    assert_eq!(symbol_space(2).unwrap().dim_cuspidal(), 0);
    assert_eq!(symbol_space(37).unwrap().dim_cuspidal(), 4);
    assert!(symbol_space(0).is_err());
}

#[test]
fn cuspidal_dimension_is_twice_the_genus() {
    for n in 1..=60 {
        let s = symbol_space(n).unwrap();
        assert_eq!(s.dim_cuspidal() as i64, 2 * genus_oracle(n), "N = {n}");
    }
}

#[test]
fn path_examples() {
    let space = symbol_space(11).unwrap();
    assert!(path_to_symbol(&space, &pt("2/5"), &pt("2/5")).unwrap().is_zero());
    let a = path_to_symbol(&space, &pt("0"), &pt("1/2")).unwrap();
    let b = path_to_symbol(&space, &pt("1/2"), &pt("3/7")).unwrap();
    let c = path_to_symbol(&space, &pt("0"), &pt("3/7")).unwrap();
    assert_eq!(a.add(&b), c);
    assert!(!path_to_symbol(&space, &pt("0"), &ExtendedPoint::Infinity).unwrap().is_zero());
    // orientation reversal
    assert_eq!(path_to_symbol(&space, &pt("3/7"), &pt("0")).unwrap(), c.scale(&-Rat::one()));
    assert!(path_to_symbol(&space, &pt("sqrt(2)-1"), &pt("0")).is_err());
}

#[test]
fn path_additivity_on_many_triples() {
    let space = symbol_space(37).unwrap();
    let pts: Vec<ExtendedPoint> = ["0", "inf", "1/2", "-3/5", "7/11", "22/7", "-1", "13/37"].iter().map(|s| pt(s)).collect();
    for a in &pts {
        for b in &pts {
            for c in &pts {
                let ab = path_to_symbol(&space, a, b).unwrap();
                let bc = path_to_symbol(&space, b, c).unwrap();
                assert_eq!(ab.add(&bc), path_to_symbol(&space, a, c).unwrap());
            }
        }
    }
}

#[test]
fn hecke_examples() {
    let space = symbol_space(11).unwrap();
    assert_eq!(hecke_matrix(&space, 1).unwrap(), linalg::identity(2));
    assert_eq!(hecke_matrix(&space, 2).unwrap(), linalg::scalar(2, &Rat::from_integer((-2).into())));
    assert_eq!(hecke_matrix(&space, 3).unwrap(), linalg::scalar(2, &Rat::from_integer((-1).into())));
    assert!(hecke_matrix(&space, 11).is_err());
    assert!(hecke_matrix(&space, 22).is_err());
}

#[test]
fn heilbronn_and_double_coset_actions_agree() {
    for n in [11u64, 14, 23, 37] {
        let space = symbol_space(n).unwrap();
        for m in (2..=9).filter(|&m| gcd(m, n) == 1) {
            assert_eq!(hecke_matrix(&space, m).unwrap(), hecke_matrix_paths(&space, m).unwrap(), "N = {n}, m = {m}");
        }
    }
}

#[test]
fn hecke_operators_commute() {
    for n in [11u64, 14, 15, 17, 19, 37] {
        let space = symbol_space(n).unwrap();
        let ms: Vec<u64> = (1..=10).filter(|&m| gcd(m, n) == 1).collect();
        let ts: Vec<_> = ms.iter().map(|&m| hecke_matrix(&space, m).unwrap()).collect();
        for i in 0..ts.len() {
            for j in 0..i {
                assert_eq!(linalg::mat_mul(&ts[i], &ts[j]), linalg::mat_mul(&ts[j], &ts[i]), "N = {n}: T_{} T_{}", ms[i], ms[j]);
            }
        }
    }
}

#[test]
fn hecke_acts_on_the_winding_element_through_hermite_paths() {
    // Σ_{(a,b;0,d)} {b/d, ∞} = T_m {0, ∞} in the cuspidal quotient
    let space = symbol_space(11).unwrap();
    let w = path_to_symbol(&space, &pt("0"), &ExtendedPoint::Infinity).unwrap();
    for m in [2u64, 3, 4, 5, 6] {
        let mut sum = SymbolVector::zero(space.dim_cuspidal());
        for a in (1..=m).filter(|a| m % a == 0) {
            let d = m / a;
            for b in 0..d {
                sum = sum.add(&path_to_symbol(&space, &ExtendedPoint::frac(b as i64, d as i64), &ExtendedPoint::Infinity).unwrap());
            }
        }
        let tw = SymbolVector { coords: linalg::mat_vec(&hecke_matrix(&space, m).unwrap(), &w.coords) };
        assert_eq!(sum, tw, "m = {m}");
    }
}

#[test]
fn level_11_eigensystem_matches_the_eta_product() {
    let space = symbol_space(11).unwrap();
    let systems = eigen_decompose(&space, 47).unwrap();
    assert_eq!(systems.len(), 1);
    let sys = &systems[0];
    assert!(sys.is_newform());
    let eta = eta_product_11(47);
    for p in (2..=47u64).filter(|&p| is_prime(p) && p != 11) {
        assert_eq!(sys.a(p), Some(eta[p as usize]), "a_{p}");
    }
    assert_eq!((sys.a(2), sys.a(3), sys.a(5)), (Some(-2), Some(-1), Some(1)));
    assert_eq!(eigenvalue_at(&space, sys, 11).unwrap(), eta[11]);
    assert!(eigen_decompose(&symbol_space(2).unwrap(), 10).unwrap().is_empty());
}

#[test]
fn rational_eigensystems_at_other_levels() {
    for n in [14u64, 15, 17, 19, 37] {
        let space = symbol_space(n).unwrap();
        let sys = eigen_decompose(&space, 13).unwrap();
        assert_eq!(sys.iter().map(|s| s.dimension).sum::<usize>(), space.dim_cuspidal(), "N = {n}");
        for s in &sys {
            for (&p, &a) in &s.eigenvalues {
                if n % p != 0 {
                    assert!((a * a) as f64 <= 4.0 * p as f64, "Deligne bound at N = {n}, p = {p}");
                }
            }
        }
    }
    // level 23 has eigenvalues in ℚ(√5)
    assert!(eigen_decompose(&symbol_space(23).unwrap(), 7).unwrap_err().to_string().contains("unsupported"));
}

#[test]
fn star_is_an_involution() {
    for n in 1..=30 {
        let space = symbol_space(n).unwrap();
        let s = space.star_matrix();
        assert_eq!(linalg::mat_mul(&s, &s), linalg::identity(space.dim_cuspidal()), "N = {n}");
    }
}
