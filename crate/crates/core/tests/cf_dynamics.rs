use gl2_boundary::arith::{moebius_act, rat, ExtendedPoint, Mat2Z, Rat};
use gl2_boundary::cf::*;
use gl2_boundary::coset::p1_normalize;
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(s: &str) -> ExtendedPoint {
    s.parse().unwrap()
}

#[test]
fn expansion_examples() {
    let e = cf_expand(&pt("3/7")).unwrap();
    assert_eq!((e.preperiod, e.period), (vec![2, 3], vec![]));
    let e = cf_expand(&pt("(sqrt(5)-1)/2")).unwrap();
    assert_eq!((e.preperiod, e.period), (vec![], vec![1]));
    assert!(cf_expand(&pt("0")).unwrap().is_empty());
    assert_eq!(cf_expand(&pt("1")).unwrap().preperiod, vec![1]);
    // √7 − 2 = [0; 1, 1, 1, 4, …]
    assert_eq!(cf_expand(&pt("sqrt(7)-2")).unwrap().period, vec![1, 1, 1, 4]);
    assert!(cf_expand(&pt("3/2")).is_err());
    assert!(cf_expand(&pt("sqrt(2)")).is_err());
}

#[test]
fn convergent_examples() {
    let cf = cf_expand(&pt("3/7")).unwrap();
    let c = convergents(&cf, 2).unwrap();
    assert_eq!(c[1].g, Mat2Z::from_i64(1, 3, 2, 7));
    assert_eq!((c[0].p.clone(), c[0].q.clone()), (BigInt::from(1), BigInt::from(2)));
    assert_eq!((c[1].p.clone(), c[1].q.clone()), (BigInt::from(3), BigInt::from(7)));
    assert_eq!(convergent_matrix(&cf, 0).unwrap(), Mat2Z::identity());
    assert!(convergents(&cf, 3).is_err());
    let golden = cf_expand(&pt("(sqrt(5)-1)/2")).unwrap();
    let qs: Vec<BigInt> = convergents(&golden, 8).unwrap().into_iter().map(|c| c.q).collect();
    let fib: Vec<BigInt> = [1, 2, 3, 5, 8, 13, 21, 34].iter().map(|&v| BigInt::from(v)).collect();
    assert_eq!(qs, fib);
    for c in convergents(&golden, 20).unwrap() {
        assert_eq!(c.g.det().abs(), BigInt::from(1));
    }
}

#[test]
fn shift_examples() {
    let s = p1_normalize(11, 0, 1).unwrap();
    let (x, _, m) = shift(&pt("3/7"), &s).unwrap();
    assert_eq!((x, m), (pt("1/3"), Mat2Z::from_i64(-2, 1, 1, 0)));
    let (x, _, m) = shift(&pt("sqrt(2)-1"), &s).unwrap();
    assert_eq!((x, m), (pt("sqrt(2)-1"), Mat2Z::from_i64(-2, 1, 1, 0)));
    assert!(shift(&pt("0"), &s).unwrap_err().to_string().contains("terminal"));
}

#[test]
fn gauss_measure_examples() {
    let all = Interval::closed(rat(0, 1), rat(1, 1));
    assert!((gauss_measure(&all) - 1.0).abs() < 1e-15);
    let x1 = cylinder(&[1]).unwrap();
    assert!((gauss_measure(&x1) - (4.0f64 / 3.0).log2()).abs() < 1e-15);
    assert!((gauss_measure(&x1) - 0.415037).abs() < 1e-6);
    let r = gauss_invariance(&Interval::closed(rat(0, 1), rat(1, 2)), 1e-10);
    assert!(r.residual < 1e-10, "{r:?}");
}

#[test]
fn gauss_invariance_on_random_intervals() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100 {
        let q = rng.gen_range(2..500i64);
        let (a, b) = (rng.gen_range(0..q), rng.gen_range(0..q));
        let iv = Interval::closed(Rat::new(a.min(b).into(), q.into()), Rat::new((a.max(b) + 1).into(), q.into()));
        let r = gauss_invariance(&iv, 1e-9);
        assert!(r.residual < 1e-8, "{iv}: {r:?}");
        assert!(r.tail_error_bound < 1e-9);
    }
}

#[test]
fn lyapunov_examples() {
    let g = lyapunov_exact(&pt("(sqrt(5)-1)/2")).unwrap();
    assert!((g.value - 2.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-14);
    assert!((g.value - 0.962424).abs() < 1e-6);
    let s = lyapunov_exact(&pt("sqrt(2)-1")).unwrap();
    assert!((s.value - 1.762747).abs() < 1e-6);
    assert!(lyapunov_exact(&pt("3/7")).unwrap_err().to_string().contains("terminating"));
}

#[test]
fn lyapunov_sampled_matches_exact() {
    for x in ["(sqrt(5)-1)/2", "sqrt(2)-1", "sqrt(7)-2", "(sqrt(13)-3)/2"] {
        let x = pt(x);
        let cf = cf_expand(&x).unwrap();
        let sampled = lyapunov_sampled(&cf.prefix(10_000)).unwrap();
        let exact = lyapunov_exact(&x).unwrap();
        assert!((sampled.value - exact.value).abs() < 1e-3, "{x}: {} vs {}", sampled.value, exact.value);
        assert_eq!(sampled.digits_used, 10_000);
    }
}

#[test]
fn cylinder_examples() {
    let c = cylinder(&[1]).unwrap();
    assert_eq!((c.lo.clone(), c.hi.clone()), (rat(1, 2), rat(1, 1)));
    let c = cylinder(&[2]).unwrap();
    assert_eq!((c.lo.clone(), c.hi.clone()), (rat(1, 3), rat(1, 2)));
    let c = cylinder(&[2, 3]).unwrap();
    assert_eq!((c.lo.clone(), c.hi.clone()), (rat(3, 7), rat(4, 9)));
    assert!(cylinder(&[]).is_err());
    assert!(cylinder(&[2, 0]).is_err());
}

#[test]
fn cylinders_partition_their_parent() {
    // μ(X_w) = Σ_{k≤K} μ(X_{wk}) + tail, tail ≤ μ(X_w)·2/K
    for w in [vec![1u64], vec![2], vec![3, 1], vec![1, 4, 2]] {
        let parent = gauss_measure(&cylinder(&w).unwrap());
        let mut prev = f64::INFINITY;
        for kmax in [10u64, 100, 1000] {
            let s: f64 = (1..=kmax)
                .map(|k| {
                    let mut wk = w.clone();
                    wk.push(k);
                    gauss_measure(&cylinder(&wk).unwrap())
                })
                .sum();
            let tail = parent - s;
            assert!(tail > 0.0 && tail < prev);
            assert!(tail < parent * 4.0 / kmax as f64, "{w:?}, K = {kmax}: {tail}");
            prev = tail;
        }
    }
}

#[test]
fn cylinder_membership_and_boundaries() {
    // the boundary 1/2 belongs to the smaller digit
    assert!(cylinder(&[1]).unwrap().contains(&rat(1, 2)));
    assert!(!cylinder(&[2]).unwrap().contains(&rat(1, 2)));
    assert_eq!(boundary_digit(&rat(1, 2)), Some(1));
    assert_eq!(boundary_digit(&rat(1, 3)), Some(2));
    assert_eq!(boundary_digit(&rat(2, 5)), Some(2));
}

fn expansion() -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (prop::collection::vec(1u64..12, 0..4), prop::collection::vec(1u64..12, 1..6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_round_trip((pre, per) in expansion()) {
        let cf = CFExpansion { preperiod: pre.clone(), period: per.clone(), source: ExtendedPoint::Infinity };
        let x = cf_value(&cf).unwrap();
        let back = cf_expand(&x).unwrap();
        // the expansion is recovered up to the canonical period/preperiod split
        for i in 0..40 {
            prop_assert_eq!(back.digit(i), cf.digit(i));
        }
        prop_assert_eq!(cf_value(&back).unwrap(), x);
    }

    #[test]
    fn shift_drops_the_first_digit((pre, per) in expansion()) {
        let cf = CFExpansion { preperiod: pre, period: per, source: ExtendedPoint::Infinity };
        let x = cf_value(&cf).unwrap();
        let s = p1_normalize(7, 1, 3).unwrap();
        let (y, _, m) = shift(&x, &s).unwrap();
        let shifted = cf_expand(&y).unwrap();
        for i in 0..30 {
            prop_assert_eq!(shifted.digit(i), cf.digit(i + 1));
        }
        prop_assert_eq!(moebius_act(&m, &x).unwrap(), y);
    }

    #[test]
    fn rational_round_trip(p in 1i64..2000, q in 1i64..2000) {
        prop_assume!(p <= q);
        let x = ExtendedPoint::frac(p, q);
        let cf = cf_expand(&x).unwrap();
        prop_assert!(cf.preperiod.last() != Some(&1) || cf.preperiod == vec![1]);
        prop_assert_eq!(cf_value(&cf).unwrap(), x);
    }
}
