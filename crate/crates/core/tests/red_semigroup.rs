use gl2_boundary::arith::{moebius_act, ExtendedPoint, Mat2Z};
use gl2_boundary::cf::cylinder;
use gl2_boundary::red::*;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn membership_examples() {
    assert!(is_reduced(&Mat2Z::g(2)));
    assert!(!is_reduced(&Mat2Z::identity()));
    assert!(is_reduced(&Mat2Z::from_i64(1, 3, 2, 7)));
    assert!(!is_reduced(&Mat2Z::from_i64(1, 3, 2, 8)));
    assert!(!is_reduced(&Mat2Z::from_i64(1, 0, 0, -1)));
}

#[test]
fn factor_examples() {
    assert_eq!(factor(&Mat2Z::from_i64(1, 3, 2, 7)).unwrap().digits, vec![2, 3]);
    assert_eq!(factor(&Mat2Z::g(5)).unwrap().digits, vec![5]);
    assert!(factor(&Mat2Z::identity()).is_err());
    assert_eq!(weight(&Mat2Z::g(2).mul(&Mat2Z::g(3))).unwrap(), BigInt::from(6));
    assert_eq!(weight(&Mat2Z::g(1)).unwrap(), BigInt::from(1));
    assert!(weight(&Mat2Z::from_i64(2, 0, 0, 1)).is_err());
}

fn random_word(rng: &mut ChaCha8Rng) -> Vec<u64> {
    let n = rng.gen_range(1..=12);
    (0..n).map(|_| rng.gen_range(1..=50)).collect()
}

#[test]
fn unique_factorization_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let w = random_word(&mut rng);
        let m = product(&w);
        assert!(is_reduced(&m));
        let f = factor(&m).unwrap();
        assert_eq!(f.digits, w);
        assert_eq!(f.matrix, m);
    }
}

#[test]
fn weight_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let (a, b) = (product(&random_word(&mut rng)), product(&random_word(&mut rng)));
        let ab = a.mul(&b);
        assert!(is_reduced(&ab));
        assert_eq!(weight(&ab).unwrap(), weight(&a).unwrap() * weight(&b).unwrap());
    }
}

proptest! {
    #[test]
    fn cylinder_endpoints_are_images_of_zero_and_one(w in prop::collection::vec(1u64..30, 1..8)) {
        let m = product(&w);
        let c = cylinder(&factor(&m).unwrap().digits).unwrap();
        let e0 = moebius_act(&m, &ExtendedPoint::from_int(0)).unwrap();
        // (p_N + p_{N−1})/(q_N + q_{N−1}) is m·1
        let e_one = moebius_act(&m, &ExtendedPoint::from_int(1)).unwrap();
        let ends = [ExtendedPoint::Rational(c.lo.clone()), ExtendedPoint::Rational(c.hi.clone())];
        prop_assert!(ends.contains(&e0));
        prop_assert!(ends.contains(&e_one));
    }

    #[test]
    fn non_reduced_integer_matrices_are_rejected(a in 0i64..20, b in 0i64..20, c in 0i64..20, d in 0i64..20) {
        let m = Mat2Z::from_i64(a, b, c, d);
        match factor(&m) {
            Ok(f) => {
                prop_assert!(is_reduced(&m));
                prop_assert_eq!(product(&f.digits), m);
            }
            Err(_) => prop_assert!(!is_reduced(&m)),
        }
    }
}
