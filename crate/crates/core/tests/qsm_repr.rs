use std::collections::BTreeMap;

use gl2_boundary::arith::{ExtendedPoint, Rat};
use gl2_boundary::coset::p1_list;
use gl2_boundary::qsm::repr::*;
use gl2_boundary::qsm::*;
use num_complex::{Complex, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: u64 = 5;

fn observable(rng: &mut ChaCha8Rng) -> Observable {
    let slots = p1_list(N);
    let tags = [QMat2::identity(), QMat2::from_i64(1, 0, 0, 2), QMat2::from_i64(2, 1, 0, 1), QMat2::from_i64(1, 1, 0, 3)];
    let terms = (0..3)
        .map(|i| {
            let mut tag = if i == 0 { QMat2::identity() } else { tags[rng.gen_range(0..tags.len())].clone() };
            if rng.gen_bool(0.3) {
                tag = tag.inverse().unwrap();
            }
            let mut m = BTreeMap::new();
            for _ in 0..4 {
                m.insert(slots[rng.gen_range(0..slots.len())], coef_i64(rng.gen_range(-3..=3)));
            }
            let x_profile = match rng.gen_range(0..3) {
                0 => XProfile::Const(coef_i64(1)),
                1 => XProfile::Cylinder(vec![rng.gen_range(1..=3)]),
                _ => XProfile::Pullback(vec![1], Box::new(XProfile::Cylinder(vec![1, rng.gen_range(1..=2)]))),
            };
            let c = Complex::new(Rat::new(rng.gen_range(1..=5).into(), 2.into()), Rat::from_integer(rng.gen_range(-1..=1).into()));
            Term { coef: c, tag, rho: RhoPattern::Any, s_support: SSupport::Map(m), x_profile }
        })
        .collect();
    Observable::terms(N, terms).unwrap()
}

/// Same terms with every slot weight set to 1.
fn slot_blind(f: &Observable) -> Observable {
    let mut rng = ChaCha8Rng::seed_from_u64(f.tags().len() as u64);
    let terms = f
        .tags()
        .iter()
        .map(|t| Term { coef: coef_i64(rng.gen_range(1..=3)), tag: t.clone(), rho: RhoPattern::Any, s_support: SSupport::All(coef_i64(1)), x_profile: XProfile::Cylinder(vec![rng.gen_range(1..=2)]) })
        .collect();
    Observable::terms(N, terms).unwrap()
}

fn setup() -> (ExtendedPoint, QMat2, Basis, Basis) {
    let x: ExtendedPoint = "sqrt(3)-1".parse().unwrap();
    let rho = QMat2::from_i64(1, 1, 0, 2);
    let inner = Basis::new(6, WordSpace::new(2, 6, 1).unwrap()).unwrap();
    let outer = Basis::new(6, WordSpace::new(3, 18, 1).unwrap()).unwrap();
    (x, rho, inner, outer)
}

#[test]
fn isometries_and_range_projections() {
    let (_, _, inner, outer) = setup();
    for k in 1..=3 {
        let s: SparseMat<Coef> = s_operator(k, &inner, &outer).unwrap();
        assert_eq!(s.adjoint().mul(&s).unwrap(), SparseMat::identity(inner.dim()));
    }
    // Σ_{k≤K} S_k S_k* on the full algebraic space: projection onto first digit ≤ K
    let w = Basis::new(3, WordSpace::new(3, 12, 1).unwrap()).unwrap();
    let shorter = Basis::new(3, WordSpace::new(2, 12, 1).unwrap()).unwrap();
    let kmax = 3;
    let mut sum: SparseMat<Coef> = SparseMat::zeros(w.dim(), w.dim());
    for k in 1..=kmax {
        let sub = Basis::new(3, WordSpace::new(2, 12 / k, 1).unwrap()).unwrap();
        let s: SparseMat<Coef> = s_operator(k, &sub, &w).unwrap();
        sum = sum.add(&s.mul(&s.adjoint()).unwrap());
    }
    let mut proj: SparseMat<Coef> = SparseMat::zeros(w.dim(), w.dim());
    for i in shifted_indices(&w, &shorter.words, kmax) {
        proj.set(i, i, coef_i64(1));
    }
    assert_eq!(sum, proj);
}

#[test]
fn isometry_covariance() {
    // S_k π(f) = π(χ_{X_k}·f∘g_k⁻¹) S_k
    let (x, rho, inner, outer) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in p1_list(N).iter().step_by(2) {
        let f = observable(&mut rng);
        for k in 1..=3 {
            let sk: SparseMat<Coef> = s_operator(k, &inner, &outer).unwrap();
            let lhs = sk.mul(&represent::<Coef>(&f, &rho, &x, s, &inner).unwrap()).unwrap();
            let rhs = represent::<Coef>(&f.cylinder_translate(k), &rho, &x, s, &outer).unwrap().mul(&sk).unwrap();
            assert_eq!(lhs, rhs, "k = {k}, s = {s}");
            assert!(lhs.nnz() > 0);
        }
    }
}

#[test]
fn shift_covariance() {
    // Σ_{k≤K} S_k π(f) S_k* = π(f∘T) on words k·w with k ≤ K
    let (x, rho, _, outer) = setup();
    let kmax = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for s in p1_list(N).iter().step_by(3) {
        let f = observable(&mut rng);
        let mut sum: SparseMat<Coef> = SparseMat::zeros(outer.dim(), outer.dim());
        let mut inner_words = None;
        for k in 1..=kmax {
            let sub = Basis::new(outer.max_det, WordSpace::new(2, 18 / k, 1).unwrap()).unwrap();
            let sk: SparseMat<Coef> = s_operator(k, &sub, &outer).unwrap();
            let pf = represent::<Coef>(&f, &rho, &x, s, &sub).unwrap();
            sum = sum.add(&sk.mul(&pf).unwrap().mul(&sk.adjoint()).unwrap());
            if k == kmax {
                inner_words = Some(sub.words);
            }
        }
        let keep = shifted_indices(&outer, &inner_words.unwrap(), kmax);
        let pt = represent::<Coef>(&f.shift_t(), &rho, &x, s, &outer).unwrap();
        let (a, b) = (restrict(&sum, &keep), restrict(&pt, &keep));
        assert_eq!(a, b, "s = {s}");
        assert!(a.nnz() > 0);
    }
}

#[test]
fn time_evolution_is_implemented_by_the_hamiltonian() {
    let x: ExtendedPoint = "(sqrt(5)-1)/2".parse().unwrap();
    let basis = Basis::new(8, WordSpace::spectral(12).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = p1_list(N)[2];
    for t in [0.5, 1.0, std::f64::consts::PI, -2.7] {
        let f = observable(&mut rng);
        let a: SparseMat<Complex64> = represent(&f.evolve(t), &QMat2::identity(), &x, &s, &basis).unwrap();
        let b = conjugate_by_time(&represent(&f, &QMat2::identity(), &x, &s, &basis).unwrap(), t, &basis);
        assert!(a.max_diff(&b) < 1e-12, "t = {t}: {}", a.max_diff(&b));
    }
}

#[test]
fn representation_is_a_star_homomorphism_on_small_supports() {
    // Entries of π(a⋆b) and π(a)π(b) agree wherever all intermediate lattices fit.
    // Slot-dependent observables: empty word only (g_w and the support tags do not
    // commute on the slot); slot-blind ones: every word.
    let x: ExtendedPoint = "sqrt(2)-1".parse().unwrap();
    let empty = Basis::new(24, WordSpace::new(0, 1, 1).unwrap()).unwrap();
    let words = Basis::new(24, WordSpace::new(2, 6, 1).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let s = p1_list(N)[4];
    let rho = QMat2::identity();
    for i in 0..8 {
        let (mut a, mut b) = (observable(&mut rng), observable(&mut rng));
        let basis = if i % 2 == 0 {
            &empty
        } else {
            a = slot_blind(&a);
            b = slot_blind(&b);
            &words
        };
        let pab: SparseMat<Coef> = represent(&a.convolve(&b).unwrap(), &rho, &x, &s, &basis).unwrap();
        let prod = represent::<Coef>(&a, &rho, &x, &s, &basis).unwrap().mul(&represent(&b, &rho, &x, &s, &basis).unwrap()).unwrap();
        // columns whose lattice has det ≤ 2: every intermediate det stays ≤ 24
        let keep: Vec<usize> = (0..basis.dim()).filter(|&i| basis.lattices[basis.split(i).0].det() <= 2).collect();
        for &j in &keep {
            for i in 0..basis.dim() {
                assert_eq!(pab.get(i, j), prod.get(i, j));
            }
        }
        let pstar: SparseMat<Coef> = represent(&a.star(), &rho, &x, &s, &basis).unwrap();
        let adj = represent::<Coef>(&a, &rho, &x, &s, &basis).unwrap().adjoint();
        for &j in &keep {
            for &i in &keep {
                assert_eq!(pstar.get(i, j), adj.get(i, j));
            }
        }
    }
}

#[test]
fn truncation_must_hold_the_support() {
    let x: ExtendedPoint = "sqrt(2)-1".parse().unwrap();
    let f = Observable::terms(N, vec![Term::delta(QMat2::from_i64(1, 0, 0, 7), coef_i64(1))]).unwrap();
    let basis = Basis::new(4, WordSpace::spectral(4).unwrap()).unwrap();
    assert!(represent::<Coef>(&f, &QMat2::identity(), &x, &p1_list(N)[0], &basis).is_err());
}
