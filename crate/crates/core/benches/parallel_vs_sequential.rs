use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gl2_boundary::arith::ExtendedPoint;
use gl2_boundary::coset::p1_list;
use gl2_boundary::lms::{lms_sampled, random_digits};
use gl2_boundary::modsym::symbol_space;
use gl2_boundary::par;
use gl2_boundary::qsm::counting::partition_function;
use gl2_boundary::qsm::repr::{represent, Basis, WordSpace};
use gl2_boundary::qsm::states::{gibbs_state, Truncation};
use gl2_boundary::qsm::*;
use num_complex::Complex64;

const MODES: [(&str, bool); 2] = [("sequential", true), ("parallel", false)];

fn observable() -> Observable {
    Observable::terms(
        11,
        vec![
            Term::delta(QMat2::identity(), coef_i64(1)),
            Term::delta(QMat2::from_i64(1, 0, 0, 2), coef_i64(3)),
            Term { coef: coef_i64(2), tag: QMat2::from_i64(1, 1, 0, 3), rho: RhoPattern::Any, s_support: SSupport::All(coef_i64(1)), x_profile: XProfile::Cylinder(vec![2]) },
        ],
    )
    .unwrap()
}

fn bench(c: &mut Criterion) {
    let x: ExtendedPoint = "sqrt(2)-1".parse().unwrap();
    let s = p1_list(11)[0];
    let f = observable();
    let basis = Basis::new(24, WordSpace::spectral(24).unwrap()).unwrap();
    let space = symbol_space(11).unwrap();
    let seeds: Vec<Vec<u64>> = (0..8).map(|k| random_digits(k, 8000)).collect();

    let mut g = c.benchmark_group("represent");
    g.sample_size(10);
    for (name, seq) in MODES {
        par::set_sequential(seq);
        g.bench_function(name, |b| b.iter(|| black_box(represent::<Complex64>(&f, &QMat2::identity(), &x, &s, &basis).unwrap().nnz())));
    }
    g.finish();

    let mut g = c.benchmark_group("gibbs_state");
    g.sample_size(10);
    for (name, seq) in MODES {
        par::set_sequential(seq);
        g.bench_function(name, |b| b.iter(|| black_box(gibbs_state(&f, 3.0, &QMat2::identity(), &x, &s, Truncation { max_det: 24, max_weight: 24 }).unwrap())));
    }
    g.finish();

    let mut g = c.benchmark_group("partition_function");
    g.sample_size(10);
    for (name, seq) in MODES {
        par::set_sequential(seq);
        g.bench_function(name, |b| b.iter(|| black_box(partition_function(3.0, 100_000, 100_000).unwrap())));
    }
    g.finish();

    let mut g = c.benchmark_group("lms_sampled_seeds");
    g.sample_size(10);
    for (name, seq) in MODES {
        par::set_sequential(seq);
        g.bench_function(name, |b| {
            b.iter(|| black_box(par::map(&seeds, |d| lms_sampled(&space, d, &s, 4000, &[4000]).unwrap())))
        });
    }
    g.finish();
    par::set_sequential(false);
}

criterion_group!(benches, bench);
criterion_main!(benches);
