use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fqcount_core::constants::constant_kq;
use fqcount_core::estimator::family_estimator;
use fqcount_core::semigroup::oracle_count;
use fqcount_core::{count, estimate_range, field_of_size, EstimateOptions, FamilySpec, MonicPoly};

fn counts(c: &mut Criterion) {
    let landau = FamilySpec::Landau { q: 3 };
    c.bench_function("count landau q=3 N=200", |b| b.iter(|| count(black_box(&landau), 200).unwrap()));

    let field = field_of_size(9).unwrap();
    let m = MonicPoly::new(&field, vec![1, 0, 1]).unwrap();
    let arith = FamilySpec::Arith { field, a: vec![1], m };
    c.bench_function("count arith q=9 m=T^2+1 N=60", |b| b.iter(|| count(black_box(&arith), 60).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let field = field_of_size(3).unwrap();
    let spec = FamilySpec::EvenMultiplicity { q: 3 };
    c.bench_function("oracle s1 q=3 degree 8", |b| {
        b.iter(|| oracle_count(&field, black_box(&spec), 4, u64::MAX).unwrap())
    });
}

fn asymptotics(c: &mut Criterion) {
    c.bench_function("constant K_3 15 digits", |b| b.iter(|| constant_kq(black_box(3), 15).unwrap()));

    let spec = family_estimator(&FamilySpec::Landau { q: 5 }, 0, 20, None).unwrap();
    let opts = EstimateOptions { digits: 20, ..Default::default() };
    let ns: Vec<u64> = (92..=200).collect();
    c.bench_function("estimates landau q=5 n=92..=200", |b| {
        b.iter(|| estimate_range(black_box(&spec), &ns, &opts).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = counts, oracle, asymptotics
}
criterion_main!(benches);
