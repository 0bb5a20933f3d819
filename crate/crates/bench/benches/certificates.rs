use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use vicert::certificates::{
    maximal_rank_tsearch, pmatrix_minors, pmatrix_oracle, principal_submatrix_sigma_sweep,
    uniform_pfunction_search, RankSearchConfig, SampleSet,
};
use vicert::{lookup, Matrix};

fn certificates(c: &mut Criterion) {
    let a = Matrix::from_fn(10, 10, |i, j| {
        if i == j {
            4.0
        } else {
            ((i * 7 + j * 3) % 5) as f64 * 0.1 - 0.2
        }
    });
    c.bench_function("pmatrix_minors/10x10", |b| {
        b.iter(|| pmatrix_minors(black_box(&a)).unwrap())
    });
    let a3 = Matrix::from_row_slice(3, 3, &[2., -1., 0.5, 0.3, 1., -0.2, 0.1, 0.4, 3.]);
    c.bench_function("pmatrix_oracle/3x3/1e5", |b| {
        b.iter(|| pmatrix_oracle(black_box(&a3), 100_000, 1).unwrap())
    });

    let p = lookup("sine-coupled").unwrap().def.to_vi().unwrap();
    let s = SampleSet::boundary_mix(p.set(), 200, 42, 10.0);
    c.bench_function("sigma_sweep/sine-coupled/200", |b| {
        b.iter(|| principal_submatrix_sigma_sweep(black_box(&p), &s, 1e-10).unwrap())
    });
    c.bench_function("maximal_rank/sine-coupled/200", |b| {
        b.iter(|| maximal_rank_tsearch(black_box(&p), &s, &RankSearchConfig::default()).unwrap())
    });
    let vi = lookup("example-vi").unwrap().def.to_vi().unwrap();
    c.bench_function("pfunction/example-vi/1000", |b| {
        b.iter(|| uniform_pfunction_search(black_box(&vi), 1000, 42, 10.0).unwrap())
    });
}

criterion_group!(benches, certificates);
criterion_main!(benches);
