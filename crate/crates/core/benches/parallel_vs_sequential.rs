use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use faber_manifold::codec::{encode_with, EncodeOptions};
use faber_manifold::corpus::{make_function, Family, FunctionSpec};
use faber_manifold::covering::build_covering_with;
use faber_manifold::harness::{sup_error, SupConfig};
use faber_manifold::tensor::sparse_truncate_with;
use faber_manifold::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn function(d: usize) -> faber_manifold::corpus::CorpusFunction {
    make_function(&FunctionSpec::new(Family::TensorSmooth, d, 1.0, 7, 2)).unwrap()
}

fn bench(c: &mut Criterion) {
    let f = function(3);
    let mut g = c.benchmark_group("sparse_truncate d=3 m=6");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sparse_truncate_with(black_box(&f), 6, 3, exec))
        });
    }
    g.finish();

    let f2 = function(2);
    let mut g = c.benchmark_group("build_covering d=2 m=3");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| build_covering_with(black_box(&f2), 3, 1.0, exec).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("encode d=2 m=1 n=3");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = EncodeOptions { exec, memoize: true };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| encode_with(black_box(&f2), 1, 3, 1.0, 2, opts).unwrap())
        });
    }
    g.finish();

    let approx = sparse_truncate_with(&f2, 4, 2, Exec::Sequential);
    let mut g = c.benchmark_group("sup_error d=2 L=8");
    for (name, exec) in MODES {
        let cfg = SupConfig { exec, ..SupConfig::new(8, 10_000, 0) };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sup_error(black_box(&f2), &approx, &cfg))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
