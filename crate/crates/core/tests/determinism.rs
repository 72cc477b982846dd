use faber_manifold::codec::{encode_with, EncodeOptions};
use faber_manifold::corpus::{make_function, seminorm_estimate_with, standard_corpus};
use faber_manifold::covering::build_covering_with;
use faber_manifold::format::write_manifold;
use faber_manifold::harness::{run_suite, Suite, SuiteConfig};
use faber_manifold::tensor::sparse_truncate_with;
use faber_manifold::Exec;

#[test]
fn sequential_and_parallel_agree() {
    for spec in standard_corpus(2, 0.5, 6, 3, 4) {
        let f = make_function(&spec).unwrap();
        let a = sparse_truncate_with(&f, 4, 2, Exec::Sequential);
        let b = sparse_truncate_with(&f, 4, 2, Exec::Parallel);
        assert_eq!(a, b);

        let a = build_covering_with(&f, 3, 0.5, Exec::Sequential).unwrap();
        let b = build_covering_with(&f, 3, 0.5, Exec::Parallel).unwrap();
        assert_eq!(a, b);

        let seq = EncodeOptions { exec: Exec::Sequential, memoize: false };
        let par = EncodeOptions { exec: Exec::Parallel, memoize: true };
        let a = encode_with(&f, 1, 3, 0.5, 2, seq).unwrap();
        let b = encode_with(&f, 1, 3, 0.5, 2, par).unwrap();
        assert_eq!(write_manifold(&a), write_manifold(&b));

        let a = seminorm_estimate_with(&f, 0.5, 0b11, 3000, 8, Exec::Sequential);
        let b = seminorm_estimate_with(&f, 0.5, 0b11, 3000, 8, Exec::Parallel);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn suite_reports_are_reproducible() {
    for exec in [Exec::Sequential, Exec::Parallel] {
        let cfg = SuiteConfig {
            dims: Some(vec![2]),
            m: Some(1),
            n: Some(3),
            alphas: Some(vec![1.0]),
            functions: Some(2),
            exec,
            ..SuiteConfig::default()
        };
        let strip = |s| {
            run_suite(s, &cfg)
                .unwrap()
                .into_iter()
                .map(|mut r| {
                    r.runtime_ms = 0;
                    r.csv_record()
                })
                .collect::<Vec<_>>()
        };
        for s in [Suite::Pipeline, Suite::Covering, Suite::Serialization] {
            assert_eq!(strip(s), strip(s));
        }
    }
}
