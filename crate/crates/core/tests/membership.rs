//! Unit-ball membership of corpus functions and of the derived functions the
//! encoder feeds to the covering step.

use faber_manifold::codec::t_localized_eval;
use faber_manifold::corpus::{make_function, norm_estimate, standard_corpus};
use faber_manifold::covering::KFunction;
use faber_manifold::tensor::{levels_up_to, MultiIndex};
use faber_manifold::{FnOracle, Oracle};

const TOL: f64 = 1e-9;

fn boundary_points(d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            x[i % d] = if rng.gen::<bool>() { 1.0 } else { 0.0 };
            x
        })
        .collect()
}

#[test]
fn corpus_functions_lie_in_the_unit_ball() {
    for d in 1..=3 {
        for alpha in [0.5, 1.0] {
            for spec in standard_corpus(d, alpha, 9, 3, 11) {
                let f = make_function(&spec).unwrap();
                assert!(f.certified_norm() <= 1.0 + TOL, "{spec}");
                let est = norm_estimate(&f, alpha, 10_000, 3);
                assert!(est <= 1.0 + TOL, "{spec}: estimate {est}");
                for x in boundary_points(d, 1000, 5) {
                    assert!(f.eval(&x).abs() <= 1e-12, "{spec} at {x:?}");
                }
            }
        }
    }
}

#[test]
fn corpus_is_deterministic() {
    let a = standard_corpus(2, 0.5, 12, 3, 99);
    let b = standard_corpus(2, 0.5, 12, 3, 99);
    assert_eq!(a, b);
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let pts: Vec<[f64; 2]> = (0..1000).map(|_| [rng.gen(), rng.gen()]).collect();
    for spec in &a {
        let f = make_function(spec).unwrap();
        let g = make_function(&spec.to_string().parse().unwrap()).unwrap();
        for x in &pts {
            assert_eq!(f.eval(x).to_bits(), g.eval(x).to_bits());
        }
    }
}

#[test]
fn k_functions_lie_in_the_unit_ball() {
    for alpha in [0.5, 1.0] {
        for spec in standard_corpus(3, alpha, 6, 2, 7) {
            let f = make_function(&spec).unwrap();
            for kbar in levels_up_to(2, 2) {
                for flat in 0..kbar.shift_count() {
                    let sbar = kbar.unflatten_shift(flat);
                    let k = KFunction::new(&f, &kbar, &sbar, alpha);
                    assert_eq!(k.dim(), 1);
                    assert!(k.eval(0.0).abs() <= 1e-12);
                    assert!(k.eval(1.0).abs() <= 1e-12);
                    let est = norm_estimate(&k, alpha, 2000, 1);
                    assert!(est <= 1.0 + TOL, "{spec} kbar={kbar:?} sbar={sbar:?}: {est}");
                }
            }
        }
    }
}

#[test]
fn localized_residuals_lie_in_the_unit_ball() {
    for d in 2..=3 {
        for alpha in [0.5, 1.0] {
            for spec in standard_corpus(d, alpha, 6, 3, 21) {
                let f = make_function(&spec).unwrap();
                for k in levels_up_to(d, 2) {
                    let k = MultiIndex::new(k.as_slice().iter().map(|&v| v + 1).collect());
                    for flat in [0, k.shift_count() / 2, k.shift_count() - 1] {
                        let s = k.unflatten_shift(flat);
                        let g = FnOracle::new(d, |x: &[f64]| t_localized_eval(&f, &k, &s, x, alpha));
                        for x in boundary_points(d, 100, 2) {
                            assert!(g.eval(&x).abs() <= 1e-12, "{spec} k={k:?}");
                        }
                        let est = norm_estimate(&g, alpha, 2000, 4);
                        assert!(est <= 1.0 + TOL, "{spec} k={k:?} s={s:?}: {est}");
                    }
                }
            }
        }
    }
}
