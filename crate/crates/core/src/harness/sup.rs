//! Sup-norm estimation on dyadic grids plus random points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Exec;
use crate::oracle::{Oracle, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupConfig {
    /// Grid `{s 2^{-L}}^d`.
    pub grid_level: u32,
    /// Extra uniformly random points.
    pub random_points: usize,
    pub seed: u64,
    /// Largest full grid that is scanned exhaustively.
    pub max_grid_points: usize,
    /// Grid points drawn when the full grid is not scanned.
    pub subsample: usize,
    pub exec: Exec,
}

impl SupConfig {
    pub fn new(grid_level: u32, random_points: usize, seed: u64) -> Self {
        Self {
            grid_level,
            random_points,
            seed,
            max_grid_points: 1 << 23,
            subsample: 1_000_000,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupError {
    pub value: f64,
    /// Grid points actually visited.
    pub grid_points: usize,
    pub subsampled: bool,
}

/// `max |f - g|` over the grid `{s 2^{-L}}^d` (exhaustive for `d <= 2`
/// within the cap, otherwise a seeded subsample) and `R` random points.
pub fn sup_error<F: Oracle + ?Sized, G: Oracle + ?Sized>(f: &F, g: &G, cfg: &SupConfig) -> SupError {
    let d = f.dim();
    assert_eq!(d, g.dim(), "oracle dimensions differ");
    assert!(cfg.grid_level >= 1, "grid level must be at least 1");
    let side = (1usize << cfg.grid_level) + 1;
    let h = 1.0 / (side - 1) as f64;
    let full = side.checked_pow(d as u32).filter(|&n| n <= cfg.max_grid_points);
    let diff = |x: &[f64]| (f.eval(x) - g.eval(x)).abs();

    let (grid_max, grid_points, subsampled) = match full {
        Some(total) if d <= 2 => {
            let v = cfg.exec.max(total, |i| {
                let mut x = Point::with_capacity(d);
                let mut r = i;
                for _ in 0..d {
                    x.push((r % side) as f64 * h);
                    r /= side;
                }
                diff(&x)
            });
            (v, total, false)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(1);
            let idx: Vec<u32> = (0..cfg.subsample * d).map(|_| rng.gen_range(0..side as u32)).collect();
            let v = cfg.exec.max(cfg.subsample, |i| {
                let x: Point = idx[i * d..(i + 1) * d].iter().map(|&s| s as f64 * h).collect();
                diff(&x)
            });
            (v, cfg.subsample, true)
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts: Vec<f64> = (0..cfg.random_points * d).map(|_| rng.gen()).collect();
    let rand_max = cfg.exec.max(cfg.random_points, |i| diff(&pts[i * d..(i + 1) * d]));
    SupError {
        value: crate::exec::nan_max(grid_max, rand_max),
        grid_points,
        subsampled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{make_function, Family, FunctionSpec};
    use crate::oracle::FnOracle;
    use crate::tensor::sparse_truncate;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identical_functions() {
        let f = FnOracle::new(2, |x: &[f64]| x[0] * x[1]);
        let e = sup_error(&f, &f, &SupConfig::new(4, 100, 0));
        assert_eq!(e.value, 0.0);
        assert_eq!(e.grid_points, 17 * 17);
        assert!(!e.subsampled);
    }

    #[test]
    fn parabola_against_chord() {
        let f = FnOracle::new(1, |x: &[f64]| x[0] * (1.0 - x[0]));
        let r = sparse_truncate(&f, 0, 1);
        let e = sup_error(&f, &r, &SupConfig::new(10, 0, 0));
        assert_abs_diff_eq!(e.value, 0.0625, epsilon = 1e-15);
    }

    #[test]
    fn three_dims_subsample() {
        let f = FnOracle::new(3, |x: &[f64]| x[0] + x[1] + x[2]);
        let z = FnOracle::new(3, |_: &[f64]| 0.0);
        let mut cfg = SupConfig::new(3, 10, 1);
        cfg.subsample = 5000;
        let e = sup_error(&f, &z, &cfg);
        assert!(e.subsampled);
        assert_eq!(e.grid_points, 5000);
        assert!(e.value <= 3.0 && e.value > 2.5);
    }

    #[test]
    fn cap_forces_subsampling() {
        let f = FnOracle::new(2, |x: &[f64]| x[0]);
        let mut cfg = SupConfig::new(6, 0, 0);
        cfg.max_grid_points = 100;
        cfg.subsample = 1000;
        assert!(sup_error(&f, &f, &cfg).subsampled);
    }

    #[test]
    fn refinement_changes_little() {
        let spec = FunctionSpec::new(Family::TensorSmooth, 2, 1.0, 4, 2);
        let f = make_function(&spec).unwrap();
        let r = sparse_truncate(&f, 2, 2);
        for l in 3..6 {
            let a = sup_error(&f, &r, &SupConfig::new(l, 0, 0)).value;
            let b = sup_error(&f, &r, &SupConfig::new(l + 2, 0, 0)).value;
            assert!((a - b).abs() <= 2.0 * (-(l as f64)).exp2());
        }
    }

    #[test]
    fn deterministic_across_exec() {
        let spec = FunctionSpec::new(Family::FaberRandom, 3, 0.5, 1, 3);
        let f = make_function(&spec).unwrap();
        let r = sparse_truncate(&f, 1, 3);
        let mut cfg = SupConfig::new(5, 300, 8);
        cfg.subsample = 20_000;
        let a = sup_error(&f, &r, &SupConfig { exec: Exec::Sequential, ..cfg });
        let b = sup_error(&f, &r, &SupConfig { exec: Exec::Parallel, ..cfg });
        assert_eq!(a, b);
    }
}
