use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sup_error, ErrorReport, Suite, SupConfig};
use crate::codec::{budget, encode_with, layer_sum, pipeline_error_bound, select_params, EncodeOptions};
use crate::combinatorics::{binom_big, pow2_big};
use crate::corpus::{make_function, standard_corpus, CorpusFunction};
use crate::covering::{build_covering_with, cardinality_bound, covering_error_bound};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::format::{parse_manifold, write_manifold};
use crate::oracle::Oracle;
use crate::tensor::{
    coeff_at, dim_fdm, levels_up_to, smolyak_grid, sparse_truncate_with, truncation_error_bound,
    SparseFaberExpansion,
};
use crate::univariate::quantize;

/// Overrides for a suite run; `None` selects the suite's default sweep.
#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub dims: Option<Vec<usize>>,
    pub alphas: Option<Vec<f64>>,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub n_budget: Option<BigUint>,
    pub seed: u64,
    pub grid_level: Option<u32>,
    pub random_points: Option<usize>,
    /// Corpus functions per configuration.
    pub functions: Option<usize>,
    pub exec: Exec,
}

impl SuiteConfig {
    fn dims(&self, default: &[usize]) -> Vec<usize> {
        self.dims.clone().unwrap_or_else(|| default.to_vec())
    }

    fn alphas(&self, default: &[f64]) -> Vec<f64> {
        self.alphas.clone().unwrap_or_else(|| default.to_vec())
    }

    fn levels(&self, default: std::ops::RangeInclusive<u32>) -> Vec<u32> {
        match self.m {
            Some(m) => vec![m],
            None => default.collect(),
        }
    }

    fn functions(&self, default: usize) -> usize {
        self.functions.unwrap_or(default)
    }

    fn random_points(&self, default: usize) -> usize {
        self.random_points.unwrap_or(default)
    }

    fn corpus(&self, d: usize, alpha: f64, count: usize) -> Result<Vec<CorpusFunction>> {
        standard_corpus(d, alpha, count, 4, self.seed)
            .iter()
            .map(make_function)
            .collect()
    }

    fn sup(&self, grid_level: u32, random_points: usize) -> SupConfig {
        SupConfig {
            exec: self.exec,
            ..SupConfig::new(grid_level, random_points, self.seed)
        }
    }
}

struct Row {
    spec: String,
    d: usize,
    alpha: f64,
    m: u32,
    n: u32,
}

fn row(spec: impl Into<String>, d: usize, alpha: f64, m: u32, n: u32) -> Row {
    Row {
        spec: spec.into(),
        d,
        alpha,
        m,
        n,
    }
}

struct Measure {
    value: f64,
    bound: f64,
    grid_level: u32,
    random_points: usize,
    subsampled: bool,
    detail: String,
}

fn measure(value: f64, bound: f64) -> Measure {
    Measure {
        value,
        bound,
        grid_level: 0,
        random_points: 0,
        subsampled: false,
        detail: String::new(),
    }
}

fn timed(suite: Suite, r: Row, body: impl FnOnce() -> Result<Measure>) -> ErrorReport {
    let start = Instant::now();
    let m = body().unwrap_or_else(|e| Measure {
        detail: format!("error: {e}"),
        ..measure(f64::INFINITY, 0.0)
    });
    ErrorReport {
        suite,
        spec: r.spec,
        d: r.d,
        alpha: r.alpha,
        m: r.m,
        n: r.n,
        measured_error: m.value,
        bound: m.bound,
        ratio: ErrorReport::ratio_of(m.value, m.bound),
        grid_level: m.grid_level,
        random_points: m.random_points,
        subsampled: m.subsampled,
        runtime_ms: start.elapsed().as_millis() as u64,
        detail: m.detail,
    }
}

fn random_expansion(d: usize, level: u32, seed: u64) -> SparseFaberExpansion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<_> = SparseFaberExpansion::zeros(d, level)
        .iter()
        .map(|(i, _)| (i, rng.gen_range(-1.0..=1.0)))
        .collect();
    SparseFaberExpansion::from_terms(d, level, terms).expect("canonical indices")
}

fn random_points(d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..d).map(|_| rng.gen()).collect()).collect()
}

/// Runs one suite; bound violations are reported, not raised.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    match suite {
        Suite::Interp => interp(cfg),
        Suite::Projector => projector(cfg),
        Suite::Coefficients => coefficients(cfg),
        Suite::Lemma22 => lemma22(cfg),
        Suite::Quantizer => quantizer(cfg),
        Suite::Covering => covering(cfg),
        Suite::Decomposition => decomposition(cfg),
        Suite::Pipeline => pipeline(cfg),
        Suite::Budget => budget_suite(cfg),
        Suite::Params => params(cfg),
        Suite::Serialization => serialization(cfg),
    }
}

fn interp(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let mut out = Vec::new();
    for d in cfg.dims(&[1, 2, 3]) {
        for alpha in cfg.alphas(&[1.0]) {
            for f in cfg.corpus(d, alpha, cfg.functions(20))? {
                for m in cfg.levels(0..=5) {
                    out.push(timed(Suite::Interp, row(f.spec().to_string(), d, alpha, m, 0), || {
                        let r = sparse_truncate_with(&f, m, d, cfg.exec);
                        let grid = smolyak_grid(m, d);
                        let dev = grid
                            .points
                            .iter()
                            .map(|x| (r.eval(x) - f.eval(x)).abs())
                            .fold(0.0, f64::max);
                        Ok(Measure {
                            detail: format!("grid_points={}", grid.points.len()),
                            ..measure(dev, 1e-10)
                        })
                    }));
                }
            }
        }
    }
    Ok(out)
}

fn projector(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let mut out = Vec::new();
    let points = cfg.random_points(1000);
    for d in cfg.dims(&[1, 2, 3]) {
        for m in cfg.levels(0..=4) {
            for i in 0..cfg.functions(5) {
                let seed = cfg.seed.wrapping_add(i as u64);
                let r = row(format!("random-expansion;d={d};level={m};seed={seed}"), d, 0.0, m, 0);
                out.push(timed(Suite::Projector, r, || {
                    let e = random_expansion(d, m, seed);
                    let r = sparse_truncate_with(&e, m, d, cfg.exec);
                    let dev = random_points(d, points, seed)
                        .iter()
                        .map(|x| (r.eval(x) - e.eval(x)).abs())
                        .fold(0.0, f64::max);
                    Ok(Measure {
                        random_points: points,
                        ..measure(dev, 1e-10)
                    })
                }));
            }
        }
    }
    Ok(out)
}

fn coefficients(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let max_level = cfg.m.unwrap_or(8);
    let mut out = Vec::new();
    for d in cfg.dims(&[1, 2, 3]) {
        for alpha in cfg.alphas(&[0.5, 1.0]) {
            for f in cfg.corpus(d, alpha, cfg.functions(9))? {
                out.push(timed(Suite::Coefficients, row(f.spec().to_string(), d, alpha, max_level, 0), || {
                    // max_{k,s} (|lambda_{k,s}| - 1e-12) / bound_k, against 1
                    let blocks = levels_up_to(d, max_level);
                    let worst = blocks
                        .iter()
                        .map(|k| {
                            let b = (-alpha * (d as f64 + k.l1() as f64)).exp2();
                            cfg.exec.max(k.shift_count(), |flat| {
                                let s = k.unflatten_shift(flat);
                                (coeff_at(&f, k.as_slice(), &s).abs() - 1e-12) / b
                            })
                        })
                        .fold(0.0, f64::max);
                    Ok(Measure {
                        detail: format!("coefficients={}", dim_fdm(max_level, d)),
                        ..measure(worst, 1.0)
                    })
                }));
            }
        }
    }
    Ok(out)
}

fn lemma22(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let mut out = Vec::new();
    let points = cfg.random_points(1000);
    for d in cfg.dims(&[2, 3]) {
        for alpha in cfg.alphas(&[0.5, 1.0]) {
            let corpus = cfg.corpus(d, alpha, cfg.functions(6))?;
            for m in cfg.levels(2..=6) {
                let level = cfg.grid_level.unwrap_or(m + 3);
                for f in &corpus {
                    out.push(timed(Suite::Lemma22, row(f.spec().to_string(), d, alpha, m, 0), || {
                        let r = sparse_truncate_with(f, m, d, cfg.exec);
                        let e = sup_error(f, &r, &cfg.sup(level, points));
                        Ok(Measure {
                            grid_level: level,
                            random_points: points,
                            subsampled: e.subsampled,
                            ..measure(e.value, truncation_error_bound(alpha, d, m))
                        })
                    }));
                }
            }
        }
    }
    Ok(out)
}

fn quantizer(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let mut out = Vec::new();
    for alpha in cfg.alphas(&[0.5, 1.0]) {
        let corpus = cfg.corpus(1, alpha, cfg.functions(100))?;
        for m in cfg.levels(0..=8) {
            let unit = (-alpha * (m as f64 + 1.0)).exp2();
            for f in &corpus {
                out.push(timed(Suite::Quantizer, row(f.spec().to_string(), 1, alpha, m, 0), || {
                    let g = |t: f64| f.eval(&[t]);
                    let code = quantize(g, m, alpha)?;
                    let l = code.l();
                    if l[0] != 0 || l.windows(2).any(|w| (w[1] - w[0]).abs() > 1) {
                        return Err(Error::ChainBroken { node: 0 });
                    }
                    let nodes = l.len() as f64;
                    let err = l
                        .iter()
                        .enumerate()
                        .map(|(s, &ls)| (unit * ls as f64 - g(s as f64 / nodes)).abs())
                        .fold(0.0, f64::max);
                    Ok(measure(err, unit / 2.0 + 1e-12))
                }));
            }
        }
        // distinct codes over a large random corpus against 3^{2^{m+1}}
        let census = 100 * cfg.functions(100);
        let specs = standard_corpus(1, alpha, census, 4, cfg.seed.wrapping_add(1 << 32));
        let funcs = specs.iter().map(make_function).collect::<Result<Vec<_>>>()?;
        for m in cfg.levels(0..=2).into_iter().filter(|&m| m <= 2) {
            let r = row(format!("corpus[{census}]"), 1, alpha, m, 0);
            out.push(timed(Suite::Quantizer, r, || {
                let mut codes = std::collections::HashSet::new();
                for f in &funcs {
                    codes.insert(quantize(|t| f.eval(&[t]), m, alpha)?.l().to_vec());
                }
                let bound = cardinality_bound(m, 1).to_f64().expect("small");
                Ok(Measure {
                    detail: format!("distinct_codes={} of {census}", codes.len()),
                    ..measure(codes.len() as f64, bound)
                })
            }));
        }
    }
    Ok(out)
}

fn covering(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let mut out = Vec::new();
    let points = cfg.random_points(1000);
    for d in cfg.dims(&[2, 3]) {
        for alpha in cfg.alphas(&[0.5, 1.0]) {
            let corpus = cfg.corpus(d, alpha, cfg.functions(6))?;
            for m in cfg.levels(0..=5) {
                let level = cfg.grid_level.unwrap_or(m + 3);
                for f in &corpus {
                    out.push(timed(Suite::Covering, row(f.spec().to_string(), d, alpha, m, 0), || {
                        let c = build_covering_with(f, m, alpha, cfg.exec)?;
                        let e = sup_error(f, &c, &cfg.sup(level, points));
                        Ok(Measure {
                            grid_level: level,
                            random_points: points,
                            subsampled: e.subsampled,
                            detail: format!("banks={}", c.banks().len()),
                            ..measure(e.value, covering_error_bound(alpha, d, m))
                        })
                    }));
                }
            }
        }
    }
    Ok(out)
}

fn decomposition(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let mut out = Vec::new();
    let points = cfg.random_points(500);
    let ns: Vec<u32> = match cfg.n {
        Some(n) => vec![n],
        None => (0..=3).collect(),
    };
    for d in cfg.dims(&[2, 3]) {
        for &n in &ns {
            for i in 0..cfg.functions(3) {
                let seed = cfg.seed.wrapping_add(i as u64);
                let r = row(format!("random-expansion;d={d};level={};seed={seed}", n + 3), d, 0.0, 0, n);
                out.push(timed(Suite::Decomposition, r, || {
                    let f = random_expansion(d, n + 3, seed);
                    let rn = sparse_truncate_with(&f, n, d, cfg.exec);
                    let pts = random_points(d, points, seed);
                    let dev = cfg.exec.max(points, |p| {
                        let x = &pts[p];
                        (f.eval(x) - rn.eval(x) - layer_sum(&f, n, x)).abs()
                    });
                    Ok(Measure {
                        random_points: points,
                        ..measure(dev, 1e-8)
                    })
                }));
            }
        }
    }
    Ok(out)
}

/// `(d, m, n)` configurations of the pipeline sweep.
fn pipeline_configs(cfg: &SuiteConfig) -> Vec<(usize, u32, u32)> {
    if cfg.dims.is_some() || cfg.m.is_some() || cfg.n.is_some() {
        let (m, n) = (cfg.m.unwrap_or(1), cfg.n.unwrap_or(3));
        return cfg.dims(&[2]).into_iter().map(|d| (d, m, n)).collect();
    }
    vec![(2, 1, 3), (2, 2, 4), (2, 2, 6), (3, 1, 3)]
}

fn pipeline(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let mut out = Vec::new();
    let points = cfg.random_points(1000);
    let opts = EncodeOptions {
        exec: cfg.exec,
        memoize: true,
    };
    for (d, m, n) in pipeline_configs(cfg) {
        for alpha in cfg.alphas(&[0.5, 1.0]) {
            let level = cfg.grid_level.unwrap_or(m + n + 3);
            for f in cfg.corpus(d, alpha, cfg.functions(6))? {
                out.push(timed(Suite::Pipeline, row(f.spec().to_string(), d, alpha, m, n), || {
                    let code = encode_with(&f, m, n, alpha, d, opts)?;
                    let e = sup_error(&f, &code, &cfg.sup(level, points));
                    let sizes: Vec<String> =
                        code.layers().iter().map(|l| l.dictionary().len().to_string()).collect();
                    Ok(Measure {
                        grid_level: level,
                        random_points: points,
                        subsampled: e.subsampled,
                        detail: format!("dictionary_sizes={}", sizes.join("/")),
                        ..measure(e.value, pipeline_error_bound(alpha, d, m, n))
                    })
                }));
            }
        }
    }
    Ok(out)
}

fn budget_suite(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let configs: Vec<(usize, u32, u32)> = if cfg.dims.is_some() || cfg.m.is_some() || cfg.n.is_some() {
        let (m, n) = (cfg.m.unwrap_or(1), cfg.n.unwrap_or(3));
        cfg.dims(&[2]).into_iter().map(|d| (d, m, n)).collect()
    } else {
        vec![(1, 2, 4), (2, 1, 3), (3, 1, 2)]
    };
    let opts = EncodeOptions {
        exec: cfg.exec,
        memoize: true,
    };
    let mut out = Vec::new();
    for (d, m, n) in configs {
        let b = budget(m, n, d);
        let bound = b.n_mn_bound.to_f64().unwrap_or(f64::INFINITY);
        for alpha in cfg.alphas(&[1.0]) {
            for f in cfg.corpus(d, alpha, cfg.functions(3))? {
                out.push(timed(Suite::Budget, row(f.spec().to_string(), d, alpha, m, n), || {
                    let code = encode_with(&f, m, n, alpha, d, opts)?;
                    let count = code.parameter_count();
                    let formula = dim_fdm(n, d)
                        + code
                            .layers()
                            .iter()
                            .enumerate()
                            .map(|(j, l)| l.dictionary().len() as u64 * dim_fdm(m, d - j) + l.theta().len() as u64)
                            .sum::<u64>();
                    let exact = BigUint::from(count) <= b.n_mn_bound && count == formula;
                    Ok(Measure {
                        detail: format!("lemma_bound={} n_mn={} k_mn={} formula={formula}", b.n_mn_bound, b.n_mn, b.k_mn),
                        ..measure(if exact { count as f64 } else { f64::INFINITY }, bound)
                    })
                }));
            }
        }
    }
    Ok(out)
}

fn params(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let n_budget = cfg.n_budget.clone().unwrap_or_else(|| BigUint::from(1_000_000u32));
    let mut out = Vec::new();
    for d in cfg.dims(&[1, 2, 3]) {
        let r = row(format!("N={n_budget}"), d, 0.0, 0, 0);
        out.push(timed(Suite::Params, r, || {
            let dd = d as u64;
            let trunc = |n: u64| pow2_big(n + 2) * binom_big(n + dd, dd - 1) * 2u32;
            let dict = |m: u64| {
                let e = (1u64 << (m + 1)) * crate::combinatorics::binom(m + dd - 1, dd - 1);
                BigUint::from(3u32).pow(e as u32) * pow2_big(m + 1) * binom_big(m + dd, dd - 1) * 2u32
            };
            let budget_f = n_budget.to_f64().unwrap_or(f64::INFINITY);
            let s = match select_params(&n_budget, d) {
                Ok(s) => s,
                Err(Error::Infeasible(msg)) => {
                    // correct only if level 1 already overflows the budget
                    let really = trunc(1) > n_budget || dict(1) > n_budget;
                    return Ok(Measure {
                        detail: format!("infeasible: {msg}"),
                        ..measure(if really { 0.0 } else { f64::INFINITY }, budget_f)
                    });
                }
                Err(e) => return Err(e),
            };
            let (mm, nn) = (s.m as u64, s.n as u64);
            let used = trunc(nn).max(dict(mm));
            let maximal = trunc(nn + 1) > n_budget && dict(mm + 1) > n_budget;
            Ok(Measure {
                detail: format!(
                    "m={} n={} m_star={} threshold_met={} regime_ok={}",
                    s.m, s.n, s.m_star, s.meets_threshold, s.regime_ok
                ),
                ..measure(
                    if maximal { used.to_f64().unwrap_or(f64::INFINITY) } else { f64::INFINITY },
                    budget_f,
                )
            })
        }));
    }
    Ok(out)
}

fn serialization(cfg: &SuiteConfig) -> Result<Vec<ErrorReport>> {
    let points = cfg.random_points(1000);
    let configs: Vec<(usize, u32, u32)> = if cfg.dims.is_some() || cfg.m.is_some() || cfg.n.is_some() {
        let (m, n) = (cfg.m.unwrap_or(1), cfg.n.unwrap_or(3));
        cfg.dims(&[2]).into_iter().map(|d| (d, m, n)).collect()
    } else {
        vec![(1, 2, 4), (2, 1, 3), (2, 2, 4), (3, 1, 2)]
    };
    let opts = EncodeOptions {
        exec: cfg.exec,
        memoize: true,
    };
    let mut out = Vec::new();
    for (d, m, n) in configs {
        for alpha in cfg.alphas(&[0.5, 1.0]) {
            for f in cfg.corpus(d, alpha, cfg.functions(3))? {
                out.push(timed(Suite::Serialization, row(f.spec().to_string(), d, alpha, m, n), || {
                    let code = encode_with(&f, m, n, alpha, d, opts)?;
                    let text = write_manifold(&code);
                    let back = parse_manifold(&text)?;
                    let mismatches = random_points(d, points, cfg.seed)
                        .iter()
                        .filter(|x| code.eval(x).to_bits() != back.eval(x).to_bits())
                        .count();
                    Ok(Measure {
                        random_points: points,
                        detail: format!("bytes={}", text.len()),
                        ..measure(mismatches as f64, 0.0)
                    })
                }));
            }
        }
    }
    Ok(out)
}
