//! Parametric-manifold codec: `f` is encoded as raw truncation coefficients
//! `lambda^R` plus, per layer `j`, a dictionary of covering codes and an
//! assignment table over `Gamma_j(n)`.

mod budget;
mod residual;

use std::collections::HashMap;

use smallvec::SmallVec;

pub use budget::{
    budget, budget_threshold, gamma_size, log2_big, pipeline_error_bound, select_params,
    theorem_c, theorem_k, theorem_upper_bound, theorem_upper_bound_log2, ParamBudget, ParamSelection,
};
pub(crate) use residual::residual_taps;
pub use residual::{layer_f_eval, layer_sum, t_eval, t_localized_eval};

use crate::covering::{build_covering_with, CoveringCode};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::oracle::{MemoOracle, Oracle, Point};
use crate::tensor::{
    levels_up_to, second_difference_stencil, sparse_truncate_with, MultiIndex, SparseFaberExpansion,
};
use crate::univariate::{active_shift, check_alpha, faber_eval_level, pow2, BOUNDARY_TOL};

/// `(k_j, s_j, s_{j+1})` in `Gamma_j(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GammaTriple {
    pub k: MultiIndex,
    pub s: Vec<u64>,
    pub s_next: u64,
}

/// `Gamma_j(n)` ordered by `k_j` (`|k_j|_1`, then lexicographic), then
/// `s_j` lexicographic, then `s_{j+1}`.
pub fn gamma_set(j: usize, n: u32, d: usize) -> Vec<GammaTriple> {
    assert!(j < d, "layer index {j} out of range for d = {d}");
    let mut out = Vec::with_capacity(budget::gamma_size(j, n) as usize);
    for k in levels_up_to(j, n) {
        let next = 1u64 << (n + 1 - k.l1());
        for flat in 0..k.shift_count() {
            let s = k.unflatten_shift(flat);
            for s_next in 0..next {
                out.push(GammaTriple {
                    k: k.clone(),
                    s: s.clone(),
                    s_next,
                });
            }
        }
    }
    out
}

/// Dictionary of `(d-j)`-variate covering codes and the 1-based assignment
/// `theta` of every triple of `Gamma_j(n)`, in `gamma_set` order.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerCode {
    j: usize,
    dictionary: Vec<CoveringCode>,
    theta: Vec<u32>,
}

impl LayerCode {
    pub fn j(&self) -> usize {
        self.j
    }

    pub fn dictionary(&self) -> &[CoveringCode] {
        &self.dictionary
    }

    pub fn theta(&self) -> &[u32] {
        &self.theta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldCode {
    d: usize,
    alpha: f64,
    m: u32,
    n: u32,
    lambda_r: SparseFaberExpansion,
    layers: Vec<LayerCode>,
    layer_keys: Vec<Vec<MultiIndex>>,
}

impl ManifoldCode {
    /// Assembles and validates a code. `layers[j]` is `(dictionary, theta)`.
    pub fn from_parts(
        d: usize,
        alpha: f64,
        m: u32,
        n: u32,
        lambda_r: SparseFaberExpansion,
        layers: Vec<(Vec<CoveringCode>, Vec<u32>)>,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if lambda_r.dim() != d || lambda_r.budget_level() != n {
            return Err(Error::CorruptCode(format!(
                "lambda_R has d = {}, level {}; expected d = {d}, level {n}",
                lambda_r.dim(),
                lambda_r.budget_level()
            )));
        }
        if layers.len() != d {
            return Err(Error::CorruptCode(format!("expected {d} layers, got {}", layers.len())));
        }
        let mut out = Vec::with_capacity(d);
        for (j, (dictionary, theta)) in layers.into_iter().enumerate() {
            for c in &dictionary {
                if c.dim() != d - j || c.level() != m || c.alpha() != alpha {
                    return Err(Error::CorruptCode(format!(
                        "layer {j}: dictionary entry has d = {}, m = {}, alpha = {}",
                        c.dim(),
                        c.level(),
                        c.alpha()
                    )));
                }
            }
            let expected = budget::gamma_size(j, n) as usize;
            if theta.len() != expected {
                return Err(Error::CorruptCode(format!(
                    "layer {j}: {} assignments, expected {expected}",
                    theta.len()
                )));
            }
            if let Some(&bad) = theta.iter().find(|&&t| t == 0 || t as usize > dictionary.len()) {
                return Err(Error::CorruptCode(format!(
                    "layer {j}: theta = {bad} outside [1, {}]",
                    dictionary.len()
                )));
            }
            out.push(LayerCode { j, dictionary, theta });
        }
        Ok(Self {
            d,
            alpha,
            m,
            n,
            lambda_r,
            layers: out,
            layer_keys: (0..d).map(|j| levels_up_to(j, n)).collect(),
        })
    }

    /// A code whose layers all point to the zero covering, so that it
    /// decodes to the expansion `lambda_r` alone.
    pub fn from_truncation(lambda_r: SparseFaberExpansion, m: u32, alpha: f64) -> Result<Self> {
        let d = lambda_r.dim();
        let n = lambda_r.budget_level();
        let layers = (0..d)
            .map(|j| {
                let zero = crate::covering::zero_covering(d - j, m, alpha)?;
                Ok((vec![zero], vec![1; budget::gamma_size(j, n) as usize]))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(d, alpha, m, n, lambda_r, layers)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lambda_r(&self) -> &SparseFaberExpansion {
        &self.lambda_r
    }

    pub fn layers(&self) -> &[LayerCode] {
        &self.layers
    }

    /// Faber coefficient view `a^eta` of the layer-`j` dictionary.
    pub fn materialize_dictionary(&self, j: usize) -> Vec<SparseFaberExpansion> {
        self.layers[j].dictionary.iter().map(CoveringCode::to_expansion).collect()
    }

    /// Scalar parameters: `lambda^R`, the coefficient view of every
    /// dictionary entry, and every assignment.
    pub fn parameter_count(&self) -> u64 {
        let mut count = self.lambda_r.len() as u64;
        for (j, layer) in self.layers.iter().enumerate() {
            count += self.materialize_dictionary(j).iter().map(|e| e.len() as u64).sum::<u64>();
            count += layer.theta.len() as u64;
        }
        count
    }

    /// `G_{m,n}(lambda)(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d);
        let mut sum = self.lambda_r.eval(x);
        let block = 1usize << (self.n + 1);
        let mut y: Point = SmallVec::with_capacity(self.d);
        for (j, layer) in self.layers.iter().enumerate() {
            let scale = ((self.d - j) as f64 - self.alpha * (self.n + 1 + j as u32) as f64).exp2();
            let mut part = 0.0;
            'keys: for (b, k) in self.layer_keys[j].iter().enumerate() {
                let mut phi = 1.0;
                let mut flat = 0usize;
                for (&ki, &xi) in k.as_slice().iter().zip(x) {
                    let s = active_shift(ki, xi);
                    let v = faber_eval_level(ki, s, xi);
                    if v == 0.0 {
                        continue 'keys;
                    }
                    phi *= v;
                    flat = (flat << ki) | s as usize;
                }
                let kstar = self.n + 1 - k.l1();
                let s_next = active_shift(kstar, x[j]);
                y.clear();
                y.push(x[j] * pow2(kstar) - s_next as f64);
                y.extend_from_slice(&x[j + 1..]);
                let theta = layer.theta[b * block + (flat << kstar) + s_next as usize];
                part += phi * layer.dictionary[theta as usize - 1].eval(&y);
            }
            sum += scale * part;
        }
        sum
    }
}

impl Oracle for ManifoldCode {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, x: &[f64]) -> f64 {
        ManifoldCode::eval(self, x)
    }
}

pub fn decode_eval(code: &ManifoldCode, x: &[f64]) -> f64 {
    code.eval(x)
}

/// The `(d-j)`-variate piece `T_{k*, s*}(f_{k_j, s_j})` quantized for one
/// triple, with `k* = (n+1-|k_j|_1) e^1` and `s* = s_{j+1} e^1`.
struct LayerPiece<'a, O: ?Sized> {
    f: &'a O,
    j: usize,
    stencil: Vec<(f64, Point)>,
    kstar: u32,
    s_next: u64,
}

impl<'a, O: Oracle + ?Sized> LayerPiece<'a, O> {
    fn new(f: &'a O, t: &GammaTriple, n: u32, alpha: f64) -> Self {
        let j = t.k.dim();
        let k = t.k.as_slice();
        let base: Point = k.iter().zip(&t.s).map(|(&ki, &si)| si as f64 / pow2(ki)).collect();
        let step: Point = k.iter().map(|&ki| 1.0 / pow2(ki + 1)).collect();
        let kstar = n + 1 - t.k.l1();
        let d_local = (f.dim() - j) as f64;
        // 2^{alpha(j+|k_j|)} normalizes the difference, 2^{alpha k* - d'} localizes
        let scale = (alpha * (j as f64 + t.k.l1() as f64 + kstar as f64) - d_local).exp2();
        let mut stencil = Vec::with_capacity(3usize.pow(j as u32));
        second_difference_stencil(&base, &step, |w, p| stencil.push((scale * w, Point::from_slice(p))));
        Self {
            f,
            j,
            stencil,
            kstar,
            s_next: t.s_next,
        }
    }
}

impl<O: Oracle + ?Sized> Oracle for LayerPiece<'_, O> {
    fn dim(&self) -> usize {
        self.f.dim() - self.j
    }

    fn eval(&self, y: &[f64]) -> f64 {
        let j = self.j;
        let x1 = (y[0] + self.s_next as f64) / pow2(self.kstar);
        let taps = residual_taps(self.kstar, x1);
        let mut p: Point = SmallVec::from_elem(0.0, self.f.dim());
        p[j + 1..].copy_from_slice(&y[1..]);
        let mut acc = 0.0;
        for (w, q) in &self.stencil {
            p[..j].copy_from_slice(q);
            for &(tw, node) in &taps {
                p[j] = node;
                acc += w * tw * self.f.eval(&p);
            }
        }
        acc
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EncodeOptions {
    pub exec: Exec,
    /// Cache oracle values on exact points.
    pub memoize: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            exec: Exec::default(),
            memoize: true,
        }
    }
}

/// Samples the boundary of the cube and rejects functions that do not
/// vanish there.
pub fn check_vanishing<O: Oracle + ?Sized>(f: &O) -> Result<()> {
    let d = f.dim();
    const LEVEL: u32 = 3;
    let per = (1usize << LEVEL) + 1;
    let total = per.pow(d as u32 - 1);
    let irrational = [0.0, 0.618_033_988_749_894_9, 0.414_213_562_373_095_1, 0.732_050_807_568_877_2];
    for face in 0..d {
        for side in [0.0, 1.0] {
            for idx in 0..total {
                for shift in irrational {
                    let mut x: Point = SmallVec::with_capacity(d);
                    let mut r = idx;
                    for i in 0..d {
                        if i == face {
                            x.push(side);
                        } else {
                            let g = (r % per) as f64 / (per - 1) as f64;
                            r /= per;
                            x.push((g + shift).fract());
                        }
                    }
                    let v = f.eval(&x);
                    if !(v.abs() <= BOUNDARY_TOL) {
                        return Err(Error::NotVanishing {
                            point: x.to_vec(),
                            value: v,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Encodes `f` with the default options.
pub fn encode<O: Oracle + ?Sized>(f: &O, m: u32, n: u32, alpha: f64, d: usize) -> Result<ManifoldCode> {
    encode_with(f, m, n, alpha, d, EncodeOptions::default())
}

pub fn encode_with<O: Oracle + ?Sized>(
    f: &O,
    m: u32,
    n: u32,
    alpha: f64,
    d: usize,
    opts: EncodeOptions,
) -> Result<ManifoldCode> {
    check_alpha(alpha)?;
    if f.dim() != d || d == 0 {
        return Err(Error::InvalidInput(format!("oracle has dimension {}, expected {d}", f.dim())));
    }
    if m < 1 || n < 1 {
        return Err(Error::InvalidInput(format!("need m, n >= 1, got m = {m}, n = {n}")));
    }
    check_vanishing(f)?;
    if opts.memoize {
        encode_inner(&MemoOracle::new(f), m, n, alpha, d, opts.exec)
    } else {
        encode_inner(f, m, n, alpha, d, opts.exec)
    }
}

fn encode_inner<O: Oracle + ?Sized>(
    f: &O,
    m: u32,
    n: u32,
    alpha: f64,
    d: usize,
    exec: Exec,
) -> Result<ManifoldCode> {
    let lambda_r = sparse_truncate_with(f, n, d, exec);
    let triples: Vec<(usize, GammaTriple)> = (0..d)
        .flat_map(|j| gamma_set(j, n, d).into_iter().map(move |t| (j, t)))
        .collect();
    let codes = exec.map(triples.len(), |i| {
        let piece = LayerPiece::new(f, &triples[i].1, n, alpha);
        build_covering_with(&piece, m, alpha, Exec::Sequential)
    });
    let mut layers: Vec<(Vec<CoveringCode>, Vec<u32>)> = (0..d).map(|_| (Vec::new(), Vec::new())).collect();
    let mut seen: Vec<HashMap<Vec<i64>, u32>> = vec![HashMap::new(); d];
    for ((j, _), code) in triples.iter().zip(codes) {
        let code = code?;
        let (dict, theta) = &mut layers[*j];
        let next = dict.len() as u32 + 1;
        let id = *seen[*j].entry(code.canonical_key()).or_insert(next);
        if id == next {
            dict.push(code);
        }
        theta.push(id);
    }
    ManifoldCode::from_parts(d, alpha, m, n, lambda_r, layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FnOracle;
    use crate::tensor::{dim_fdm, sparse_truncate};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth(d: usize) -> FnOracle<impl Fn(&[f64]) -> f64 + Sync> {
        use std::f64::consts::PI;
        FnOracle::new(d, move |x: &[f64]| x.iter().map(|&t| (PI * t).sin() / PI).product::<f64>())
    }

    fn sup_err<A: Oracle, B: Oracle>(a: &A, b: &B, d: usize, samples: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        (0..samples)
            .map(|_| {
                let x: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
                (a.eval(&x) - b.eval(&x)).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn gamma_sets() {
        assert_eq!(gamma_set(0, 3, 2).len(), 16);
        assert_eq!(gamma_set(1, 3, 2).len(), 64);
        assert_eq!(gamma_set(1, 0, 2).len(), 2);
        for j in 0..3 {
            for n in 0..5 {
                let g = gamma_set(j, n, 3);
                assert_eq!(g.len() as u64, gamma_size(j, n));
                assert!(g.windows(2).all(|w| (&w[0].k, &w[0].s, w[0].s_next) < (&w[1].k, &w[1].s, w[1].s_next)));
            }
        }
    }

    #[test]
    fn zero_function() {
        let f = FnOracle::new(2, |_: &[f64]| 0.0);
        let c = encode(&f, 1, 3, 1.0, 2).unwrap();
        assert!(c.lambda_r().iter().all(|(_, v)| v == 0.0));
        for layer in c.layers() {
            assert_eq!(layer.dictionary().len(), 1);
            assert!(layer.theta().iter().all(|&t| t == 1));
        }
        assert_eq!(c.layers()[0].theta().len(), 16);
        assert_eq!(c.layers()[1].theta().len(), 64);
        assert_eq!(c.eval(&[0.3, 0.8]), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let f = FnOracle::new(2, |x: &[f64]| x[0] + x[1]);
        assert!(matches!(encode(&f, 1, 2, 1.0, 2), Err(Error::NotVanishing { .. })));
        let g = smooth(2);
        assert!(encode(&g, 0, 2, 1.0, 2).is_err());
        assert!(encode(&g, 1, 2, 1.0, 3).is_err());
    }

    #[test]
    fn truncation_only_code() {
        let f = smooth(2);
        let r = sparse_truncate(&f, 3, 2);
        let c = ManifoldCode::from_truncation(r.clone(), 1, 1.0).unwrap();
        assert!(sup_err(&c, &r, 2, 500) == 0.0);
    }

    #[test]
    fn corrupt_theta_rejected() {
        let f = smooth(2);
        let c = encode(&f, 1, 2, 1.0, 2).unwrap();
        let mut layers: Vec<_> = c.layers().iter().map(|l| (l.dictionary().to_vec(), l.theta().to_vec())).collect();
        layers[1].1[0] = layers[1].0.len() as u32 + 1;
        let r = ManifoldCode::from_parts(2, 1.0, 1, 2, c.lambda_r().clone(), layers.clone());
        assert!(matches!(r, Err(Error::CorruptCode(_))));
        layers[1].1[0] = 0;
        let r = ManifoldCode::from_parts(2, 1.0, 1, 2, c.lambda_r().clone(), layers);
        assert!(matches!(r, Err(Error::CorruptCode(_))));
    }

    #[test]
    fn fine_quantization_tracks_function() {
        let f = smooth(2);
        let (m, n, alpha) = (6, 2, 1.0);
        let code = encode(&f, m, n, alpha, 2).unwrap();
        assert!(sup_err(&code, &f, 2, 400) <= pipeline_error_bound(alpha, 2, m, n));
    }

    #[test]
    fn pipeline_bound_smooth() {
        for d in 2..=3 {
            for alpha in [0.5, 1.0] {
                let f = smooth(d);
                let code = encode(&f, 1, 3, alpha, d).unwrap();
                let err = sup_err(&code, &f, d, 400);
                assert!(err <= pipeline_error_bound(alpha, d, 1, 3), "d={d} alpha={alpha} err={err}");
            }
        }
    }

    #[test]
    fn piece_matches_localized_residual() {
        let f = smooth(3);
        let t = GammaTriple {
            k: MultiIndex::new(vec![1]),
            s: vec![1],
            s_next: 2,
        };
        let (n, alpha) = (3, 0.5);
        let piece = LayerPiece::new(&f, &t, n, alpha);
        // f_{k_j,s_j} as a standalone oracle
        let fk = FnOracle::new(2, |y: &[f64]| {
            let mut acc = 0.0;
            second_difference_stencil(&[0.5], &[0.25], |w, p| acc += w * f.eval(&[p[0], y[0], y[1]]));
            (alpha * 2.0).exp2() * acc
        });
        let kstar = MultiIndex::new(vec![3, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let y = [rng.gen::<f64>(), rng.gen::<f64>()];
            let expect = t_localized_eval(&fk, &kstar, &[2, 0], &y, alpha);
            assert_abs_diff_eq!(piece.eval(&y), expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn decoder_range_and_parameter_count() {
        let f = smooth(2);
        let (m, n) = (1, 2);
        let code = encode(&f, m, n, 1.0, 2).unwrap();
        let r = sparse_truncate(&code, m + n + 1, 2);
        assert!(sup_err(&code, &r, 2, 500) <= 1e-12);
        let formula = dim_fdm(n, 2)
            + code
                .layers()
                .iter()
                .enumerate()
                .map(|(j, l)| l.dictionary().len() as u64 * dim_fdm(m, 2 - j) + l.theta().len() as u64)
                .sum::<u64>();
        assert_eq!(code.parameter_count(), formula);
        assert!(num_bigint::BigUint::from(formula) <= budget(m, n, 2).n_mn_bound);
    }

    #[test]
    fn deterministic_across_exec_and_memo() {
        let f = smooth(2);
        let a = encode_with(&f, 2, 3, 0.5, 2, EncodeOptions { exec: Exec::Sequential, memoize: false }).unwrap();
        let b = encode_with(&f, 2, 3, 0.5, 2, EncodeOptions { exec: Exec::Parallel, memoize: true }).unwrap();
        assert_eq!(a, b);
    }
}
