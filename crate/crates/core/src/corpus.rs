//! Test functions in the boundary-vanishing Hölder unit ball and an
//! empirical mixed-seminorm estimator.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::oracle::{Oracle, Point};
use crate::tensor::{levels_with_l1, MultiIndex, SparseFaberExpansion, TensorFaberIndex};
use crate::univariate::check_alpha;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Scaled products of univariate bumps, with an analytic norm.
    TensorSmooth,
    /// Random Faber expansion up to `|k|_1 <= level`.
    FaberRandom,
    /// One level `|k|_1 = level` with every coefficient at its bound.
    Fooling,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::TensorSmooth => "tensor-smooth",
            Family::FaberRandom => "faber-random",
            Family::Fooling => "fooling",
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tensor-smooth" => Ok(Family::TensorSmooth),
            "faber-random" => Ok(Family::FaberRandom),
            "fooling" => Ok(Family::Fooling),
            other => Err(Error::InvalidInput(format!("unknown family `{other}`"))),
        }
    }
}

/// Record `family=..;d=..;alpha=..;seed=..;level=..`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub family: Family,
    pub d: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Faber level for the expansion families, largest tent level for
    /// `tensor-smooth`.
    pub level: u32,
}

impl FunctionSpec {
    pub fn new(family: Family, d: usize, alpha: f64, seed: u64, level: u32) -> Self {
        Self {
            family,
            d,
            alpha,
            seed,
            level,
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "family={};d={};alpha={:?};seed={};level={}",
            self.family.name(),
            self.d,
            self.alpha,
            self.seed,
            self.level
        )
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut family = None;
        let mut d = None;
        let mut alpha = None;
        let mut seed = 0u64;
        let mut level = 3u32;
        let bad = |k: &str, v: &str| Error::InvalidInput(format!("bad value `{v}` for `{k}`"));
        for field in s.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected key=value, got `{field}`")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "family" => family = Some(v.parse()?),
                "d" => d = Some(v.parse().map_err(|_| bad(k, v))?),
                "alpha" => alpha = Some(v.parse().map_err(|_| bad(k, v))?),
                "seed" => seed = v.parse().map_err(|_| bad(k, v))?,
                "level" => level = v.parse().map_err(|_| bad(k, v))?,
                _ => return Err(Error::InvalidInput(format!("unknown key `{k}`"))),
            }
        }
        Ok(Self {
            family: family.ok_or_else(|| Error::InvalidInput("missing `family`".into()))?,
            d: d.ok_or_else(|| Error::InvalidInput("missing `d`".into()))?,
            alpha: alpha.ok_or_else(|| Error::InvalidInput("missing `alpha`".into()))?,
            seed,
            level,
        })
    }
}

/// Univariate factor of a tensor-smooth function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    /// `x (1 - x)`
    Parabola,
    /// `sin(pi x) / pi`
    Sine,
    /// `2^{-alpha l} min(y, 1 - y)^alpha` with `y = 2^l x - s` on its cell,
    /// zero elsewhere.
    Tent { level: u32, shift: u64 },
}

impl Factor {
    pub fn eval(self, x: f64, alpha: f64) -> f64 {
        match self {
            Factor::Parabola => x * (1.0 - x),
            Factor::Sine => (PI * x).sin() / PI,
            Factor::Tent { level, shift } => {
                let y = x * (level as f64).exp2() - shift as f64;
                if (0.0..=1.0).contains(&y) {
                    (-alpha * level as f64).exp2() * y.min(1.0 - y).powf(alpha)
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper bound on `max(|g|_{H^alpha}, ||g||_inf)`, exact up to a
    /// relative `1e-12` for the sine.
    pub fn norm(self, alpha: f64) -> f64 {
        match self {
            Factor::Parabola => {
                // sup_h h^{1-alpha}(1-h), maximized at h = (1-alpha)/(2-alpha)
                let h = (1.0 - alpha) / (2.0 - alpha);
                (h.powf(1.0 - alpha) * (1.0 - h)).max(0.25)
            }
            Factor::Sine => sine_seminorm(alpha).max(1.0 / PI),
            Factor::Tent { .. } => 1.0,
        }
    }
}

/// `sup_h sin(pi h) / (pi h^alpha)`, slightly inflated.
fn sine_seminorm(alpha: f64) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    // stationary point: tan(pi h) / (pi h) = 1 / alpha on (0, 1/2)
    let (mut lo, mut hi) = (1e-12, 0.5 - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (PI * mid).tan() / (PI * mid) < 1.0 / alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * (lo + hi);
    (PI * h).sin() / (PI * h.powf(alpha)) * (1.0 + 1e-12)
}

/// Rigorous norm bound of a Faber expansion:
/// `max_u sum_k max_s |lambda_{k,s}| prod_{i in u} 2^{1 + alpha k_i}`.
pub fn expansion_norm_certificate(e: &SparseFaberExpansion, alpha: f64) -> f64 {
    let d = e.dim();
    let peaks: Vec<(&MultiIndex, f64)> = e
        .blocks()
        .iter()
        .map(|b| (&b.k, b.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()))))
        .collect();
    (0..1usize << d)
        .map(|u| {
            peaks
                .iter()
                .map(|(k, c)| {
                    let w: f64 = k
                        .as_slice()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| u >> i & 1 == 1)
                        .map(|(_, &ki)| (1.0 + alpha * ki as f64).exp2())
                        .product();
                    c * w
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
enum Body {
    Tensor { amp: f64, factors: Vec<Factor> },
    Expansion(SparseFaberExpansion),
}

/// A corpus member with its certified norm bound.
#[derive(Debug, Clone)]
pub struct CorpusFunction {
    spec: FunctionSpec,
    body: Body,
    certified_norm: f64,
}

impl CorpusFunction {
    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    /// Proven upper bound on the mixed Hölder norm.
    pub fn certified_norm(&self) -> f64 {
        self.certified_norm
    }

    /// The Faber expansion behind the expansion families.
    pub fn expansion(&self) -> Option<&SparseFaberExpansion> {
        match &self.body {
            Body::Expansion(e) => Some(e),
            Body::Tensor { .. } => None,
        }
    }
}

impl Oracle for CorpusFunction {
    fn dim(&self) -> usize {
        self.spec.d
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match &self.body {
            Body::Tensor { amp, factors } => {
                amp * factors.iter().zip(x).map(|(g, &xi)| g.eval(xi, self.spec.alpha)).product::<f64>()
            }
            Body::Expansion(e) => e.eval(x),
        }
    }
}

fn scale_expansion(e: &mut SparseFaberExpansion, alpha: f64) -> Result<f64> {
    let cert = expansion_norm_certificate(e, alpha);
    if !cert.is_finite() {
        return Err(Error::Certification(format!("norm certificate {cert}")));
    }
    if cert <= 1.0 {
        return Ok(cert);
    }
    let terms: Vec<(TensorFaberIndex, f64)> = e.iter().map(|(i, c)| (i, c / cert)).collect();
    *e = SparseFaberExpansion::from_terms(e.dim(), e.budget_level(), terms)?;
    let after = expansion_norm_certificate(e, alpha);
    if after > 1.0 + 1e-12 {
        return Err(Error::Certification(format!("rescaled certificate {after} exceeds 1")));
    }
    Ok(after)
}

/// Builds the oracle described by `spec`.
///
/// `tensor-smooth` with seed 0 is the plain product of parabolas; other
/// seeds draw each factor and an amplitude in `[1/2, 1]`.
pub fn make_function(spec: &FunctionSpec) -> Result<CorpusFunction> {
    check_alpha(spec.alpha)?;
    if spec.d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let (d, alpha, level) = (spec.d, spec.alpha, spec.level);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (body, certified_norm) = match spec.family {
        Family::TensorSmooth => {
            let (amp, raw) = if spec.seed == 0 {
                (1.0, vec![Factor::Parabola; d])
            } else {
                let amp = rng.gen_range(0.5..=1.0);
                let raw = (0..d)
                    .map(|_| match rng.gen_range(0..3) {
                        0 => Factor::Parabola,
                        1 => Factor::Sine,
                        _ => {
                            let l = rng.gen_range(0..=level);
                            Factor::Tent {
                                level: l,
                                shift: rng.gen_range(0..1u64 << l),
                            }
                        }
                    })
                    .collect::<Vec<_>>();
                (amp, raw)
            };
            let norm: f64 = raw.iter().map(|g| g.norm(alpha)).product();
            (
                Body::Tensor {
                    amp: amp / norm,
                    factors: raw,
                },
                amp,
            )
        }
        Family::FaberRandom => {
            let zero = SparseFaberExpansion::zeros(d, level);
            let terms: Vec<_> = zero
                .iter()
                .map(|(idx, _)| {
                    let b = (-alpha * (d as f64 + idx.levels().l1() as f64)).exp2();
                    let c = rng.gen_range(-1.0..=1.0) * b;
                    (idx, c)
                })
                .collect();
            let mut e = SparseFaberExpansion::from_terms(d, level, terms)?;
            let cert = scale_expansion(&mut e, alpha)?;
            (Body::Expansion(e), cert)
        }
        Family::Fooling => {
            let ks = levels_with_l1(d, level);
            let k = ks[rng.gen_range(0..ks.len())].clone();
            let b = (-alpha * (d as f64 + level as f64)).exp2();
            let terms: Vec<_> = (0..k.shift_count())
                .map(|flat| {
                    let s = k.unflatten_shift(flat);
                    let sign = if s.iter().sum::<u64>() % 2 == 0 { 1.0 } else { -1.0 };
                    (TensorFaberIndex::new(k.clone(), s).expect("valid shift"), sign * b)
                })
                .collect();
            let mut e = SparseFaberExpansion::from_terms(d, level, terms)?;
            let cert = scale_expansion(&mut e, alpha)?;
            (Body::Expansion(e), cert)
        }
    };
    Ok(CorpusFunction {
        spec: spec.clone(),
        body,
        certified_norm,
    })
}

/// `count` specs cycling through the three families, with levels
/// `1..=max_level` and seeds `seed, seed + 1, ...`.
pub fn standard_corpus(d: usize, alpha: f64, count: usize, max_level: u32, seed: u64) -> Vec<FunctionSpec> {
    const FAMILIES: [Family; 3] = [Family::TensorSmooth, Family::FaberRandom, Family::Fooling];
    (0..count)
        .map(|i| {
            let level = 1 + (i / 3) as u32 % max_level.max(1);
            FunctionSpec::new(FAMILIES[i % 3], d, alpha, seed + i as u64, level)
        })
        .collect()
}

/// Smallest admissible `prod_i h_i^alpha`; below it, floating-point
/// cancellation in the mixed difference could exceed `1e-10`.
const MIN_SCALE: f64 = 1.0 / 65536.0;

const CHUNK: usize = 256;

/// Draws per-coordinate `(x_i, h_i)` for one trial.
fn sample_trial(rng: &mut ChaCha8Rng, d: usize, u: usize, alpha: f64, mode: usize) -> (Point, Point) {
    let mut x: Point = SmallVec::with_capacity(d);
    let mut h: Point = SmallVec::with_capacity(d);
    let active = (0..d).filter(|i| u >> i & 1 == 1).count().max(1) as f64;
    // per-coordinate cap on alpha * log2(1/h_i)
    let budget = -MIN_SCALE.log2() / active;
    for i in 0..d {
        if u >> i & 1 == 0 {
            if rng.gen_bool(0.5) {
                x.push(rng.gen());
            } else {
                let l = rng.gen_range(1..=8u32);
                x.push(rng.gen_range(1..1u64 << l) as f64 / (l as f64).exp2());
            }
            h.push(0.0);
            continue;
        }
        let hi = match mode {
            0 => rng.gen_range(0.0..1.0f64).max((-budget / alpha).exp2()),
            1 => {
                let lmax = (budget / alpha).floor() as u32;
                (-(rng.gen_range(0..=lmax) as f64)).exp2()
            }
            _ => (-rng.gen_range(0.0..budget / alpha)).exp2(),
        };
        let xi = match mode {
            1 => {
                let cells = (1.0 / hi).round() as u64;
                let t = if rng.gen_bool(0.5) {
                    if rng.gen_bool(0.5) {
                        0
                    } else {
                        cells - 1
                    }
                } else {
                    rng.gen_range(0..cells)
                };
                t as f64 * hi
            }
            _ => {
                if rng.gen_bool(0.25) {
                    if rng.gen_bool(0.5) {
                        0.0
                    } else {
                        1.0 - hi
                    }
                } else {
                    rng.gen_range(0.0..=1.0 - hi)
                }
            }
        };
        x.push(xi);
        h.push(hi);
    }
    (x, h)
}

/// `prod_{i in u} h_i^{-alpha} |Delta_{h,u} f(x)|`.
fn difference_quotient<O: Oracle + ?Sized>(f: &O, u: usize, alpha: f64, x: &[f64], h: &[f64]) -> f64 {
    let d = x.len();
    let members: SmallVec<[usize; 8]> = (0..d).filter(|i| u >> i & 1 == 1).collect();
    let mut acc = 0.0;
    let mut p: Point = SmallVec::from_slice(x);
    for v in 0..1usize << members.len() {
        for (b, &i) in members.iter().enumerate() {
            p[i] = if v >> b & 1 == 1 { x[i] + h[i] } else { x[i] };
        }
        let sign = if (members.len() - v.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += sign * f.eval(&p);
    }
    let scale: f64 = members.iter().map(|&i| h[i].powf(alpha)).product();
    acc.abs() / scale
}

/// Lower estimate of `|f|_{H^alpha(u)}` from `trials` sampled `(x, h)`:
/// uniform, dyadic and log-uniform small steps. `u` is a bit mask over the
/// coordinates; `u = 0` estimates the sup norm.
pub fn seminorm_estimate<O: Oracle + ?Sized>(f: &O, alpha: f64, u: usize, trials: usize, seed: u64) -> f64 {
    seminorm_estimate_with(f, alpha, u, trials, seed, Exec::default())
}

pub fn seminorm_estimate_with<O: Oracle + ?Sized>(
    f: &O,
    alpha: f64,
    u: usize,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> f64 {
    let d = f.dim();
    assert!(u < 1 << d, "subset mask out of range");
    let chunks = trials.div_ceil(CHUNK);
    exec.max(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u as u64);
        rng.set_stream(c as u64);
        let n = CHUNK.min(trials - c * CHUNK);
        (0..n)
            .map(|t| {
                let (x, h) = sample_trial(&mut rng, d, u, alpha, (c * CHUNK + t) % 3);
                difference_quotient(f, u, alpha, &x, &h)
            })
            .fold(0.0, crate::exec::nan_max)
    })
}

/// Max of [`seminorm_estimate`] over all `2^d` coordinate subsets.
pub fn norm_estimate<O: Oracle + ?Sized>(f: &O, alpha: f64, trials: usize, seed: u64) -> f64 {
    (0..1usize << f.dim())
        .map(|u| seminorm_estimate(f, alpha, u, trials, seed))
        .fold(0.0, crate::exec::nan_max)
}
