//! Residual operators `T_k = I - R_{k-1}` and the layer decomposition of
//! `f - R_n(f)`.

use smallvec::SmallVec;

use crate::oracle::{Oracle, Point};
use crate::tensor::{second_difference_stencil, MultiIndex};
use crate::univariate::{active_shift, faber_eval_level, pow2};

pub(crate) type Taps = SmallVec<[(f64, f64); 3]>;

/// Taps `(weight, node)` of the univariate `T_k` at `x`: the point itself
/// minus the nodal interpolant on the grid `2^{-k} Z`, whose end nodes
/// carry value zero.
pub(crate) fn residual_taps(k: u32, x: f64) -> Taps {
    let mut taps = Taps::new();
    taps.push((1.0, x));
    if k == 0 {
        return taps;
    }
    let cells = 1u64 << k;
    let y = x * cells as f64;
    let i = (y.floor().max(0.0) as u64).min(cells - 1);
    let t = y - i as f64;
    let h = 1.0 / cells as f64;
    if i > 0 && t < 1.0 {
        taps.push((-(1.0 - t), i as f64 * h));
    }
    if i + 1 < cells && t > 0.0 {
        taps.push((-t, (i + 1) as f64 * h));
    }
    taps
}

/// Visits the product stencil of `T_k` at `x`: at most `3^d` points.
fn residual_stencil(k: &[u32], x: &[f64], mut visit: impl FnMut(f64, &[f64])) {
    let taps: SmallVec<[Taps; 8]> = k.iter().zip(x).map(|(&ki, &xi)| residual_taps(ki, xi)).collect();
    let d = x.len();
    let mut j: SmallVec<[u8; 8]> = SmallVec::from_elem(0, d);
    let mut p: Point = x.iter().copied().collect();
    loop {
        let w: f64 = taps.iter().zip(&j).map(|(t, &ji)| t[ji as usize].0).product();
        visit(w, &p);
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            if (j[i] as usize) + 1 < taps[i].len() {
                j[i] += 1;
                p[i] = taps[i][j[i] as usize].1;
                break;
            }
            j[i] = 0;
            p[i] = taps[i][0].1;
            i += 1;
        }
    }
}

/// `T_k(f)(x)` for the tensor residual; `T_0` is the identity.
pub fn t_eval<O: Oracle + ?Sized>(f: &O, k: &MultiIndex, x: &[f64]) -> f64 {
    debug_assert_eq!(k.dim(), x.len());
    let mut acc = 0.0;
    residual_stencil(k.as_slice(), x, |w, p| acc += w * f.eval(p));
    acc
}

/// Localized, rescaled residual `2^{alpha|k|_1 - d} T_k(f)(2^{-k}(x + s))`.
/// Vanishes on the boundary of the unit cube.
pub fn t_localized_eval<O: Oracle + ?Sized>(
    f: &O,
    k: &MultiIndex,
    s: &[u64],
    x: &[f64],
    alpha: f64,
) -> f64 {
    let y: Point = k
        .as_slice()
        .iter()
        .zip(s)
        .zip(x)
        .map(|((&ki, &si), &xi)| (xi + si as f64) / pow2(ki))
        .collect();
    let scale = (alpha * k.l1() as f64 - x.len() as f64).exp2();
    scale * t_eval(f, k, &y)
}

/// Layer term `F_{k_j} = T_{(n+1-|k_j|) e^{j+1}}(q_{k_j}(f))` at `x`, where
/// `q_{k_j}` acts on the first `j = k_j.dim()` coordinates.
pub fn layer_f_eval<O: Oracle + ?Sized>(f: &O, kj: &MultiIndex, n: u32, x: &[f64]) -> f64 {
    let j = kj.dim();
    let d = x.len();
    assert!(j < d && kj.l1() <= n, "layer index out of range");
    let k = kj.as_slice();
    let mut phi = 1.0;
    let mut base: Point = SmallVec::with_capacity(j);
    let mut step: Point = SmallVec::with_capacity(j);
    for (&ki, &xi) in k.iter().zip(x) {
        let s = active_shift(ki, xi);
        phi *= faber_eval_level(ki, s, xi);
        base.push(s as f64 / pow2(ki));
        step.push(1.0 / pow2(ki + 1));
    }
    if phi == 0.0 {
        return 0.0;
    }
    let taps = residual_taps(n + 1 - kj.l1(), x[j]);
    let mut acc = 0.0;
    let mut p: Point = x.iter().copied().collect();
    second_difference_stencil(&base, &step, |w, q| {
        p[..j].copy_from_slice(q);
        for &(tw, node) in &taps {
            p[j] = node;
            acc += w * tw * f.eval(&p);
        }
    });
    phi * acc
}

/// Sum of all layer terms, `f - R_n(f)` for boundary-vanishing `f`.
pub fn layer_sum<O: Oracle + ?Sized>(f: &O, n: u32, x: &[f64]) -> f64 {
    (0..x.len())
        .flat_map(|j| crate::tensor::levels_up_to(j, n))
        .map(|kj| layer_f_eval(f, &kj, n, x))
        .sum()
}
