//! Tensorized Faber basis, sparse truncation `R_m` on the Smolyak grid and
//! the hyperbolic-cross spaces `F^d(m)`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use smallvec::SmallVec;

use crate::combinatorics::{b_constant, binom, binom_f64};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::oracle::{Oracle, Point};
use crate::univariate::{active_shift, faber_eval_level, pow2};

/// Level vector `k` in `N_0^d`.
///
/// Ordered by `|k|_1` first, then lexicographically; this is the canonical
/// traversal order used for serialization and dictionary numbering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn l1(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Number of shift vectors, `|Z(k)| = 2^{|k|_1}`.
    pub fn shift_count(&self) -> usize {
        1usize << self.l1()
    }

    /// Flat position of `s` in `Z(k)` (first coordinate most significant).
    pub fn flat_shift(&self, s: &[u64]) -> usize {
        self.0
            .iter()
            .zip(s)
            .fold(0usize, |acc, (&k, &si)| (acc << k) | si as usize)
    }

    /// Inverse of [`MultiIndex::flat_shift`].
    pub fn unflatten_shift(&self, mut flat: usize) -> Vec<u64> {
        let mut s = vec![0u64; self.0.len()];
        for (i, &k) in self.0.iter().enumerate().rev() {
            s[i] = (flat & ((1usize << k) - 1)) as u64;
            flat >>= k;
        }
        s
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.l1()
            .cmp(&other.l1())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All `k` in `N_0^d` with `|k|_1 <= max_l1`, in canonical order.
pub fn levels_up_to(d: usize, max_l1: u32) -> Vec<MultiIndex> {
    (0..=max_l1).flat_map(|t| levels_with_l1(d, t)).collect()
}

/// All `k` in `N_0^d` with `|k|_1 = t`, lexicographically.
pub fn levels_with_l1(d: usize, t: u32) -> Vec<MultiIndex> {
    fn rec(d: usize, rest: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == d {
            prefix.push(rest);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in 0..=rest {
            prefix.push(v);
            rec(d, rest - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        if t == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return out;
    }
    rec(d, t, &mut Vec::with_capacity(d), &mut out);
    out
}

/// Tensor Faber index `(k, s)` with `s_i` in `Z(k_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorFaberIndex {
    levels: MultiIndex,
    shifts: Vec<u64>,
}

impl TensorFaberIndex {
    pub fn new(levels: MultiIndex, shifts: Vec<u64>) -> Result<Self> {
        let ok = levels.dim() == shifts.len()
            && levels
                .as_slice()
                .iter()
                .zip(&shifts)
                .all(|(&k, &s)| k < 63 && s < (1u64 << k));
        if !ok {
            return Err(Error::InvalidInput(format!(
                "shift {shifts:?} not in Z({:?})",
                levels.as_slice()
            )));
        }
        Ok(Self { levels, shifts })
    }

    pub fn levels(&self) -> &MultiIndex {
        &self.levels
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    pub fn dim(&self) -> usize {
        self.shifts.len()
    }
}

impl Ord for TensorFaberIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.levels
            .cmp(&other.levels)
            .then_with(|| self.shifts.cmp(&other.shifts))
    }
}

impl PartialOrd for TensorFaberIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `phi_{k,s}(x) = prod_i phi_{k_i,s_i}(x_i)`.
pub fn tensor_faber_eval(idx: &TensorFaberIndex, x: &[f64]) -> f64 {
    idx.levels
        .as_slice()
        .iter()
        .zip(&idx.shifts)
        .zip(x)
        .map(|((&k, &s), &xi)| faber_eval_level(k, s, xi))
        .product()
}

/// Visits the `3^d` points `base + j * h` (`j` in `{0,1,2}^d`) with the
/// weights `prod_i (-1/2, 1, -1/2)[j_i]` of the product second difference.
pub(crate) fn second_difference_stencil(
    base: &[f64],
    step: &[f64],
    mut visit: impl FnMut(f64, &[f64]),
) {
    const W: [f64; 3] = [-0.5, 1.0, -0.5];
    let d = base.len();
    let mut j: SmallVec<[u8; 8]> = SmallVec::from_elem(0, d);
    let mut p: Point = SmallVec::from_slice(base);
    loop {
        let w: f64 = j.iter().map(|&ji| W[ji as usize]).product();
        visit(w, &p);
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            if j[i] < 2 {
                j[i] += 1;
                p[i] = base[i] + j[i] as f64 * step[i];
                break;
            }
            j[i] = 0;
            p[i] = base[i];
            i += 1;
        }
    }
}

/// `lambda_{k,s}(f)` through the `3^d` stencil, together with the a-priori
/// bound `2^{-alpha d} 2^{-alpha |k|_1}` valid for the unit ball.
pub fn tensor_coeff<O: Oracle + ?Sized>(f: &O, idx: &TensorFaberIndex, alpha: f64) -> (f64, f64) {
    let value = coeff_at(f, idx.levels.as_slice(), &idx.shifts);
    let d = idx.dim() as f64;
    let bound = (-alpha * (d + idx.levels.l1() as f64)).exp2();
    (value, bound)
}

pub(crate) fn coeff_at<O: Oracle + ?Sized>(f: &O, k: &[u32], s: &[u64]) -> f64 {
    let base: Point = k.iter().zip(s).map(|(&ki, &si)| si as f64 / pow2(ki)).collect();
    let step: Point = k.iter().map(|&ki| 1.0 / pow2(ki + 1)).collect();
    let mut acc = 0.0;
    second_difference_stencil(&base, &step, |w, p| acc += w * f.eval(p));
    acc
}

/// Coefficients of one level vector `k`, indexed by flat shift.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelBlock {
    pub k: MultiIndex,
    pub coeffs: Vec<f64>,
}

/// Element of `F^d(m)`: coefficients for every `(k, s)` with `|k|_1 <= m`.
///
/// Storage is dense per level vector, so the stored-index count equals
/// `dim F^d(m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFaberExpansion {
    dim: usize,
    budget_level: u32,
    blocks: Vec<LevelBlock>,
    block_of: HashMap<MultiIndex, usize>,
}

impl SparseFaberExpansion {
    pub fn zeros(dim: usize, budget_level: u32) -> Self {
        let blocks: Vec<LevelBlock> = levels_up_to(dim, budget_level)
            .into_iter()
            .map(|k| {
                let n = k.shift_count();
                LevelBlock {
                    k,
                    coeffs: vec![0.0; n],
                }
            })
            .collect();
        Self::from_blocks(dim, budget_level, blocks)
    }

    fn from_blocks(dim: usize, budget_level: u32, blocks: Vec<LevelBlock>) -> Self {
        let block_of = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (b.k.clone(), i))
            .collect();
        Self {
            dim,
            budget_level,
            blocks,
            block_of,
        }
    }

    /// Builds from explicit terms; unspecified coefficients are zero.
    pub fn from_terms<I>(dim: usize, budget_level: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (TensorFaberIndex, f64)>,
    {
        let mut e = Self::zeros(dim, budget_level);
        for (idx, c) in terms {
            e.set(&idx, c)?;
        }
        Ok(e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn budget_level(&self) -> u32 {
        self.budget_level
    }

    pub fn blocks(&self) -> &[LevelBlock] {
        &self.blocks
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.coeffs.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, idx: &TensorFaberIndex) -> f64 {
        self.block_of
            .get(&idx.levels)
            .map(|&b| self.blocks[b].coeffs[idx.levels.flat_shift(&idx.shifts)])
            .unwrap_or(0.0)
    }

    pub fn set(&mut self, idx: &TensorFaberIndex, value: f64) -> Result<()> {
        if idx.dim() != self.dim {
            return Err(Error::InvalidInput(format!(
                "index of dimension {} in expansion of dimension {}",
                idx.dim(),
                self.dim
            )));
        }
        let b = *self.block_of.get(&idx.levels).ok_or_else(|| {
            Error::InvalidInput(format!(
                "|k|_1 = {} exceeds budget level {}",
                idx.levels.l1(),
                self.budget_level
            ))
        })?;
        let flat = idx.levels.flat_shift(&idx.shifts);
        self.blocks[b].coeffs[flat] = value;
        Ok(())
    }

    /// All `(index, coefficient)` pairs in canonical `(|k|_1, k, s)` order.
    pub fn iter(&self) -> impl Iterator<Item = (TensorFaberIndex, f64)> + '_ {
        self.blocks.iter().flat_map(|b| {
            b.coeffs.iter().enumerate().map(move |(flat, &c)| {
                (
                    TensorFaberIndex {
                        levels: b.k.clone(),
                        shifts: b.k.unflatten_shift(flat),
                    },
                    c,
                )
            })
        })
    }

    /// `sum alpha_{k,s} phi_{k,s}(x)`; for each `k` only the shift whose
    /// support contains `x` is visited.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let levels = self.budget_level as usize + 1;
        // per coordinate and level: (active shift, phi value)
        let mut table: SmallVec<[(u64, f64); 64]> = SmallVec::with_capacity(self.dim * levels);
        for &xi in x {
            for k in 0..levels as u32 {
                let s = active_shift(k, xi);
                table.push((s, faber_eval_level(k, s, xi)));
            }
        }
        let mut sum = 0.0;
        'blocks: for b in &self.blocks {
            let mut w = 1.0;
            let mut flat = 0usize;
            for (i, &k) in b.k.as_slice().iter().enumerate() {
                let (s, v) = table[i * levels + k as usize];
                if v == 0.0 {
                    continue 'blocks;
                }
                w *= v;
                flat = (flat << k) | s as usize;
            }
            sum += w * b.coeffs[flat];
        }
        sum
    }
}

impl Oracle for SparseFaberExpansion {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        SparseFaberExpansion::eval(self, x)
    }
}

pub fn expansion_eval(e: &SparseFaberExpansion, x: &[f64]) -> f64 {
    e.eval(x)
}

/// `R_m(f)` for `f` on `[0,1]^d`: all coefficients with `|k|_1 <= m`.
pub fn sparse_truncate<O: Oracle + ?Sized>(f: &O, m: u32, d: usize) -> SparseFaberExpansion {
    sparse_truncate_with(f, m, d, Exec::default())
}

pub fn sparse_truncate_with<O: Oracle + ?Sized>(
    f: &O,
    m: u32,
    d: usize,
    exec: Exec,
) -> SparseFaberExpansion {
    assert_eq!(f.dim(), d, "oracle dimension mismatch");
    let mut e = SparseFaberExpansion::zeros(d, m);
    let offsets: Vec<usize> = e
        .blocks
        .iter()
        .scan(0usize, |acc, b| {
            let start = *acc;
            *acc += b.coeffs.len();
            Some(start)
        })
        .collect();
    let total = e.len();
    let blocks = &e.blocks;
    let values = exec.map(total, |i| {
        let b = offsets.partition_point(|&o| o <= i) - 1;
        let k = &blocks[b].k;
        let s = k.unflatten_shift(i - offsets[b]);
        coeff_at(f, k.as_slice(), &s)
    });
    for (b, off) in e.blocks.iter_mut().zip(&offsets) {
        let n = b.coeffs.len();
        b.coeffs.copy_from_slice(&values[*off..*off + n]);
    }
    e
}

/// Smolyak grid `G^d(m)`: distinct points `2^{-k-1} s`, `|k|_1 = m`,
/// `s` in `Z_*(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmolyakGrid {
    pub dim: usize,
    pub level: u32,
    pub points: Vec<Vec<f64>>,
}

/// Points are deduplicated on exact integer numerators over `2^{m+1}` and
/// returned in lexicographic order of those numerators.
pub fn smolyak_grid(m: u32, d: usize) -> SmolyakGrid {
    let mut keys: BTreeSet<Vec<u64>> = BTreeSet::new();
    for k in levels_with_l1(d, m) {
        let ks = k.as_slice();
        let counts: Vec<u64> = ks.iter().map(|&ki| (1u64 << (ki + 1)) - 1).collect();
        let mut s = vec![1u64; d];
        loop {
            keys.insert(ks.iter().zip(&s).map(|(&ki, &si)| si << (m - ki)).collect());
            let mut i = 0;
            while i < d && s[i] == counts[i] {
                s[i] = 1;
                i += 1;
            }
            if i == d {
                break;
            }
            s[i] += 1;
        }
    }
    let denom = pow2(m + 1);
    SmolyakGrid {
        dim: d,
        level: m,
        points: keys
            .into_iter()
            .map(|key| key.into_iter().map(|v| v as f64 / denom).collect())
            .collect(),
    }
}

/// `dim F^d(m) = sum_{l=0}^m 2^l binom(l+d-1, d-1)`.
pub fn dim_fdm(m: u32, d: usize) -> u64 {
    assert!(d >= 1, "dimension must be positive");
    (0..=m as u64)
        .map(|l| (1u64 << l) * binom(l + d as u64 - 1, d as u64 - 1))
        .sum()
}

/// Sparse-truncation error bound `2^{-alpha} B^d 2^{-alpha m} binom(m+d, d-1)`
/// with `B = (2^alpha - 1)^{-1}`.
pub fn truncation_error_bound(alpha: f64, d: usize, m: u32) -> f64 {
    let b = b_constant(alpha);
    (-alpha).exp2()
        * b.powi(d as i32)
        * (-alpha * m as f64).exp2()
        * binom_f64(m as u64 + d as u64, d as u64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FnOracle;
    use crate::univariate::{faber_coeff, DyadicIndex};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bump2() -> FnOracle<impl Fn(&[f64]) -> f64 + Sync> {
        FnOracle::new(2, |x: &[f64]| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]))
    }

    fn tidx(k: &[u32], s: &[u64]) -> TensorFaberIndex {
        TensorFaberIndex::new(MultiIndex::new(k.to_vec()), s.to_vec()).unwrap()
    }

    fn random_expansion(d: usize, m: u32, seed: u64) -> SparseFaberExpansion {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut e = SparseFaberExpansion::zeros(d, m);
        for b in &mut e.blocks {
            for c in &mut b.coeffs {
                *c = rng.gen_range(-1.0..1.0);
            }
        }
        e
    }

    #[test]
    fn canonical_level_order() {
        let ls = levels_up_to(2, 2);
        let raw: Vec<Vec<u32>> = ls.iter().map(|k| k.as_slice().to_vec()).collect();
        assert_eq!(
            raw,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]
        );
        let mut sorted = ls.clone();
        sorted.sort();
        assert_eq!(sorted, ls);
        assert_eq!(levels_up_to(3, 4).len(), binom(7, 3) as usize);
    }

    #[test]
    fn shift_flattening_roundtrip() {
        let k = MultiIndex::new(vec![2, 0, 3]);
        for flat in 0..k.shift_count() {
            assert_eq!(k.flat_shift(&k.unflatten_shift(flat)), flat);
        }
        assert_eq!(k.flat_shift(&[1, 0, 0]), 8);
    }

    #[test]
    fn index_validation() {
        assert!(TensorFaberIndex::new(MultiIndex::new(vec![1, 2]), vec![1, 3]).is_ok());
        assert!(TensorFaberIndex::new(MultiIndex::new(vec![1, 2]), vec![2, 3]).is_err());
        assert!(TensorFaberIndex::new(MultiIndex::new(vec![1]), vec![0, 0]).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let (v, b) = tensor_coeff(&bump2(), &tidx(&[0, 0], &[0, 0]), 1.0);
        assert_abs_diff_eq!(v, 0.0625, epsilon = 1e-15);
        assert_eq!(b, 0.25);

        let affine = FnOracle::new(2, |x: &[f64]| (2.0 * x[0] + 1.0) * x[1].sin());
        for (k, s) in [([0, 0], [0, 0]), ([2, 1], [3, 1]), ([1, 3], [0, 5])] {
            let (v, _) = tensor_coeff(&affine, &tidx(&k, &s), 1.0);
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
        }

        let g = |t: f64| (3.0 * t).sin() * t * (1.0 - t);
        let g1 = FnOracle::new(1, |x: &[f64]| g(x[0]));
        for (k, s) in [(0u32, 0u64), (3, 5), (6, 40)] {
            let (v, _) = tensor_coeff(&g1, &tidx(&[k], &[s]), 1.0);
            let u = faber_coeff(g, DyadicIndex::new(k as i32, s as i64).unwrap());
            assert_eq!(v, u);
        }
    }

    #[test]
    fn basis_element_reproduction() {
        let f = FnOracle::new(2, |x: &[f64]| faber_eval_level(0, 0, x[0]) * faber_eval_level(0, 0, x[1]));
        let e = sparse_truncate(&f, 0, 2);
        assert_eq!(e.len(), 1);
        assert_eq!(e.get(&tidx(&[0, 0], &[0, 0])), 1.0);
    }

    #[test]
    fn truncation_examples() {
        let f = bump2();
        let e = sparse_truncate(&f, 1, 2);
        assert_abs_diff_eq!(e.eval(&[0.5, 0.5]), 0.0625, epsilon = 1e-15);

        let e2 = sparse_truncate(&f, 2, 2);
        assert!(e2.len() <= 17);
        let err = (e2.eval(&[0.25, 0.25]) - f.eval(&[0.25, 0.25])).abs();
        assert!(err <= truncation_error_bound(1.0, 2, 2));
    }

    #[test]
    fn evaluation_examples() {
        let e = SparseFaberExpansion::zeros(2, 3);
        assert_eq!(e.eval(&[0.3, 0.7]), 0.0);
        let e = SparseFaberExpansion::from_terms(2, 0, [(tidx(&[0, 0], &[0, 0]), 1.0)]).unwrap();
        assert_eq!(e.eval(&[0.5, 0.5]), 1.0);
        assert!(SparseFaberExpansion::from_terms(2, 1, [(tidx(&[1, 1], &[0, 0]), 1.0)]).is_err());
    }

    #[test]
    fn eval_matches_naive_sum() {
        let e = random_expansion(3, 4, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen()).collect();
            let naive: f64 = e.iter().map(|(i, c)| c * tensor_faber_eval(&i, &x)).sum();
            assert_abs_diff_eq!(e.eval(&x), naive, epsilon = 1e-12);
        }
    }

    #[test]
    fn supports_within_level_are_disjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in levels_up_to(2, 5) {
            for _ in 0..50 {
                let x: Vec<f64> = (0..2).map(|_| rng.gen()).collect();
                let nonzero = (0..k.shift_count())
                    .filter(|&f| {
                        let idx = TensorFaberIndex::new(k.clone(), k.unflatten_shift(f)).unwrap();
                        tensor_faber_eval(&idx, &x) != 0.0
                    })
                    .count();
                assert!(nonzero <= 1);
            }
        }
    }

    #[test]
    fn grid_examples() {
        let g = smolyak_grid(1, 2);
        assert_eq!(g.points.len(), 5);
        let g = smolyak_grid(1, 3);
        assert_eq!(g.points.len(), 7);
        let g = smolyak_grid(2, 1);
        let expected: Vec<Vec<f64>> = (1..8).map(|s| vec![s as f64 / 8.0]).collect();
        assert_eq!(g.points, expected);
    }

    #[test]
    fn grid_size_bound_and_interiority() {
        for d in 2..=3usize {
            for m in 1..=6u32 {
                let g = smolyak_grid(m, d);
                let fact: f64 = (1..d).map(|i| i as f64).product();
                let bound = (1u64 << d) as f64 / fact * pow2(m) * (m as f64).powi(d as i32 - 1);
                assert!((g.points.len() as f64) <= bound, "d={d} m={m}");
                assert!(g.points.iter().flatten().all(|&c| c > 0.0 && c < 1.0));
            }
        }
    }

    #[test]
    fn grid_size_bound_fails_for_small_m_in_four_dims() {
        let g = smolyak_grid(1, 4);
        let bound = 16.0 / 6.0 * pow2(1);
        assert_eq!(g.points.len(), 9);
        assert!(g.points.len() as f64 > bound);
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(dim_fdm(2, 2), 17);
        assert_eq!(dim_fdm(3, 2), 49);
        for m in 0..20 {
            assert_eq!(dim_fdm(m, 1), (1u64 << (m + 1)) - 1);
        }
        for (m, d) in [(3, 2), (4, 3), (2, 4)] {
            assert_eq!(SparseFaberExpansion::zeros(d, m).len() as u64, dim_fdm(m, d));
        }
    }

    #[test]
    fn error_bound_examples() {
        assert_abs_diff_eq!(truncation_error_bound(1.0, 2, 4), 0.1875, epsilon = 1e-15);
        assert_abs_diff_eq!(truncation_error_bound(1.0, 2, 2), 0.5, epsilon = 1e-15);
        let b: f64 = 1.0 / (2f64.sqrt() - 1.0);
        let expected = 2f64.powf(-0.5) * b * b * 0.25 * 6.0;
        assert_abs_diff_eq!(truncation_error_bound(0.5, 2, 4), expected, epsilon = 1e-12);
        assert!((expected - 6.182).abs() < 1e-3);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = bump2();
        let a = sparse_truncate_with(&f, 6, 2, Exec::Sequential);
        let b = sparse_truncate_with(&f, 6, 2, Exec::Parallel);
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn interpolates_on_smolyak_grid(seed in any::<u64>(), d in 1usize..=3, m in 0u32..=4) {
            let e = random_expansion(d, m + 2, seed);
            let r = sparse_truncate(&e, m, d);
            for p in smolyak_grid(m, d).points {
                prop_assert!((r.eval(&p) - e.eval(&p)).abs() <= 1e-10);
            }
        }

        #[test]
        fn projector(seed in any::<u64>(), d in 1usize..=3, m in 0u32..=4) {
            let e = random_expansion(d, m, seed);
            let r = sparse_truncate(&e, m, d);
            for (a, b) in e.iter().zip(r.iter()) {
                prop_assert_eq!(&a.0, &b.0);
                prop_assert!((a.1 - b.1).abs() <= 1e-12);
            }
        }
    }
}
