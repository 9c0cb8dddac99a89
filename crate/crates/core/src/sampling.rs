//! Sampling schemes, Kantorovich cell means and evaluation of the operator
//!
//! ```text
//! (S_w f)(x) = Σ_k χ(w x − t_k) · (w^n / A_k) ∫_{R_k^w} f(u) du
//! ```
//!
//! with cells `R_k^w = Π_i [t_{k_i}/w, t_{k_i+1}/w]` and `A_k = Π_i Δ_{k_i}`.
//! Means are stored on a finite index box; outside it they are either zero
//! (compactly supported signal) or repeat the nearest stored cell along each
//! axis (see [`Extension`]).

use ndarray::{ArrayD, Axis, IxDyn, Zip};

use crate::error::{invalid, Error, Result};
use crate::image::StepImage;
use crate::kernels::{ProductKernel, Support, UnivariateKernel};
use crate::numeric::{par_from_index_fn, CompensatedSum};
use crate::quadrature::gauss_legendre;

/// Default per-factor truncation tolerance.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-8;

/// Node sequence `(t_k)_{k∈Z}` of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeSequence {
    /// `t_k = k`.
    Uniform,
    /// `t_{first_index + j} = nodes[j]`, strictly increasing.
    Explicit { first_index: i64, nodes: Vec<f64> },
}

impl NodeSequence {
    pub fn explicit(first_index: i64, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(invalid("an explicit node sequence needs at least two nodes"));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(invalid("explicit nodes must be finite"));
        }
        if nodes.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(invalid("explicit nodes must be strictly increasing"));
        }
        Ok(NodeSequence::Explicit { first_index, nodes })
    }

    pub fn node(&self, k: i64) -> Option<f64> {
        match self {
            NodeSequence::Uniform => Some(k as f64),
            NodeSequence::Explicit { first_index, nodes } => {
                let j = k.checked_sub(*first_index)?;
                usize::try_from(j).ok().and_then(|j| nodes.get(j).copied())
            }
        }
    }

    /// Available node indices, `None` for the infinite uniform sequence.
    pub fn index_range(&self) -> Option<(i64, i64)> {
        match self {
            NodeSequence::Uniform => None,
            NodeSequence::Explicit { first_index, nodes } => {
                Some((*first_index, *first_index + nodes.len() as i64 - 1))
            }
        }
    }

    /// `(min, max)` of the spacings `t_{k+1} − t_k`.
    pub fn spacing_bounds(&self) -> (f64, f64) {
        match self {
            NodeSequence::Uniform => (1.0, 1.0),
            NodeSequence::Explicit { nodes, .. } => nodes
                .windows(2)
                .map(|p| p[1] - p[0])
                .fold((f64::INFINITY, 0.0), |(lo, hi), d| (lo.min(d), hi.max(d))),
        }
    }

    /// Indices `k` whose node satisfies `lo ≤ t_k ≤ hi`.
    pub fn indices_within(&self, lo: f64, hi: f64) -> Option<(i64, i64)> {
        let (a, b) = match self {
            NodeSequence::Uniform => (clamp_i64(lo.ceil()), clamp_i64(hi.floor())),
            NodeSequence::Explicit { first_index, nodes } => {
                let a = nodes.partition_point(|&t| t < lo) as i64;
                let b = nodes.partition_point(|&t| t <= hi) as i64 - 1;
                (first_index + a, first_index + b)
            }
        };
        (a <= b).then_some((a, b))
    }

    /// Cells `[t_k, t_{k+1}]` (scaled by `1/w`) meeting the open interval
    /// `(lo, hi)` with positive length.
    fn cells_meeting(&self, w: f64, lo: f64, hi: f64) -> Result<(i64, i64)> {
        match self {
            NodeSequence::Uniform => {
                let first = clamp_i64((lo * w).floor());
                let last = clamp_i64((hi * w).ceil()) - 1;
                Ok((first, last.max(first)))
            }
            NodeSequence::Explicit { first_index, nodes } => {
                let t_first = nodes[0] / w;
                let t_last = nodes[nodes.len() - 1] / w;
                if t_first > lo || t_last < hi {
                    return Err(invalid(format!(
                        "explicit nodes cover [{t_first}, {t_last}] after scaling by 1/w, \
                         which does not contain the signal support [{lo}, {hi}]"
                    )));
                }
                // last j with t_j ≤ lo·w, first j with t_j ≥ hi·w
                let a = nodes.partition_point(|&t| t <= lo * w).saturating_sub(1);
                let b = nodes.partition_point(|&t| t < hi * w).min(nodes.len() - 1);
                Ok((first_index + a as i64, first_index + b as i64 - 1))
            }
        }
    }
}

fn clamp_i64(x: f64) -> i64 {
    x.clamp(-(1i64 << 60) as f64, (1i64 << 60) as f64) as i64
}

/// Tensor-product sampling scheme `Π^n` with spacing bounds `δ ≤ Δ_k ≤ Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingScheme {
    nodes: Vec<NodeSequence>,
    delta_lo: f64,
    delta_hi: f64,
}

impl SamplingScheme {
    pub fn uniform(dims: usize) -> Self {
        assert!(dims >= 1, "sampling schemes need at least one dimension");
        Self { nodes: vec![NodeSequence::Uniform; dims], delta_lo: 1.0, delta_hi: 1.0 }
    }

    pub fn new(nodes: Vec<NodeSequence>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(invalid("sampling schemes need at least one dimension"));
        }
        let (delta_lo, delta_hi) = nodes
            .iter()
            .map(NodeSequence::spacing_bounds)
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
        Ok(Self { nodes, delta_lo, delta_hi })
    }

    pub fn dims(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self, dim: usize) -> &NodeSequence {
        &self.nodes[dim]
    }

    /// δ
    pub fn delta_lo(&self) -> f64 {
        self.delta_lo
    }

    /// Δ
    pub fn delta_hi(&self) -> f64 {
        self.delta_hi
    }

    pub fn is_uniform(&self) -> bool {
        self.nodes.iter().all(|s| matches!(s, NodeSequence::Uniform))
    }
}

/// Axis-aligned cell `R_k^w` as per-dimension `[lo, hi]` bounds.
pub fn cell_bounds(scheme: &SamplingScheme, w: f64, k: &[i64]) -> Result<Vec<(f64, f64)>> {
    check_w(w)?;
    if k.len() != scheme.dims() {
        return Err(Error::DimensionMismatch { expected: scheme.dims(), got: k.len() });
    }
    k.iter()
        .enumerate()
        .map(|(dim, &ki)| {
            let seq = scheme.nodes(dim);
            match (seq.node(ki), ki.checked_add(1).and_then(|k1| seq.node(k1))) {
                (Some(a), Some(b)) => Ok((a / w, b / w)),
                _ => {
                    let (first, last) = seq.index_range().unwrap_or((i64::MIN, i64::MAX));
                    Err(Error::IndexOutOfRange { dim, index: ki, first, last: last - 1 })
                }
            }
        })
        .collect()
}

fn check_w(w: f64) -> Result<()> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(invalid(format!("sampling rate w must be finite and positive, got {w}")));
    }
    Ok(())
}

/// How the signal continues outside the stored index box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    /// Means outside the box are zero: the signal has compact support.
    #[default]
    Zero,
    /// Means outside the box repeat the nearest stored cell along each axis.
    /// Only available for uniform schemes, where the infinite remainder is
    /// folded into the boundary weights through lattice tail sums.
    Clamp,
}

/// Kantorovich means `(w^n/A_k) ∫_{R_k^w} f` on a box of cell indices.
#[derive(Debug, Clone)]
pub struct CellMeans {
    w: f64,
    first: Vec<i64>,
    values: ArrayD<f64>,
    spacings: Vec<Vec<f64>>,
    scheme: SamplingScheme,
    extension: Extension,
}

impl CellMeans {
    fn new(
        scheme: &SamplingScheme,
        w: f64,
        ranges: &[(i64, i64)],
        values: ArrayD<f64>,
        extension: Extension,
    ) -> Self {
        let spacings = ranges
            .iter()
            .enumerate()
            .map(|(dim, &(a, b))| {
                let seq = scheme.nodes(dim);
                (a..=b)
                    .map(|k| seq.node(k + 1).unwrap_or(f64::NAN) - seq.node(k).unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        Self {
            w,
            first: ranges.iter().map(|r| r.0).collect(),
            values,
            spacings,
            scheme: scheme.clone(),
            extension,
        }
    }

    /// Means of `f` over the cells meeting `support`; `f` is taken to vanish
    /// outside `support`. Each cell integral uses a tensor Gauss–Legendre rule
    /// of the given order on the part of the cell inside `support`.
    pub fn from_fn<F>(scheme: &SamplingScheme, w: f64, support: &[(f64, f64)], order: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        check_w(w)?;
        let n = scheme.dims();
        if support.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: support.len() });
        }
        if support.iter().any(|&(a, b)| !(a < b)) {
            return Err(invalid("support box needs lo < hi in every dimension"));
        }
        if order == 0 {
            return Err(invalid("quadrature order must be positive"));
        }
        let ranges = (0..n)
            .map(|d| scheme.nodes(d).cells_meeting(w, support[d].0, support[d].1))
            .collect::<Result<Vec<_>>>()?;
        let shape: Vec<usize> = ranges.iter().map(|&(a, b)| (b - a + 1) as usize).collect();
        let (gx, gw) = gauss_legendre(order);
        let values = par_from_index_fn(&shape, |idx| {
            let mut lo = vec![0.0; n];
            let mut hi = vec![0.0; n];
            let mut full_volume = 1.0;
            for d in 0..n {
                let k = ranges[d].0 + idx[d] as i64;
                let seq = scheme.nodes(d);
                let (a, b) = (seq.node(k).unwrap() / w, seq.node(k + 1).unwrap() / w);
                full_volume *= b - a;
                lo[d] = a.max(support[d].0);
                hi[d] = b.min(support[d].1);
                if hi[d] <= lo[d] {
                    return 0.0;
                }
            }
            let mut point = vec![0.0; n];
            let mut acc = CompensatedSum::new();
            let total = order.pow(n as u32);
            for flat in 0..total {
                let mut rem = flat;
                let mut weight = 1.0;
                for d in 0..n {
                    let j = rem % order;
                    rem /= order;
                    let half = 0.5 * (hi[d] - lo[d]);
                    point[d] = lo[d] + half * (1.0 + gx[j]);
                    weight *= gw[j] * half;
                }
                acc.add(weight * f(&point));
            }
            acc.value() / full_volume
        });
        Ok(Self::new(scheme, w, &ranges, values, Extension::Zero))
    }

    pub fn dims(&self) -> usize {
        self.first.len()
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn scheme(&self) -> &SamplingScheme {
        &self.scheme
    }

    /// Inclusive index range of stored cells per dimension.
    pub fn index_box(&self) -> Vec<(i64, i64)> {
        self.first
            .iter()
            .zip(self.values.shape())
            .map(|(&a, &len)| (a, a + len as i64 - 1))
            .collect()
    }

    pub fn values(&self) -> &ArrayD<f64> {
        &self.values
    }

    /// Mean of cell `k`, following the extension rule outside the box.
    pub fn mean(&self, k: &[i64]) -> f64 {
        let mut idx = Vec::with_capacity(k.len());
        for (d, &kd) in k.iter().enumerate() {
            let len = self.values.shape()[d] as i64;
            let mut j = kd - self.first[d];
            if j < 0 || j >= len {
                match self.extension {
                    Extension::Zero => return 0.0,
                    Extension::Clamp => j = j.clamp(0, len - 1),
                }
            }
            idx.push(j as usize);
        }
        self.values[IxDyn(&idx)]
    }

    /// `A_k = Π_i Δ_{k_i}` for a stored cell.
    pub fn cell_area(&self, k: &[i64]) -> Option<f64> {
        let mut area = 1.0;
        for (d, &kd) in k.iter().enumerate() {
            let j = usize::try_from(kd - self.first[d]).ok()?;
            area *= *self.spacings[d].get(j)?;
        }
        Some(area)
    }

    /// Applies `f` to every stored mean.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.values.mapv_inplace(f);
        out
    }

    fn check_compatible(&self, kernel: &ProductKernel, scheme: &SamplingScheme) -> Result<()> {
        if kernel.dims() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), got: kernel.dims() });
        }
        if *scheme != self.scheme {
            return Err(Error::SchemeMismatch);
        }
        Ok(())
    }
}

/// Exact Kantorovich means of a step image (no quadrature); the image is
/// zero outside its support.
///
/// Axis 0 is the row coordinate `y`, axis 1 the column coordinate `x`; pixel
/// `(i, j)` (1-based) covers `(i−1, i] × (j−1, j]`.
pub fn step_cell_means(image: &StepImage, scheme: &SamplingScheme, w: f64) -> Result<CellMeans> {
    step_cell_means_with(image, scheme, w, Extension::Zero)
}

/// As [`step_cell_means`], with a choice of how the image continues outside
/// its frame. With [`Extension::Clamp`] the edge pixels are replicated to
/// infinity: one extra cell lying fully outside the frame is stored on each
/// side so that clamped indices reproduce the replicated signal.
pub fn step_cell_means_with(
    image: &StepImage,
    scheme: &SamplingScheme,
    w: f64,
    extension: Extension,
) -> Result<CellMeans> {
    check_w(w)?;
    if scheme.dims() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: scheme.dims() });
    }
    if extension == Extension::Clamp && !scheme.is_uniform() {
        return Err(invalid("edge replication requires a uniform sampling scheme"));
    }
    let extents = [image.height(), image.width()];
    let mut ranges = Vec::with_capacity(2);
    let mut overlaps = Vec::with_capacity(2);
    for d in 0..2 {
        let seq = scheme.nodes(d);
        let (mut a, mut b) = seq.cells_meeting(w, 0.0, extents[d] as f64)?;
        if extension == Extension::Clamp {
            a -= 1;
            b += 1;
        }
        let ov = (a..=b)
            .map(|k| {
                let lo = seq.node(k).unwrap() / w;
                let hi = seq.node(k + 1).unwrap() / w;
                pixel_overlaps(lo, hi, extents[d], extension)
            })
            .collect::<Vec<_>>();
        ranges.push((a, b));
        overlaps.push(ov);
    }
    let pixels = image.pixels();
    let (rows, cols) = (overlaps[0].len(), overlaps[1].len());
    // contract columns first: partial[i][kx] = Σ_j ox[kx][j] a[i][j]
    let mut partial = ndarray::Array2::<f64>::zeros((image.height(), cols));
    Zip::from(partial.rows_mut()).and(pixels.rows()).par_for_each(|mut out, row| {
        for (kx, ov) in overlaps[1].iter().enumerate() {
            let mut acc = CompensatedSum::new();
            for &(j, frac) in ov {
                acc.add(frac * row[j]);
            }
            out[kx] = acc.value();
        }
    });
    let mut values = ndarray::Array2::<f64>::zeros((rows, cols));
    Zip::indexed(values.rows_mut()).par_for_each(|ky, mut out| {
        for kx in 0..cols {
            let mut acc = CompensatedSum::new();
            for &(i, frac) in &overlaps[0][ky] {
                acc.add(frac * partial[[i, kx]]);
            }
            out[kx] = acc.value();
        }
    });
    Ok(CellMeans::new(scheme, w, &ranges, values.into_dyn(), extension))
}

/// Fractions of the cell `[lo, hi]` covered by each pixel `(p, p+1]`,
/// `p = 0..count`. With `Clamp` the first and last pixels extend to ±∞.
fn pixel_overlaps(lo: f64, hi: f64, count: usize, extension: Extension) -> Vec<(usize, f64)> {
    let width = hi - lo;
    let last = count as i64 - 1;
    let p0 = (lo.floor() as i64).clamp(0, last);
    let p1 = ((hi.ceil() as i64) - 1).clamp(0, last);
    let mut out = Vec::new();
    for p in p0..=p1 {
        let mut a = p as f64;
        let mut b = (p + 1) as f64;
        if extension == Extension::Clamp {
            if p == 0 {
                a = f64::NEG_INFINITY;
            }
            if p == last {
                b = f64::INFINITY;
            }
        }
        let overlap = hi.min(b) - lo.max(a);
        if overlap > 0.0 {
            out.push((p as usize, overlap / width));
        }
    }
    out
}

/// Kernel weights of one axis restricted to the stored cells.
#[derive(Debug, Clone)]
struct AxisWeights {
    /// Offset into the stored axis of the first weight.
    offset: usize,
    weights: Vec<f64>,
}

fn axis_weights(
    factor: &UnivariateKernel,
    seq: &NodeSequence,
    means: &CellMeans,
    dim: usize,
    x: f64,
    eps: f64,
) -> AxisWeights {
    let v = means.w * x;
    let first = means.first[dim];
    let len = means.values.shape()[dim] as i64;
    let last = first + len - 1;
    let (mut lo, mut hi) = match seq {
        NodeSequence::Uniform => factor.index_window(v, eps),
        NodeSequence::Explicit { .. } => {
            let (klo, khi) = match factor.support() {
                Support::Compact { lo, hi } => (lo, hi),
                Support::PolynomialDecay { .. } => {
                    let r = factor.truncation_radius(eps);
                    (-r, r)
                }
            };
            seq.indices_within(v - khi, v - klo).unwrap_or((1, 0))
        }
    };
    let (mut left_mass, mut right_mass) = (0.0, 0.0);
    if means.extension == Extension::Clamp {
        left_mass = factor.left_tail(v, first - 1, eps);
        right_mass = factor.right_tail(v, last + 1, eps);
        if left_mass != 0.0 {
            lo = lo.min(first);
            hi = hi.max(first);
        }
        if right_mass != 0.0 {
            lo = lo.min(last);
            hi = hi.max(last);
        }
    }
    lo = lo.max(first);
    hi = hi.min(last);
    if lo > hi {
        return AxisWeights { offset: 0, weights: Vec::new() };
    }
    let mut weights: Vec<f64> = (lo..=hi)
        .map(|k| {
            let t = seq.node(k).unwrap_or(f64::NAN);
            factor.evaluate(v - t)
        })
        .collect();
    if left_mass != 0.0 {
        weights[0] += left_mass;
    }
    if right_mass != 0.0 {
        let n = weights.len();
        weights[n - 1] += right_mass;
    }
    AxisWeights { offset: (lo - first) as usize, weights }
}

/// Pointwise evaluation of `S_w f` at `x`, summing the truncated series over
/// the tensor window of stored cells.
pub fn evaluate_operator(
    means: &CellMeans,
    kernel: &ProductKernel,
    scheme: &SamplingScheme,
    x: &[f64],
) -> Result<f64> {
    evaluate_operator_with_tol(means, kernel, scheme, x, DEFAULT_TRUNCATION_TOL)
}

pub fn evaluate_operator_with_tol(
    means: &CellMeans,
    kernel: &ProductKernel,
    scheme: &SamplingScheme,
    x: &[f64],
    eps: f64,
) -> Result<f64> {
    means.check_compatible(kernel, scheme)?;
    if x.len() != means.dims() {
        return Err(Error::DimensionMismatch { expected: means.dims(), got: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(invalid("evaluation point must be finite"));
    }
    let n = means.dims();
    let axes: Vec<AxisWeights> = (0..n)
        .map(|d| axis_weights(kernel.factor(d), scheme.nodes(d), means, d, x[d], eps))
        .collect();
    if axes.iter().any(|a| a.weights.is_empty()) {
        return Ok(0.0);
    }
    let sizes: Vec<usize> = axes.iter().map(|a| a.weights.len()).collect();
    let total: usize = sizes.iter().product();
    let mut idx = vec![0usize; n];
    let mut acc = CompensatedSum::new();
    for flat in 0..total {
        let mut rem = flat;
        let mut weight = 1.0;
        for d in (0..n).rev() {
            let j = rem % sizes[d];
            rem /= sizes[d];
            idx[d] = axes[d].offset + j;
            weight *= axes[d].weights[j];
        }
        acc.add(weight * means.values[IxDyn(&idx)]);
    }
    Ok(acc.value())
}

/// `S_w f` on the tensor grid `grid[0] × … × grid[n−1]`, computed by one
/// weighted pass per axis. Requires uniform nodes in every dimension.
pub fn evaluate_operator_separable(
    means: &CellMeans,
    kernel: &ProductKernel,
    scheme: &SamplingScheme,
    grid: &[Vec<f64>],
) -> Result<ArrayD<f64>> {
    evaluate_operator_separable_with_tol(means, kernel, scheme, grid, DEFAULT_TRUNCATION_TOL)
}

pub fn evaluate_operator_separable_with_tol(
    means: &CellMeans,
    kernel: &ProductKernel,
    scheme: &SamplingScheme,
    grid: &[Vec<f64>],
    eps: f64,
) -> Result<ArrayD<f64>> {
    means.check_compatible(kernel, scheme)?;
    if !scheme.is_uniform() {
        return Err(invalid("the separable evaluator requires uniform nodes in every dimension"));
    }
    if grid.len() != means.dims() {
        return Err(Error::DimensionMismatch { expected: means.dims(), got: grid.len() });
    }
    if grid.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("grid coordinates must be finite"));
    }
    let mut current = means.values.clone();
    for d in (0..means.dims()).rev() {
        let weights: Vec<AxisWeights> = grid[d]
            .iter()
            .map(|&x| axis_weights(kernel.factor(d), scheme.nodes(d), means, d, x, eps))
            .collect();
        current = contract_axis(&current, d, &weights);
    }
    Ok(current)
}

fn contract_axis(input: &ArrayD<f64>, axis: usize, weights: &[AxisWeights]) -> ArrayD<f64> {
    let mut shape = input.shape().to_vec();
    shape[axis] = weights.len();
    let mut out = ArrayD::<f64>::zeros(IxDyn(&shape));
    Zip::from(out.lanes_mut(Axis(axis)))
        .and(input.lanes(Axis(axis)))
        .par_for_each(|mut o, lane| {
            for (slot, aw) in o.iter_mut().zip(weights) {
                let mut acc = CompensatedSum::new();
                for (m, &wt) in aw.weights.iter().enumerate() {
                    acc.add(wt * lane[aw.offset + m]);
                }
                *slot = acc.value();
            }
        });
    out
}

#[cfg(test)]
mod tests;
