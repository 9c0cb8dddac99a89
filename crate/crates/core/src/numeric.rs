//! Small numerical helpers shared across modules: compensated summation,
//! the trigamma function and low-discrepancy probe points.

use ndarray::{ArrayD, IxDyn};
use rayon::prelude::*;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated dot product of `weights` with `values`.
#[inline]
pub fn dot_compensated(weights: &[f64], values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for (w, v) in weights.iter().zip(values) {
        acc.add(w * v);
    }
    acc.value()
}

/// Trigamma function ψ₁(x) = Σ_{j≥0} 1/(x+j)² for x > 0.
pub fn trigamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Asymptotic expansion with Bernoulli numbers B_2..B_12.
    let series = inv2
        * (1.0 / 6.0
            + inv2
                * (-1.0 / 30.0
                    + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0 + inv2 * (5.0 / 66.0 - inv2 * 691.0 / 2730.0)))));
    acc + inv + 0.5 * inv2 + inv * series
}

/// Σ_{j≥0} (−1)^j / (x+j)² for x > 0.
pub fn alternating_trigamma(x: f64) -> f64 {
    0.25 * (trigamma(0.5 * x) - trigamma(0.5 * (x + 1.0)))
}

/// Binomial coefficient as f64; exact for the small arguments used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc.round()
}

/// Deterministic low-discrepancy points in [0,1)^dims (additive recurrence
/// based on the generalized golden ratio).
pub fn low_discrepancy_points(count: usize, dims: usize) -> Vec<Vec<f64>> {
    // phi_d is the positive root of x^(d+1) = x + 1.
    let mut phi = 2.0_f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dims as f64 + 1.0));
    }
    let alphas: Vec<f64> = (1..=dims).map(|i| phi.powi(-(i as i32))).collect();
    (0..count)
        .map(|j| {
            alphas
                .iter()
                .map(|a| (0.5 + a * j as f64).fract())
                .collect()
        })
        .collect()
}

/// Array of `shape` filled in parallel with `f(index)` (row-major order).
pub fn par_from_index_fn<F>(shape: &[usize], f: F) -> ArrayD<f64>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    let len: usize = shape.iter().product();
    let data: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|flat| {
            let mut idx = vec![0usize; shape.len()];
            let mut rem = flat;
            for d in (0..shape.len()).rev() {
                idx[d] = rem % shape[d];
                rem /= shape[d];
            }
            f(&idx)
        })
        .collect();
    ArrayD::from_shape_vec(IxDyn(shape), data).expect("length matches shape")
}
