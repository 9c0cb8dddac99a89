use crate::error::{invalid, Error, Result};
use crate::numeric::CompensatedSum;

use super::{decay_radius, decay_tail_bound, Support, UnivariateKernel};

/// Tail target used when choosing the summation radius.
pub const MOMENT_TAIL_TOL: f64 = 1e-10;

/// Largest summation radius; beyond it the tail bound is reported instead.
pub const MAX_MOMENT_RADIUS: f64 = 1e5;

/// Estimate of `m_β(χ) = sup_u Σ_k |χ(u−k)| |u−k|^β`.
///
/// `value` is the maximum of the truncated sums over the probes, hence a
/// lower bound of the supremum; `tail_bound` bounds what the truncation
/// dropped at any single probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    pub tail_bound: f64,
    pub radius: f64,
}

impl MomentEstimate {
    pub fn upper_bound(&self) -> f64 {
        self.value + self.tail_bound
    }
}

/// Probes `u = j / probe_count`, `j = 0..probe_count`; the sum is 1-periodic in `u`.
pub fn moment_m_beta(kernel: &UnivariateKernel, beta: f64, probe_count: usize) -> Result<MomentEstimate> {
    moment_m_beta_with_tol(kernel, beta, probe_count, MOMENT_TAIL_TOL)
}

pub fn moment_m_beta_with_tol(
    kernel: &UnivariateKernel,
    beta: f64,
    probe_count: usize,
    eps: f64,
) -> Result<MomentEstimate> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(invalid(format!("moment order must be finite and >= 0, got {beta}")));
    }
    if probe_count == 0 {
        return Err(invalid("probe_count must be positive"));
    }
    if let Support::PolynomialDecay { exponent, .. } = kernel.support() {
        if beta >= exponent - 1.0 {
            return Err(Error::DivergentMoment { beta, decay: exponent });
        }
    }
    let probes = (0..probe_count).map(|j| j as f64 / probe_count as f64);

    if beta == 0.0 && kernel.is_nonnegative() {
        // |χ| = χ: the lattice sums are exact (compact, Fejér) or truncated at eps.
        let value = probes.map(|u| kernel.lattice_sum(u, eps)).fold(0.0, f64::max);
        let tail_bound = match kernel.support() {
            _ if kernel.has_exact_tails() => 0.0,
            Support::Compact { .. } => 0.0,
            Support::PolynomialDecay { exponent, envelope } => {
                decay_tail_bound(envelope, exponent, kernel.truncation_radius(eps))
            }
        };
        return Ok(MomentEstimate { value, tail_bound, radius: kernel.truncation_radius(eps) });
    }

    let (radius, tail_bound) = match kernel.support() {
        Support::Compact { lo, hi } => (lo.abs().max(hi.abs()), 0.0),
        Support::PolynomialDecay { exponent, envelope } => {
            let r = decay_radius(envelope, exponent - beta, eps).min(MAX_MOMENT_RADIUS);
            (r, decay_tail_bound(envelope, exponent - beta, r))
        }
    };
    let value = probes
        .map(|u| {
            let first = (u - radius).ceil() as i64;
            let last = (u + radius).floor() as i64;
            let mut acc = CompensatedSum::new();
            for k in first..=last {
                let x = u - k as f64;
                acc.add(kernel.evaluate(x).abs() * x.abs().powf(beta));
            }
            acc.value()
        })
        .fold(0.0, f64::max);
    Ok(MomentEstimate { value, tail_bound, radius })
}
