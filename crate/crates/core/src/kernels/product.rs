use crate::error::{invalid, Error, Result};
use crate::numeric::{low_discrepancy_points, CompensatedSum};
use crate::sampling::{NodeSequence, SamplingScheme};

use super::{Support, UnivariateKernel};

/// `χ(x) = Π_i χ_i(x_i)`.
#[derive(Debug, Clone)]
pub struct ProductKernel {
    factors: Vec<UnivariateKernel>,
}

pub fn make_product(factors: Vec<UnivariateKernel>) -> Result<ProductKernel> {
    if factors.is_empty() {
        return Err(invalid("a product kernel needs at least one factor"));
    }
    Ok(ProductKernel { factors })
}

impl ProductKernel {
    pub fn dims(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[UnivariateKernel] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &UnivariateKernel {
        &self.factors[i]
    }

    pub fn name(&self) -> String {
        self.factors.iter().map(|f| f.name()).collect::<Vec<_>>().join("*")
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), got: x.len() });
        }
        Ok(self.factors.iter().zip(x).map(|(f, &xi)| f.evaluate(xi)).product())
    }

    /// Support box when every factor is compactly supported.
    pub fn support_box(&self) -> Option<Vec<(f64, f64)>> {
        self.factors
            .iter()
            .map(|f| match f.support() {
                Support::Compact { lo, hi } => Some((lo, hi)),
                Support::PolynomialDecay { .. } => None,
            })
            .collect()
    }

    /// Slowest decay exponent among the non-compact factors.
    pub fn decay_exponent(&self) -> Option<f64> {
        self.factors
            .iter()
            .filter_map(|f| match f.support() {
                Support::PolynomialDecay { exponent, .. } => Some(exponent),
                Support::Compact { .. } => None,
            })
            .reduce(f64::min)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.factors.iter().all(UnivariateKernel::is_nonnegative)
    }
}

/// Maximum of `|Σ_k χ(u − t_k) − 1|` over `probe_count` low-discrepancy
/// probes.
///
/// For uniform nodes the probes cover one period `[0,1)^n` and the
/// one-dimensional lattice sums are exact for compact and Fejér factors,
/// truncated at tolerance `eps` otherwise. For explicit nodes the probes lie
/// in the middle half of the node range and the sum runs over the available
/// nodes inside the truncation window.
pub fn check_partition_of_unity(
    kernel: &ProductKernel,
    scheme: &SamplingScheme,
    probe_count: usize,
    eps: f64,
) -> Result<f64> {
    if scheme.dims() != kernel.dims() {
        return Err(Error::DimensionMismatch { expected: kernel.dims(), got: scheme.dims() });
    }
    if probe_count == 0 {
        return Err(invalid("probe_count must be positive"));
    }
    let probes = low_discrepancy_points(probe_count, kernel.dims());
    let mut worst = 0.0_f64;
    for p in &probes {
        let mut total = 1.0;
        for (i, factor) in kernel.factors().iter().enumerate() {
            total *= match scheme.nodes(i) {
                NodeSequence::Uniform => factor.lattice_sum(p[i], eps),
                seq @ NodeSequence::Explicit { .. } => explicit_node_sum(factor, seq, p[i], eps),
            };
        }
        worst = worst.max((total - 1.0).abs());
    }
    Ok(worst)
}

fn explicit_node_sum(factor: &UnivariateKernel, seq: &NodeSequence, frac: f64, eps: f64) -> f64 {
    let (first, last) = seq.index_range().expect("explicit sequences have a range");
    let a = seq.node(first).unwrap_or(0.0);
    let b = seq.node(last).unwrap_or(0.0);
    let u = a + (0.25 + 0.5 * frac) * (b - a);
    let (lo, hi) = match factor.support() {
        Support::Compact { lo, hi } => (lo, hi),
        Support::PolynomialDecay { .. } => {
            let r = factor.truncation_radius(eps);
            (-r, r)
        }
    };
    // nodes t with lo ≤ u − t ≤ hi
    let mut acc = CompensatedSum::new();
    if let Some((k0, k1)) = seq.indices_within(u - hi, u - lo) {
        for k in k0..=k1 {
            if let Some(t) = seq.node(k) {
                acc.add(factor.evaluate(u - t));
            }
        }
    }
    acc.value()
}
