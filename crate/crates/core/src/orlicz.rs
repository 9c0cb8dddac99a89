//! φ-functions, the modular `I^φ[f] = ∫ φ(|f|)`, the Luxemburg norm and the
//! L^p / sup-norm error measures, all discretized by the midpoint rule on a
//! [`SampledField`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::ArrayD;

use crate::error::{invalid, Error, Result};
use crate::numeric::{par_from_index_fn, CompensatedSum};

/// Default relative tolerance of [`luxemburg_norm`].
pub const LUXEMBURG_TOL: f64 = 1e-8;

const BRACKET_STEPS: usize = 60;

/// A φ-function: continuous, nondecreasing, `φ(0) = 0`, positive on
/// `(0, ∞)` and unbounded.
#[derive(Clone)]
pub struct ModularFunction {
    name: String,
    convex: bool,
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for ModularFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModularFunction")
            .field("name", &self.name)
            .field("convex", &self.convex)
            .finish()
    }
}

impl ModularFunction {
    /// `φ(u) = u^p`, `p ≥ 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid(format!("power φ-function needs finite p >= 1, got {p}")));
        }
        let phi: Arc<dyn Fn(f64) -> f64 + Send + Sync> = if p == 1.0 {
            Arc::new(|u| u)
        } else if p == 2.0 {
            Arc::new(|u| u * u)
        } else {
            Arc::new(move |u: f64| u.powf(p))
        };
        Ok(Self { name: format!("power:{p}"), convex: true, phi })
    }

    /// `φ(u) = exp(u^α) − 1`, `α ≥ 1`.
    pub fn exponential(alpha: f64) -> Result<Self> {
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return Err(invalid(format!("exponential φ-function needs finite alpha >= 1, got {alpha}")));
        }
        Ok(Self {
            name: format!("exp:{alpha}"),
            convex: true,
            phi: Arc::new(move |u: f64| u.powf(alpha).exp_m1()),
        })
    }

    pub fn custom(name: impl Into<String>, convex: bool, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), convex, phi: Arc::new(phi) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        (self.phi)(u)
    }

    /// Spot-checks the φ-function axioms on a probe grid.
    pub fn validate(&self) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(invalid(format!("{}: φ(0) must be 0", self.name)));
        }
        let probes: Vec<f64> = (-12..=12).map(|e| 10f64.powf(f64::from(e) / 2.0)).collect();
        let mut prev = 0.0;
        for &u in &probes {
            let v = self.eval(u);
            if !(v > 0.0) {
                return Err(invalid(format!("{}: φ({u}) must be positive", self.name)));
            }
            if v < prev {
                return Err(invalid(format!("{}: φ must be nondecreasing (fails at {u})", self.name)));
            }
            prev = v;
        }
        if !(self.eval(1e8) > 1e3 * self.eval(1.0)) {
            return Err(invalid(format!("{}: φ does not grow without bound", self.name)));
        }
        Ok(())
    }
}

impl FromStr for ModularFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("unknown φ-function `{s}` (expected power:<p> or exp:<alpha>)")))?;
        let value: f64 = arg
            .parse()
            .map_err(|_| invalid(format!("invalid φ-function parameter in `{s}`")))?;
        match kind {
            "power" => Self::power(value),
            "exp" => Self::exponential(value),
            _ => Err(invalid(format!("unknown φ-function `{s}` (expected power:<p> or exp:<alpha>)"))),
        }
    }
}

/// Function samples at the cell centers of a regular grid over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    domain_box: Vec<(f64, f64)>,
    values: ArrayD<f64>,
}

impl SampledField {
    pub fn new(domain_box: Vec<(f64, f64)>, values: ArrayD<f64>) -> Result<Self> {
        if domain_box.len() != values.ndim() {
            return Err(Error::DimensionMismatch { expected: domain_box.len(), got: values.ndim() });
        }
        if domain_box.iter().any(|&(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(invalid("domain box needs finite lo < hi in every dimension"));
        }
        if values.shape().iter().any(|&n| n == 0) {
            return Err(invalid("grid shape must be positive"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("field values must be finite"));
        }
        Ok(Self { domain_box, values })
    }

    /// Samples `f` at the cell centers of a `shape` grid over `domain_box`.
    pub fn from_fn(domain_box: Vec<(f64, f64)>, shape: &[usize], f: impl Fn(&[f64]) -> f64 + Sync) -> Result<Self> {
        if domain_box.len() != shape.len() {
            return Err(Error::DimensionMismatch { expected: domain_box.len(), got: shape.len() });
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(invalid("grid shape must be positive"));
        }
        let centers: Vec<Vec<f64>> = domain_box
            .iter()
            .zip(shape)
            .map(|(&(a, b), &n)| cell_centers(a, b, n))
            .collect();
        let values = par_from_index_fn(shape, |idx| {
            let x: Vec<f64> = (0..shape.len()).map(|d| centers[d][idx[d]]).collect();
            f(&x)
        });
        Self::new(domain_box, values)
    }

    pub fn domain_box(&self) -> &[(f64, f64)] {
        &self.domain_box
    }

    pub fn grid_shape(&self) -> &[usize] {
        self.values.shape()
    }

    pub fn values(&self) -> &ArrayD<f64> {
        &self.values
    }

    pub fn cell_volume(&self) -> f64 {
        self.domain_box
            .iter()
            .zip(self.values.shape())
            .map(|(&(a, b), &n)| (b - a) / n as f64)
            .product()
    }

    /// Cell-center coordinates along dimension `dim`.
    pub fn centers(&self, dim: usize) -> Vec<f64> {
        let (a, b) = self.domain_box[dim];
        cell_centers(a, b, self.values.shape()[dim])
    }

    /// Same grid, values `c · f`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { domain_box: self.domain_box.clone(), values: self.values.mapv(|v| c * v) }
    }

    /// Same grid, new values (shape must match).
    pub fn with_values(&self, values: ArrayD<f64>) -> Result<Self> {
        if values.shape() != self.values.shape() {
            return Err(Error::GridMismatch);
        }
        Self::new(self.domain_box.clone(), values)
    }

    /// Pointwise `self − other` on matching grids.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self { domain_box: self.domain_box.clone(), values: &self.values - &other.values })
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        let same_box = self
            .domain_box
            .iter()
            .zip(&other.domain_box)
            .all(|(a, b)| (a.0 - b.0).abs() <= 1e-12 * a.0.abs().max(1.0) && (a.1 - b.1).abs() <= 1e-12 * a.1.abs().max(1.0));
        if self.values.shape() != other.values.shape() || self.domain_box.len() != other.domain_box.len() || !same_box {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

fn cell_centers(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    (0..n).map(|i| a + (i as f64 + 0.5) * h).collect()
}

/// `I^φ[f] ≈ cell_volume · Σ φ(|f_i|)`.
pub fn modular(phi: &ModularFunction, field: &SampledField) -> f64 {
    let acc: CompensatedSum = field.values.iter().map(|v| phi.eval(v.abs())).collect();
    field.cell_volume() * acc.value()
}

/// `‖f‖_p = (I^{u^p}[f])^{1/p}`, `p ≥ 1`.
pub fn lp_norm(field: &SampledField, p: f64) -> Result<f64> {
    let phi = ModularFunction::power(p)?;
    Ok(modular(&phi, field).powf(1.0 / p))
}

/// Which inequality defines the admissible scalings `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LuxemburgForm {
    /// `I^φ[f/λ] ≤ λ`
    #[default]
    Printed,
    /// `I^φ[f/λ] ≤ 1`, the textbook form.
    Standard,
}

/// `inf{λ > 0 : I^φ[f/λ] ≤ λ}` by bracketing and bisection to relative
/// tolerance `tol`.
pub fn luxemburg_norm(phi: &ModularFunction, field: &SampledField, tol: f64) -> Result<f64> {
    luxemburg_norm_with(phi, field, tol, LuxemburgForm::Printed)
}

pub fn luxemburg_norm_with(
    phi: &ModularFunction,
    field: &SampledField,
    tol: f64,
    form: LuxemburgForm,
) -> Result<f64> {
    if !phi.is_convex() {
        return Err(invalid(format!("Luxemburg norm needs a convex φ-function, got {}", phi.name())));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    if field.values.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let admissible = |lambda: f64| {
        let m = modular(phi, &field.scaled(1.0 / lambda));
        let bound = match form {
            LuxemburgForm::Printed => lambda,
            LuxemburgForm::Standard => 1.0,
        };
        m <= bound
    };
    let (mut lo, mut hi);
    if admissible(1.0) {
        hi = 1.0;
        lo = 0.5;
        let mut steps = 0;
        while admissible(lo) {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > BRACKET_STEPS {
                return Err(Error::BracketSearch(steps));
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        let mut steps = 0;
        while !admissible(hi) {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > BRACKET_STEPS {
                return Err(Error::BracketSearch(steps));
            }
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if admissible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `max |a − b|` over the samples.
pub fn sup_error(field_a: &SampledField, field_b: &SampledField) -> Result<f64> {
    field_a.check_same_grid(field_b)?;
    Ok(field_a
        .values
        .iter()
        .zip(field_b.values.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
