//! Univariate kernels, product kernels and the numerical checks of the
//! kernel conditions (integrability, partition of unity, finite moments).
//!
//! Three families are built in:
//!
//! * the Fejér kernel `F(x) = ½ sinc²(x/2)`,
//! * central B-splines `M_k`, evaluated through the explicit truncated-power sum,
//! * Jackson-type kernels `J_k(x) = c_k sinc^{2k}(x / (2kπα))`.
//!
//! Kernels are immutable once built and can be shared freely between threads.

mod moments;
mod product;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::numeric::{alternating_trigamma, binomial, trigamma, CompensatedSum};
use crate::quadrature::integrate_adaptive;

pub use moments::{moment_m_beta, MomentEstimate};
pub use product::{check_partition_of_unity, make_product, ProductKernel};

/// Largest B-spline order accepted by [`make_central_bspline`].
pub const MAX_BSPLINE_ORDER: u32 = 20;

/// Default absolute tolerance for the Jackson normalization integral.
pub const JACKSON_NORM_TOL: f64 = 1e-10;

/// Evaluation budget for the normalization quadrature.
pub const QUADRATURE_BUDGET: usize = 50_000_000;

/// Cap on the number of lattice terms summed by brute force on one side.
const MAX_BRUTE_TERMS: i64 = 20_000_000;

/// `sin(πx)/(πx)`, with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    let t = PI * x;
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 * (1.0 - t2 / 20.0)
    } else {
        t.sin() / t
    }
}

/// Support / decay metadata of a univariate kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// The kernel vanishes outside `[lo, hi]`.
    Compact { lo: f64, hi: f64 },
    /// `|χ(x)| ≤ envelope · |x|^(−exponent)` for `|x| ≥ 1`, with `exponent > 1`.
    PolynomialDecay { exponent: f64, envelope: f64 },
}

#[derive(Clone)]
enum Shape {
    /// `Σ_i coeffs[i] (k/2 + x − i)_+^(k−1)`, coefficients already divided by (k−1)!.
    BSpline { order: u32, coeffs: Vec<f64> },
    /// `coeff · sinc^(2·half_power)(x / scale)`.
    SincPower { half_power: u32, scale: f64, coeff: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// An evaluable real kernel `χ_i : R → R` with support metadata.
#[derive(Clone)]
pub struct UnivariateKernel {
    name: String,
    support: Support,
    shape: Shape,
    gain: f64,
    nonnegative: bool,
    even: bool,
}

impl fmt::Debug for UnivariateKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnivariateKernel")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

/// Fejér kernel `F(x) = ½ sinc²(x/2)`.
pub fn make_fejer() -> UnivariateKernel {
    UnivariateKernel {
        name: "fejer".into(),
        // |½ sinc²(x/2)| ≤ ½ (2/(π|x|))² = (2/π²)|x|⁻²
        support: Support::PolynomialDecay { exponent: 2.0, envelope: 2.0 / (PI * PI) },
        shape: Shape::SincPower { half_power: 1, scale: 2.0, coeff: 0.5 },
        gain: 1.0,
        nonnegative: true,
        even: true,
    }
}

/// Central B-spline `M_k` of order `k`, supported on `[−k/2, k/2]`.
pub fn make_central_bspline(k: u32) -> Result<UnivariateKernel> {
    if k == 0 {
        return Err(invalid("B-spline order must be at least 1"));
    }
    if k > MAX_BSPLINE_ORDER {
        return Err(invalid(format!(
            "B-spline order {k} exceeds {MAX_BSPLINE_ORDER}; the truncated-power sum loses accuracy beyond that"
        )));
    }
    let factorial: f64 = (1..k).map(f64::from).product();
    let coeffs = (0..=k)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(k, i) / factorial
        })
        .collect();
    let half = f64::from(k) / 2.0;
    Ok(UnivariateKernel {
        name: format!("bspline:{k}"),
        support: Support::Compact { lo: -half, hi: half },
        shape: Shape::BSpline { order: k, coeffs },
        gain: 1.0,
        nonnegative: true,
        even: true,
    })
}

/// Normalization constant `c_k = [∫ sinc^{2k}(u/(2kπα)) du]⁻¹` with the
/// integral computed to absolute accuracy `tol`.
pub fn jackson_norm_const(k: u32, alpha: f64, tol: f64) -> Result<f64> {
    jackson_norm_const_with_budget(k, alpha, tol, QUADRATURE_BUDGET)
}

pub fn jackson_norm_const_with_budget(k: u32, alpha: f64, tol: f64, budget: usize) -> Result<f64> {
    check_jackson_params(k, alpha)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let scale = 2.0 * f64::from(k) * PI * alpha;
    let integral = scale * sinc_power_integral(k, tol / scale, budget)?;
    Ok(1.0 / integral)
}

fn check_jackson_params(k: u32, alpha: f64) -> Result<()> {
    if k == 0 {
        return Err(invalid("Jackson order k must be at least 1"));
    }
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(invalid(format!("Jackson parameter alpha must be finite and >= 1, got {alpha}")));
    }
    Ok(())
}

/// `∫_R sinc^{2k}(t) dt` to absolute accuracy `tol`.
///
/// The integral over `[−T, T]` is computed adaptively. Beyond `T` (an integer)
/// `sin^{2k}(πt)` is split into its mean `C(2k,k)/4^k`, integrated exactly
/// against `(πt)^{−2k}`, and an oscillating remainder whose contribution is
/// at most `π^{−2k−1} T^{−2k}` on both sides together (one integration by parts
/// with `|sinc(t)| ≤ 1/(π|t|)`).
pub(crate) fn sinc_power_integral(k: u32, tol: f64, budget: usize) -> Result<f64> {
    let two_k = f64::from(2 * k);
    let mut t_max = (2.0 / (PI.powf(two_k + 1.0) * tol)).powf(1.0 / two_k).ceil().max(1.0);
    if t_max * 15.0 > budget as f64 {
        return Err(Error::QuadratureBudget { tol, budget, estimate: f64::NAN });
    }
    t_max = t_max.max(1.0);
    let power = 2 * k as i32;
    let head = integrate_adaptive(
        |t| sinc(t).powi(power),
        0.0,
        t_max,
        t_max as usize,
        tol / 4.0,
        budget,
    )?;
    let mean = binomial(2 * k, k) / 4f64.powi(k as i32);
    let tail = mean * PI.powf(-two_k) * t_max.powf(1.0 - two_k) / (two_k - 1.0);
    Ok(2.0 * (head.value + tail))
}

/// Jackson-type kernel `J_k(x) = c_k sinc^{2k}(x/(2kπα))`.
pub fn make_jackson(k: u32, alpha: f64) -> Result<UnivariateKernel> {
    make_jackson_with_tol(k, alpha, JACKSON_NORM_TOL)
}

pub fn make_jackson_with_tol(k: u32, alpha: f64, tol: f64) -> Result<UnivariateKernel> {
    let c = jackson_norm_const(k, alpha, tol)?;
    let scale = 2.0 * f64::from(k) * PI * alpha;
    let exponent = f64::from(2 * k);
    Ok(UnivariateKernel {
        name: format!("jackson:{k}:{alpha}"),
        // |sinc(t)| ≤ 1/(π|t|) gives J_k(x) ≤ c_k (2kα)^{2k} |x|^{−2k}
        support: Support::PolynomialDecay {
            exponent,
            envelope: c * (2.0 * f64::from(k) * alpha).powf(exponent),
        },
        shape: Shape::SincPower { half_power: k, scale, coeff: c },
        gain: 1.0,
        nonnegative: true,
        even: true,
    })
}

impl UnivariateKernel {
    /// Wraps an arbitrary function. `even` declares `f(−x) = f(x)`, which
    /// enables the mirrored tail sums; it is not verified.
    pub fn custom<F>(name: impl Into<String>, support: Support, even: bool, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        match support {
            Support::Compact { lo, hi } if !(lo < hi) || !lo.is_finite() || !hi.is_finite() => {
                return Err(invalid("compact support needs finite lo < hi"))
            }
            Support::PolynomialDecay { exponent, envelope } if !(exponent > 1.0) || !(envelope > 0.0) => {
                return Err(invalid("decay metadata needs exponent > 1 and envelope > 0"))
            }
            _ => {}
        }
        Ok(Self {
            name: name.into(),
            support,
            shape: Shape::Custom(Arc::new(f)),
            gain: 1.0,
            nonnegative: false,
            even,
        })
    }

    /// The same kernel multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.gain *= factor;
        out.nonnegative = self.nonnegative && factor >= 0.0;
        out.name = format!("{factor}*{}", self.name);
        if let Support::PolynomialDecay { exponent, envelope } = self.support {
            out.support = Support::PolynomialDecay { exponent, envelope: envelope * factor.abs() };
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    /// Whether [`Self::right_tail`] and [`Self::left_tail`] are exact rather
    /// than truncated.
    pub fn has_exact_tails(&self) -> bool {
        matches!(self.support, Support::Compact { .. }) || matches!(self.shape, Shape::SincPower { .. })
    }

    /// Normalization constant for Jackson kernels, `None` otherwise.
    pub fn jackson_constant(&self) -> Option<f64> {
        match self.shape {
            Shape::SincPower { coeff, .. } if self.name.starts_with("jackson") => Some(coeff),
            _ => None,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.gain * self.evaluate_unscaled(x)
    }

    fn evaluate_unscaled(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::BSpline { order, coeffs } => {
                // Evaluate at −|x|: fewer active terms and less cancellation.
                let x = -x.abs();
                let half = f64::from(*order) / 2.0;
                let mut acc = 0.0;
                for (i, c) in coeffs.iter().enumerate() {
                    let base = half + x - i as f64;
                    if base < 0.0 {
                        break;
                    }
                    let term = if *order == 1 {
                        // Heaviside with H(0) = 1/2 keeps M_1 even.
                        if base > 0.0 { 1.0 } else { 0.5 }
                    } else {
                        base.powi(*order as i32 - 1)
                    };
                    acc += c * term;
                }
                acc
            }
            Shape::SincPower { half_power, scale, coeff } => {
                coeff * sinc(x / scale).powi(2 * *half_power as i32)
            }
            Shape::Custom(f) => match self.support {
                Support::Compact { lo, hi } if x < lo || x > hi => 0.0,
                _ => f(x),
            },
        }
    }

    /// Radius `R` beyond which the lattice tail `Σ_{|u−k|>R} |χ(u−k)|` is
    /// below `eps`: the exact half-width for compact kernels, otherwise the
    /// smallest radius certified by the decay envelope.
    pub fn truncation_radius(&self, eps: f64) -> f64 {
        match self.support {
            Support::Compact { lo, hi } => lo.abs().max(hi.abs()),
            Support::PolynomialDecay { exponent, envelope } => decay_radius(envelope, exponent, eps),
        }
    }

    /// Index range `[first, last]` of nodes `k` with `χ(v − k)` possibly
    /// above the truncation tolerance.
    pub fn index_window(&self, v: f64, eps: f64) -> (i64, i64) {
        let (lo, hi) = match self.support {
            Support::Compact { lo, hi } => (lo, hi),
            Support::PolynomialDecay { .. } => {
                let r = self.truncation_radius(eps);
                (-r, r)
            }
        };
        (clamp_index((v - hi).ceil()), clamp_index((v - lo).floor()))
    }

    /// `Σ_{k ≥ first} χ(u − k)`.
    ///
    /// Exact for compact kernels and for the sinc-power family (Fejér,
    /// Jackson); custom decaying kernels are summed up to the truncation
    /// radius for `eps`.
    pub fn right_tail(&self, u: f64, first: i64, eps: f64) -> f64 {
        if let Shape::SincPower { half_power, scale, coeff } = self.shape {
            let tail = if half_power == 1 && scale == 2.0 {
                fejer_shape_tail(u, first)
            } else {
                sinc_power_tail(half_power, scale, u, first)
            };
            return self.gain * coeff * tail;
        }
        let (lo, hi) = self.index_window(u, eps);
        let start = first.max(lo);
        let end = hi.min(start.saturating_add(MAX_BRUTE_TERMS));
        let mut acc = CompensatedSum::new();
        let mut k = start;
        while k <= end {
            acc.add(self.evaluate(u - k as f64));
            k += 1;
        }
        acc.value()
    }

    /// `Σ_{k ≤ last} χ(u − k)`.
    pub fn left_tail(&self, u: f64, last: i64, eps: f64) -> f64 {
        if self.even {
            return self.right_tail(-u, -last, eps);
        }
        let (lo, hi) = self.index_window(u, eps);
        let end = last.min(hi);
        let start = lo.max(end.saturating_sub(MAX_BRUTE_TERMS));
        let mut acc = CompensatedSum::new();
        let mut k = start;
        while k <= end {
            acc.add(self.evaluate(u - k as f64));
            k += 1;
        }
        acc.value()
    }

    /// `Σ_{k∈Z} χ(u − k)`, see [`Self::right_tail`] for accuracy.
    pub fn lattice_sum(&self, u: f64, eps: f64) -> f64 {
        let split = clamp_index(u.floor());
        self.right_tail(u, split, eps) + self.left_tail(u, split - 1, eps)
    }

    /// `∫_R χ` to absolute accuracy `tol`.
    pub fn integral(&self, tol: f64) -> Result<f64> {
        Ok(self.gain * self.unscaled_integral(tol / self.gain.abs().max(f64::MIN_POSITIVE), false)?)
    }

    /// `‖χ‖_1` to absolute accuracy `tol`.
    pub fn l1_norm(&self, tol: f64) -> Result<f64> {
        let base = self.unscaled_integral(tol / self.gain.abs().max(f64::MIN_POSITIVE), true)?;
        Ok(self.gain.abs() * base.abs())
    }

    fn unscaled_integral(&self, tol: f64, absolute: bool) -> Result<f64> {
        match &self.shape {
            Shape::BSpline { order, .. } => {
                let half = f64::from(*order) / 2.0;
                let f = |x: f64| self.evaluate_unscaled(x);
                Ok(integrate_adaptive(f, -half, half, *order as usize, tol, QUADRATURE_BUDGET)?.value)
            }
            Shape::SincPower { half_power, scale, coeff } => {
                Ok(coeff * scale * sinc_power_integral(*half_power, tol / (coeff * scale), QUADRATURE_BUDGET)?)
            }
            Shape::Custom(_) => {
                let f = |x: f64| {
                    let v = self.evaluate_unscaled(x);
                    if absolute { v.abs() } else { v }
                };
                let (lo, hi) = match self.support {
                    Support::Compact { lo, hi } => (lo, hi),
                    Support::PolynomialDecay { exponent, envelope } => {
                        // 2C R^{1−β}/(β−1) ≤ tol/2
                        let r = (4.0 * envelope / ((exponent - 1.0) * tol))
                            .powf(1.0 / (exponent - 1.0))
                            .max(1.0);
                        (-r, r)
                    }
                };
                let panels = ((hi - lo).ceil() as usize).clamp(16, 1 << 20);
                Ok(integrate_adaptive(f, lo, hi, panels, tol / 2.0, QUADRATURE_BUDGET)?.value)
            }
        }
    }
}

fn clamp_index(x: f64) -> i64 {
    x.clamp(-(1i64 << 60) as f64, (1i64 << 60) as f64) as i64
}

/// Upper bound on `Σ_{|u−k|>R} C|u−k|^{−β}` (both sides).
pub(crate) fn decay_tail_bound(envelope: f64, exponent: f64, radius: f64) -> f64 {
    if exponent <= 1.0 {
        return f64::INFINITY;
    }
    2.0 * envelope * (radius.powf(-exponent) + radius.powf(1.0 - exponent) / (exponent - 1.0))
}

/// Smallest `R ≥ 1` (to bisection accuracy) with `decay_tail_bound(C, β, R) < eps`.
pub(crate) fn decay_radius(envelope: f64, exponent: f64, eps: f64) -> f64 {
    if exponent <= 1.0 {
        return f64::INFINITY;
    }
    // log form avoids overflow for the large Jackson envelopes
    let log_bound = |r: f64| {
        (2.0 * envelope).ln() - exponent * r.ln() + (1.0 + r / (exponent - 1.0)).ln()
    };
    let target = eps.ln();
    if log_bound(1.0) < target {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while log_bound(hi.exp()) >= target {
        lo = hi;
        hi *= 2.0;
        if hi > 700.0 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if log_bound(mid.exp()) < target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    hi.exp()
}

/// Offsets beyond which [`sinc_power_far_tail`] takes over from explicit terms.
const FAR_TAIL_OFFSET: f64 = 16.0;

/// `Σ_{k ≥ first} sinc^{2p}((u−k)/s)`: explicit terms for `|u − k| < 16`,
/// far tails on either side through [`sinc_power_far_tail`].
fn sinc_power_tail(p: u32, s: f64, u: f64, first: i64) -> f64 {
    let a0 = first as f64 - u;
    if a0 >= FAR_TAIL_OFFSET {
        return sinc_power_far_tail(p, s, a0);
    }
    let power = 2 * p as i32;
    let term = |k: i64| sinc((u - k as f64) / s).powi(power);
    let mut acc = CompensatedSum::new();
    // last k with u − k ≥ 16 and first k with k − u ≥ 16
    let near_lo = clamp_index((u - FAR_TAIL_OFFSET).floor());
    let near_hi = clamp_index((u + FAR_TAIL_OFFSET).ceil());
    if first <= near_lo {
        acc.add(sinc_power_far_tail(p, s, u - near_lo as f64));
        acc.add(-sinc_power_far_tail(p, s, u - first as f64 + 1.0));
    }
    for k in first.max(near_lo + 1)..near_hi {
        acc.add(term(k));
    }
    acc.add(sinc_power_far_tail(p, s, near_hi as f64 - u));
    acc.value()
}

/// Far tails whose envelope bound falls below this are dropped; it is under
/// half an ulp of a unit lattice sum.
const FAR_TAIL_FLOOR: f64 = 1e-18;

/// `Σ_{n ≥ 0} sinc^{2p}((n + a)/s)` for `a ≥ 16`.
///
/// With `sin^{2p}φ = Σ_j c_j cos(2jφ)` and
/// `x^{−2p} = ∫_0^∞ t^{2p−1} e^{−xt} dt / (2p−1)!` the lattice sum becomes
/// the non-oscillatory integral
/// `∫_0^∞ t^{2p−1} e^{−at}/(2p−1)! · Re Σ_j c_j e^{iθ_j a} / (1 − e^{iθ_j} e^{−t}) dt`
/// with `θ_j = 2πj/s`, evaluated in the variable `τ = a t`.
fn sinc_power_far_tail(p: u32, s: f64, a: f64) -> f64 {
    let two_p = 2 * p;
    // Σ_n ((s/π)/(n + a))^{2p} ≤ (s/π)^{2p} (a^{−2p} + a^{1−2p}/(2p−1))
    let envelope = (s / PI).powi(two_p as i32)
        * (a.powi(-(two_p as i32)) + a.powi(1 - two_p as i32) / f64::from(two_p - 1));
    if envelope < FAR_TAIL_FLOOR {
        return 0.0;
    }
    let norm = 4f64.powi(-(p as i32));
    // (c_j, sin θ_j, 1 − cos θ_j, θ_j a mod 2π)
    let modes: Vec<(f64, f64, f64, f64)> = (0..=p)
        .map(|j| {
            let c = if j == 0 {
                norm * binomial(two_p, p)
            } else {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                2.0 * norm * sign * binomial(two_p, p - j)
            };
            let theta = (2.0 * PI * f64::from(j) / s).rem_euclid(2.0 * PI);
            let half = (0.5 * theta).sin();
            let phase = (2.0 * PI * f64::from(j) * (a / s).rem_euclid(1.0)).rem_euclid(2.0 * PI);
            (c, theta.sin(), 2.0 * half * half, phase)
        })
        .collect();
    let log_norm: f64 = (1..two_p).map(|i| f64::from(i).ln()).sum();
    let integrand = |tau: f64| {
        if tau <= 0.0 {
            return 0.0;
        }
        let t = tau / a;
        let decay = (-t).exp();
        let mut bracket = 0.0;
        for &(c, sin_t, one_minus_cos, phase) in &modes {
            let re = -(-t).exp_m1() + decay * one_minus_cos;
            let im = -decay * sin_t;
            let (pc, ps) = (phase.cos(), phase.sin());
            bracket += c * (pc * re + ps * im) / (re * re + im * im);
        }
        (f64::from(two_p - 1) * tau.ln() - tau - log_norm).exp() * bracket
    };
    let upper = f64::from(two_p) + 60.0;
    let scale = a / f64::from(two_p - 1).max(1.0) + 1.0;
    let integral = integrate_adaptive(integrand, 0.0, upper, 8, 1e-13 * scale, 1_000_000)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    (s / PI).powi(two_p as i32) * integral * (-(f64::from(two_p)) * a.ln()).exp()
}

/// `Σ_{k ≥ first} 2(1 − cos π(u−k))/(π²(u−k)²)`, i.e. the lattice tail of
/// `sinc²((u−k)/2)`, using `cos π(u−k) = (−1)^k cos πu` and trigamma sums.
fn fejer_shape_tail(u: f64, first: i64) -> f64 {
    let term = |k: i64| sinc(0.5 * (u - k as f64)).powi(2);
    let mut acc = CompensatedSum::new();
    let mut k = first;
    while (k as f64 - u) < 4.0 {
        acc.add(term(k));
        k += 1;
    }
    let a = k as f64 - u;
    let parity = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let cos_pi_u = cos_pi(u);
    acc.add(2.0 / (PI * PI) * (trigamma(a) - parity * cos_pi_u * alternating_trigamma(a)));
    acc.value()
}

/// cos(πu) with argument reduction on u.
fn cos_pi(u: f64) -> f64 {
    let r = u.rem_euclid(2.0);
    (PI * r).cos()
}

/// A kernel identifier from the registry: `fejer`, `bspline:<k>` or
/// `jackson:<k>[:<alpha>]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Fejer,
    BSpline(u32),
    Jackson { k: u32, alpha: f64 },
}

impl KernelSpec {
    pub fn build(&self) -> Result<UnivariateKernel> {
        match *self {
            KernelSpec::Fejer => Ok(make_fejer()),
            KernelSpec::BSpline(k) => make_central_bspline(k),
            KernelSpec::Jackson { k, alpha } => make_jackson(k, alpha),
        }
    }

    /// Bivariate product kernel with this factor in both coordinates.
    pub fn build_product(&self, dims: usize) -> Result<ProductKernel> {
        let factor = self.build()?;
        make_product(vec![factor; dims])
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Fejer => write!(f, "fejer"),
            KernelSpec::BSpline(k) => write!(f, "bspline:{k}"),
            KernelSpec::Jackson { k, alpha } => write!(f, "jackson:{k}:{alpha}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownKernel(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["fejer"] => Ok(KernelSpec::Fejer),
            ["bspline", k] => {
                let k: u32 = k.parse().map_err(|_| unknown())?;
                if k == 0 || k > MAX_BSPLINE_ORDER {
                    return Err(unknown());
                }
                Ok(KernelSpec::BSpline(k))
            }
            ["jackson", k, rest @ ..] if rest.len() <= 1 => {
                let k: u32 = k.parse().map_err(|_| unknown())?;
                let alpha: f64 = match rest.first() {
                    Some(a) => a.parse().map_err(|_| unknown())?,
                    None => 1.0,
                };
                check_jackson_params(k, alpha).map_err(|_| unknown())?;
                Ok(KernelSpec::Jackson { k, alpha })
            }
            _ => Err(unknown()),
        }
    }
}
