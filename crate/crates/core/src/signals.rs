//! Built-in test signals and convergence sweeps of `S_w f − f`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use ndarray::ArrayD;

use crate::error::{invalid, Error, Result};
use crate::image::StepImage;
use crate::kernels::{KernelSpec, ProductKernel};
use crate::orlicz::{lp_norm, modular, sup_error, ModularFunction, SampledField};
use crate::sampling::{evaluate_operator_separable_with_tol, CellMeans, SamplingScheme, DEFAULT_TRUNCATION_TOL};

/// Gauss–Legendre order per axis for the cell means of the smooth signal.
const MEAN_QUADRATURE_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestSignal {
    /// `(1 + cos πx)(1 + cos πy)/4` on `[−1, 1]²`, zero outside.
    Smooth,
    /// Indicator of `[0, 1]` on the line.
    Step,
}

impl TestSignal {
    pub fn dims(self) -> usize {
        match self {
            TestSignal::Smooth => 2,
            TestSignal::Step => 1,
        }
    }

    pub fn support(self) -> Vec<(f64, f64)> {
        match self {
            TestSignal::Smooth => vec![(-1.0, 1.0); 2],
            TestSignal::Step => vec![(0.0, 1.0)],
        }
    }

    pub fn value(self, x: &[f64]) -> f64 {
        match self {
            TestSignal::Smooth => smooth_bump(x[0], x[1]),
            TestSignal::Step => {
                if (0.0..=1.0).contains(&x[0]) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Evaluation grid for `metric`: a cell-centered grid whose midpoint rule
    /// covers the support of `S_w f` for the metric's integral, or the probe
    /// grid for the sup norm.
    pub fn grid(self, metric: Metric) -> (Vec<(f64, f64)>, Vec<usize>) {
        match (self, metric) {
            // probes at −1 + 0.01 i, i = 0..=200
            (TestSignal::Smooth, Metric::Sup) => (vec![(-1.005, 1.005); 2], vec![201; 2]),
            (TestSignal::Smooth, _) => (vec![(-2.0, 2.0); 2], vec![400; 2]),
            (TestSignal::Step, _) => (vec![(-2.0, 3.0)], vec![50_000]),
        }
    }
}

/// The smooth raised-cosine bump.
pub fn smooth_bump(x: f64, y: f64) -> f64 {
    if x.abs() > 1.0 || y.abs() > 1.0 {
        return 0.0;
    }
    let bump = |t: f64| 0.5 * (1.0 + (std::f64::consts::PI * t).cos());
    bump(x) * bump(y)
}

/// `size × size` image of the bump over `[−1, 1]²`, sampled at pixel centers
/// and scaled to gray levels `0..=255`.
pub fn smooth_bump_image(size: usize) -> Result<StepImage> {
    let h = 2.0 / size as f64;
    let coord = |i: usize| -1.0 + (i as f64 + 0.5) * h;
    StepImage::from_fn(size, size, |i, j| (255.0 * smooth_bump(coord(j), coord(i))).round())
}

impl FromStr for TestSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(TestSignal::Smooth),
            "step" => Ok(TestSignal::Step),
            _ => Err(invalid(format!("unknown test signal `{s}` (expected smooth or step)"))),
        }
    }
}

impl fmt::Display for TestSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestSignal::Smooth => "smooth",
            TestSignal::Step => "step",
        })
    }
}

/// Error measure applied to `S_w f − f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Sup,
    Lp(f64),
    /// `I^φ[S_w f − f]` for `φ(u) = u^p`, scaling `λ = 1`.
    Modular(f64),
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_p = |arg: &str| -> Result<f64> {
            let p: f64 = arg.parse().map_err(|_| invalid(format!("invalid exponent in metric `{s}`")))?;
            if !(p >= 1.0) || !p.is_finite() {
                return Err(invalid(format!("metric exponent must be finite and >= 1, got {p}")));
            }
            Ok(p)
        };
        match s.split_once(':') {
            None if s == "sup" => Ok(Metric::Sup),
            Some(("lp", arg)) => Ok(Metric::Lp(parse_p(arg)?)),
            Some(("modular", arg)) => Ok(Metric::Modular(parse_p(arg)?)),
            _ => Err(invalid(format!("unknown metric `{s}` (expected sup, lp:<p> or modular:<p>)"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Sup => f.write_str("sup"),
            Metric::Lp(p) => write!(f, "lp:{p}"),
            Metric::Modular(p) => write!(f, "modular:{p}"),
        }
    }
}

/// `S_w f` and `f` sampled on the grid of `metric`.
pub fn approximation_fields(
    signal: TestSignal,
    kernel: &ProductKernel,
    w: f64,
    metric: Metric,
) -> Result<(SampledField, SampledField)> {
    if kernel.dims() != signal.dims() {
        return Err(Error::DimensionMismatch { expected: signal.dims(), got: kernel.dims() });
    }
    let scheme = SamplingScheme::uniform(signal.dims());
    let order = match signal {
        TestSignal::Smooth => MEAN_QUADRATURE_ORDER,
        TestSignal::Step => 1,
    };
    let means = CellMeans::from_fn(&scheme, w, &signal.support(), order, |x| signal.value(x))?;
    let (domain, shape) = signal.grid(metric);
    let exact = SampledField::from_fn(domain.clone(), &shape, |x| signal.value(x))?;
    let grid: Vec<Vec<f64>> = (0..signal.dims()).map(|d| exact.centers(d)).collect();
    let values: ArrayD<f64> =
        evaluate_operator_separable_with_tol(&means, kernel, &scheme, &grid, DEFAULT_TRUNCATION_TOL)?;
    Ok((exact.with_values(values)?, exact))
}

/// The metric of `S_w f − f`.
pub fn approximation_error(signal: TestSignal, kernel: &ProductKernel, w: f64, metric: Metric) -> Result<f64> {
    let (approx, exact) = approximation_fields(signal, kernel, w, metric)?;
    match metric {
        Metric::Sup => sup_error(&approx, &exact),
        Metric::Lp(p) => lp_norm(&approx.difference(&exact)?, p),
        Metric::Modular(p) => Ok(modular(&ModularFunction::power(p)?, &approx.difference(&exact)?)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub w: f64,
    pub metric: Metric,
    pub value: f64,
}

pub fn convergence_sweep(signal: TestSignal, kernel: &KernelSpec, metric: Metric, ws: &[f64]) -> Result<Vec<SweepRow>> {
    if ws.is_empty() {
        return Err(invalid("the w list is empty"));
    }
    if let Some(w) = ws.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(invalid(format!("w must be finite and positive, got {w}")));
    }
    let product = kernel.build_product(signal.dims())?;
    ws.iter()
        .map(|&w| {
            Ok(SweepRow { w, metric, value: approximation_error(signal, &product, w, metric)? })
        })
        .collect()
}

/// CSV with header `w,metric,value`.
pub fn write_sweep_csv(rows: &[SweepRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "w,metric,value")?;
    for row in rows {
        writeln!(out, "{},{},{:.12e}", row.w, row.metric, row.value)?;
    }
    Ok(())
}
