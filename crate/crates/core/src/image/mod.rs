//! Gray-scale images as step functions and the reconstruction / upscaling
//! driver built on the sampling operator.
//!
//! Coordinates: the first array index is the row (`y`), the second the column
//! (`x`). Pixel `(i, j)`, 1-based, is the cell `(i−1, i] × (j−1, j]`.

mod binarize;
mod pgm;

use ndarray::Array2;

use crate::error::{invalid, Result};
use crate::kernels::{KernelSpec, ProductKernel};
use crate::sampling::{
    evaluate_operator_separable_with_tol, step_cell_means_with, Extension, SamplingScheme,
    DEFAULT_TRUNCATION_TOL,
};

pub use binarize::{binarize, otsu_threshold, phase_fractions};
pub use pgm::{decode_pgm, encode_pgm, encode_pgm_ascii, load_image, save_image};

/// Pixel matrix `a_ij` with gray levels in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepImage {
    pixels: Array2<f64>,
}

impl StepImage {
    pub fn new(pixels: Array2<f64>) -> Result<Self> {
        if pixels.nrows() == 0 || pixels.ncols() == 0 {
            return Err(invalid("images need at least one row and one column"));
        }
        if let Some(v) = pixels.iter().find(|v| !(0.0..=255.0).contains(*v)) {
            return Err(invalid(format!("gray level {v} outside [0, 255]")));
        }
        Ok(Self { pixels })
    }

    /// Builds an image from `f(row, col)` (0-based).
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(Array2::from_shape_fn((height, width), |(i, j)| f(i, j)))
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::from_fn(height, width, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.pixels.ncols()
    }

    pub fn height(&self) -> usize {
        self.pixels.nrows()
    }

    pub fn pixels(&self) -> &Array2<f64> {
        &self.pixels
    }

    pub fn into_pixels(self) -> Array2<f64> {
        self.pixels
    }
}

/// Parameters of [`reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionConfig {
    pub kernel: KernelSpec,
    pub w: f64,
    /// Integer upscaling factor.
    pub scale: usize,
    /// Per-factor truncation tolerance.
    pub truncation_tol: f64,
    /// How the image continues outside its frame.
    pub boundary: Extension,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            kernel: KernelSpec::Jackson { k: 12, alpha: 1.0 },
            w: 40.0,
            scale: 6,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
            boundary: Extension::Clamp,
        }
    }
}

impl ReconstructionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0) || !self.w.is_finite() {
            return Err(invalid(format!("w must be finite and positive, got {}", self.w)));
        }
        if self.scale == 0 {
            return Err(invalid("scale must be at least 1"));
        }
        if !(self.truncation_tol > 0.0) {
            return Err(invalid("truncation tolerance must be positive"));
        }
        Ok(())
    }
}

/// Samples `S_w I` at the centers of the fine pixels of a grid `scale` times
/// denser than the input and quantizes to gray levels (round half away from
/// zero, clamp to `[0, 255]`).
pub fn reconstruct(image: &StepImage, config: &ReconstructionConfig) -> Result<StepImage> {
    config.validate()?;
    let kernel = config.kernel.build_product(2)?;
    reconstruct_with_kernel(image, &kernel, config)
}

/// As [`reconstruct`] with a prebuilt bivariate kernel (`config.kernel` is ignored).
pub fn reconstruct_with_kernel(
    image: &StepImage,
    kernel: &ProductKernel,
    config: &ReconstructionConfig,
) -> Result<StepImage> {
    let field = reconstruct_field(image, kernel, config)?;
    StepImage::new(field.mapv(|v| v.round().clamp(0.0, 255.0)))
}

/// Unquantized values of `S_w I` on the output grid.
pub fn reconstruct_field(
    image: &StepImage,
    kernel: &ProductKernel,
    config: &ReconstructionConfig,
) -> Result<Array2<f64>> {
    config.validate()?;
    let scheme = SamplingScheme::uniform(2);
    let means = step_cell_means_with(image, &scheme, config.w, config.boundary)?;
    let s = config.scale as f64;
    let centers = |count: usize| -> Vec<f64> {
        (1..=count * config.scale).map(|i| (i as f64 - 0.5) / s).collect()
    };
    let grid = vec![centers(image.height()), centers(image.width())];
    let values = evaluate_operator_separable_with_tol(&means, kernel, &scheme, &grid, config.truncation_tol)?;
    Ok(values
        .into_dimensionality::<ndarray::Ix2>()
        .expect("two-dimensional grid"))
}

/// Block-mean reduction by `factor`, rounded to whole gray levels.
pub fn downsample_mean(image: &StepImage, factor: usize) -> Result<StepImage> {
    if factor == 0 {
        return Err(invalid("downsampling factor must be positive"));
    }
    if image.height() % factor != 0 || image.width() % factor != 0 {
        return Err(invalid(format!(
            "factor {factor} does not divide the image size {}x{}",
            image.width(),
            image.height()
        )));
    }
    let (h, w) = (image.height() / factor, image.width() / factor);
    let area = (factor * factor) as f64;
    StepImage::from_fn(h, w, |i, j| {
        let block = image
            .pixels
            .slice(ndarray::s![i * factor..(i + 1) * factor, j * factor..(j + 1) * factor]);
        (block.sum() / area).round()
    })
}

/// Pixel replication by an integer factor.
pub fn upscale_nearest(image: &StepImage, factor: usize) -> Result<StepImage> {
    if factor == 0 {
        return Err(invalid("upscaling factor must be positive"));
    }
    StepImage::from_fn(image.height() * factor, image.width() * factor, |i, j| {
        image.pixels[[i / factor, j / factor]]
    })
}

/// Peak signal-to-noise ratio in dB for peak 255; infinite for identical images.
pub fn psnr(reference: &StepImage, test: &StepImage) -> Result<f64> {
    if reference.pixels.dim() != test.pixels.dim() {
        return Err(crate::error::Error::GridMismatch);
    }
    let n = reference.pixels.len() as f64;
    let mse = reference
        .pixels
        .iter()
        .zip(test.pixels.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}
