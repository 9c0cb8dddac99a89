//! Threshold binarization and phase fractions.
//!
//! Otsu's method serves as a generic gray-to-binary step; it maximizes the
//! between-class variance of the 256-bin histogram.

use super::StepImage;
use crate::error::{Error, Result};

fn histogram(image: &StepImage) -> [f64; 256] {
    let mut bins = [0.0; 256];
    for &v in image.pixels().iter() {
        bins[v.round().clamp(0.0, 255.0) as usize] += 1.0;
    }
    bins
}

/// Otsu threshold, `None` when the histogram has a single occupied bin.
///
/// Pixels with level `> t` form the bright class. When several thresholds
/// reach the maximal between-class variance (empty bins between the modes)
/// their mean is returned.
pub fn otsu_threshold(image: &StepImage) -> Option<f64> {
    let bins = histogram(image);
    let total: f64 = bins.iter().sum();
    let total_mass: f64 = bins.iter().enumerate().map(|(i, c)| i as f64 * c).sum();
    let mut variances = [f64::NEG_INFINITY; 255];
    let (mut weight0, mut mass0) = (0.0, 0.0);
    for t in 0..255 {
        weight0 += bins[t];
        mass0 += t as f64 * bins[t];
        let weight1 = total - weight0;
        if weight0 == 0.0 || weight1 == 0.0 {
            continue;
        }
        let mean0 = mass0 / weight0;
        let mean1 = (total_mass - mass0) / weight1;
        variances[t] = weight0 * weight1 * (mean0 - mean1).powi(2);
    }
    let best = variances.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return None;
    }
    let ties: Vec<usize> = (0..255)
        .filter(|&t| variances[t] >= best * (1.0 - 1e-12))
        .collect();
    Some(ties.iter().sum::<usize>() as f64 / ties.len() as f64)
}

/// Maps pixels above the threshold to 255 and the rest to 0. Without a
/// threshold Otsu's is used; a constant image then maps to all 0.
pub fn binarize(image: &StepImage, threshold: Option<f64>) -> StepImage {
    let threshold = match threshold.or_else(|| otsu_threshold(image)) {
        Some(t) => t,
        None => f64::INFINITY,
    };
    let pixels = image.pixels().mapv(|v| if v > threshold { 255.0 } else { 0.0 });
    StepImage::new(pixels).expect("binary levels are in range")
}

/// `(white_fraction, black_fraction)` of a binary image.
pub fn phase_fractions(binary: &StepImage) -> Result<(f64, f64)> {
    let mut white = 0usize;
    for &v in binary.pixels().iter() {
        if v == 255.0 {
            white += 1;
        } else if v != 0.0 {
            return Err(Error::NotBinary(v));
        }
    }
    let n = binary.pixels().len();
    let white_fraction = white as f64 / n as f64;
    Ok((white_fraction, (n - white) as f64 / n as f64))
}
