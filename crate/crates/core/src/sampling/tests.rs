use super::*;
use crate::kernels::{make_central_bspline, make_fejer, make_jackson, make_product, moment_m_beta, KernelSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_image(seed: u64, h: usize, w: usize) -> StepImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StepImage::from_fn(h, w, |_, _| f64::from(rng.gen_range(0u8..=255))).unwrap()
}

/// Midpoint-rule cell mean of the step image on an `n × n` subgrid.
fn brute_cell_mean(image: &StepImage, cell: &[(f64, f64)], n: usize) -> f64 {
    let (ry, rx) = (cell[0], cell[1]);
    let mut acc = 0.0;
    for a in 0..n {
        let y = ry.0 + (ry.1 - ry.0) * (a as f64 + 0.5) / n as f64;
        for b in 0..n {
            let x = rx.0 + (rx.1 - rx.0) * (b as f64 + 0.5) / n as f64;
            let (i, j) = (y.ceil() as i64, x.ceil() as i64);
            if i >= 1 && j >= 1 && i as usize <= image.height() && j as usize <= image.width() {
                acc += image.pixels()[[i as usize - 1, j as usize - 1]];
            }
        }
    }
    acc / (n * n) as f64
}

fn half_shifted(lo: i64, hi: i64) -> NodeSequence {
    NodeSequence::explicit(lo, (lo..=hi).map(|k| k as f64 + 0.5).collect()).unwrap()
}

#[test]
fn cell_bound_examples() {
    let s2 = SamplingScheme::uniform(2);
    assert_eq!(cell_bounds(&s2, 1.0, &[0, 0]).unwrap(), vec![(0.0, 1.0), (0.0, 1.0)]);
    let s1 = SamplingScheme::uniform(1);
    assert_eq!(cell_bounds(&s1, 4.0, &[3]).unwrap(), vec![(0.75, 1.0)]);
    let seq = NodeSequence::explicit(-1, vec![-0.4, 0.0, 0.5, 1.7, 2.0]).unwrap();
    let ex = SamplingScheme::new(vec![seq]).unwrap();
    assert_eq!(cell_bounds(&ex, 1.0, &[0]).unwrap(), vec![(0.0, 0.5)]);
    assert!(matches!(cell_bounds(&ex, 1.0, &[3]), Err(Error::IndexOutOfRange { .. })));
    assert!(cell_bounds(&ex, 0.0, &[0]).is_err());
    assert!(cell_bounds(&ex, 1.0, &[0, 0]).is_err());
    assert!((ex.delta_lo() - 0.3).abs() < 1e-15 && (ex.delta_hi() - 1.2).abs() < 1e-15);
}

#[test]
fn node_sequence_validation() {
    assert!(NodeSequence::explicit(0, vec![0.0]).is_err());
    assert!(NodeSequence::explicit(0, vec![0.0, 0.0]).is_err());
    assert!(NodeSequence::explicit(0, vec![1.0, f64::NAN]).is_err());
}

#[test]
fn unit_rate_means_are_pixels() {
    let img = random_image(1, 7, 5);
    let means = step_cell_means(&img, &SamplingScheme::uniform(2), 1.0).unwrap();
    for i in 1..=7i64 {
        for j in 1..=5i64 {
            let cell = cell_bounds(means.scheme(), 1.0, &[i - 1, j - 1]).unwrap();
            let want = img.pixels()[[i as usize - 1, j as usize - 1]];
            assert_eq!(means.mean(&[i - 1, j - 1]), want);
            assert!((brute_cell_mean(&img, &cell, 100) - want).abs() < 1e-9);
        }
    }
    assert_eq!(means.mean(&[-1, 0]), 0.0);
    assert_eq!(means.mean(&[0, 5]), 0.0);
}

#[test]
fn constant_image_means() {
    let img = StepImage::constant(4, 6, 37.0).unwrap();
    for w in [0.5, 1.0, 2.0, 3.7] {
        let means = step_cell_means(&img, &SamplingScheme::uniform(2), w).unwrap();
        let bx = means.index_box();
        for ky in bx[0].0..=bx[0].1 {
            for kx in bx[1].0..=bx[1].1 {
                let cell = cell_bounds(means.scheme(), w, &[ky, kx]).unwrap();
                let inside = cell[0].0 >= 0.0 && cell[0].1 <= 4.0 && cell[1].0 >= 0.0 && cell[1].1 <= 6.0;
                if inside {
                    assert!((means.mean(&[ky, kx]) - 37.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn cell_crossing_four_pixels() {
    let img = StepImage::from_fn(2, 2, |i, j| if i == j { 0.0 } else { 255.0 }).unwrap();
    let scheme = SamplingScheme::new(vec![half_shifted(-4, 8), half_shifted(-4, 8)]).unwrap();
    let means = step_cell_means(&img, &scheme, 2.0).unwrap();
    let cell = cell_bounds(&scheme, 2.0, &[1, 1]).unwrap();
    assert_eq!(cell, vec![(0.75, 1.25), (0.75, 1.25)]);
    assert!((means.mean(&[1, 1]) - 127.5).abs() < 1e-12);
    assert!((brute_cell_mean(&img, &cell, 200) - 127.5).abs() < 1e-9);
    // every stored cell against the brute-force oracle
    let bx = means.index_box();
    for ky in bx[0].0..=bx[0].1 {
        for kx in bx[1].0..=bx[1].1 {
            let cell = cell_bounds(&scheme, 2.0, &[ky, kx]).unwrap();
            assert!((means.mean(&[ky, kx]) - brute_cell_mean(&img, &cell, 200)).abs() < 1e-9);
            assert!(means.cell_area(&[ky, kx]).unwrap() > 0.0);
        }
    }
}

#[test]
fn explicit_nodes_must_cover_the_image() {
    let img = StepImage::constant(4, 4, 1.0).unwrap();
    let scheme = SamplingScheme::new(vec![half_shifted(0, 3), half_shifted(0, 3)]).unwrap();
    assert!(step_cell_means(&img, &scheme, 1.0).is_err());
    assert!(step_cell_means(&img, &SamplingScheme::uniform(1), 1.0).is_err());
    let clamp_explicit = SamplingScheme::new(vec![half_shifted(-5, 10), half_shifted(-5, 10)]).unwrap();
    assert!(step_cell_means_with(&img, &clamp_explicit, 1.0, Extension::Clamp).is_err());
}

#[test]
fn from_fn_matches_exact_step_means() {
    let img = random_image(2, 3, 4);
    let scheme = SamplingScheme::uniform(2);
    let w = 2.5;
    let exact = step_cell_means(&img, &scheme, w).unwrap();
    let f = |x: &[f64]| {
        let (i, j) = (x[0].ceil() as usize, x[1].ceil() as usize);
        img.pixels()[[i.clamp(1, 3) - 1, j.clamp(1, 4) - 1]]
    };
    // quadrature is exact only on cells inside a single pixel
    let quad = CellMeans::from_fn(&scheme, w, &[(0.0, 3.0), (0.0, 4.0)], 4, f).unwrap();
    assert_eq!(quad.index_box(), exact.index_box());
    for ky in 0..7i64 {
        for kx in 0..10i64 {
            let cell = cell_bounds(&scheme, w, &[ky, kx]).unwrap();
            let one_pixel = cell[0].0.floor() == (cell[0].1 - 1e-12).floor() && cell[1].0.floor() == (cell[1].1 - 1e-12).floor();
            if one_pixel {
                assert!((quad.mean(&[ky, kx]) - exact.mean(&[ky, kx])).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn from_fn_polynomial_means() {
    // Gauss–Legendre of order 3 is exact for cubics
    let scheme = SamplingScheme::uniform(1);
    let means = CellMeans::from_fn(&scheme, 4.0, &[(0.0, 1.0)], 3, |x| x[0].powi(3)).unwrap();
    for k in 0..4i64 {
        let (a, b) = ((k as f64) / 4.0, (k as f64 + 1.0) / 4.0);
        let want = (b.powi(4) - a.powi(4)) / 4.0 / (b - a);
        assert!((means.mean(&[k]) - want).abs() < 1e-14);
    }
    // partial overlap with the support counts as zero outside it
    let means = CellMeans::from_fn(&scheme, 1.0, &[(0.25, 0.75)], 2, |_| 1.0).unwrap();
    assert!((means.mean(&[0]) - 0.5).abs() < 1e-15);
}

#[test]
fn operator_reproduces_constants() {
    let img = StepImage::constant(6, 6, 128.0).unwrap();
    let scheme = SamplingScheme::uniform(2);
    for spec in ["bspline:3", "fejer", "jackson:12:1"] {
        let kernel = spec.parse::<KernelSpec>().unwrap().build_product(2).unwrap();
        let means = step_cell_means_with(&img, &scheme, 3.0, Extension::Clamp).unwrap();
        for x in [[0.1, 0.2], [3.0, 3.0], [5.9, 0.01], [-2.0, 8.0]] {
            let v = evaluate_operator(&means, &kernel, &scheme, &x).unwrap();
            assert!((v - 128.0).abs() < 1e-5, "{spec} at {x:?}: {v}");
        }
    }
}

#[test]
fn zero_extension_interior_constant() {
    let img = StepImage::constant(20, 20, 50.0).unwrap();
    let scheme = SamplingScheme::uniform(2);
    let kernel = KernelSpec::BSpline(3).build_product(2).unwrap();
    let means = step_cell_means(&img, &scheme, 2.0).unwrap();
    let v = evaluate_operator(&means, &kernel, &scheme, &[10.0, 10.0]).unwrap();
    assert!((v - 50.0).abs() < 1e-12);
    // at a corner the kernel reaches outside the frame and sees zeros
    let corner = evaluate_operator(&means, &kernel, &scheme, &[0.0, 0.0]).unwrap();
    assert!(corner < 50.0);
    let zero = means.map(|_| 0.0);
    assert_eq!(evaluate_operator(&zero, &kernel, &scheme, &[1.0, 2.0]).unwrap(), 0.0);
}

#[test]
fn pointwise_matches_direct_series() {
    let img = random_image(3, 5, 4);
    let scheme = SamplingScheme::uniform(2);
    let kernel = make_product(vec![make_central_bspline(3).unwrap(), make_central_bspline(4).unwrap()]).unwrap();
    let w = 1.7;
    let means = step_cell_means(&img, &scheme, w).unwrap();
    for x in [[0.3, 0.9], [2.2, 3.1], [4.9, 0.0]] {
        let mut direct = 0.0;
        for ky in -20i64..20 {
            for kx in -20i64..20 {
                let cell = cell_bounds(&scheme, w, &[ky, kx]).unwrap();
                let chi = kernel.evaluate(&[w * x[0] - ky as f64, w * x[1] - kx as f64]).unwrap();
                if chi != 0.0 {
                    direct += chi * brute_cell_mean(&img, &cell, 60);
                }
            }
        }
        let v = evaluate_operator(&means, &kernel, &scheme, &x).unwrap();
        assert!((v - direct).abs() < 1e-8, "{v} vs {direct}");
    }
}

#[test]
fn separable_matches_pointwise() {
    let img = random_image(4, 9, 11);
    let scheme = SamplingScheme::uniform(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in ["bspline:3", "jackson:12:1", "fejer"] {
        for extension in [Extension::Zero, Extension::Clamp] {
            let kernel = spec.parse::<KernelSpec>().unwrap().build_product(2).unwrap();
            let means = step_cell_means_with(&img, &scheme, 2.3, extension).unwrap();
            let gy: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..10.0)).collect();
            let gx: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..12.0)).collect();
            let grid = evaluate_operator_separable(&means, &kernel, &scheme, &[gy.clone(), gx.clone()]).unwrap();
            for (a, &y) in gy.iter().enumerate() {
                for (b, &x) in gx.iter().enumerate() {
                    let p = evaluate_operator(&means, &kernel, &scheme, &[y, x]).unwrap();
                    assert!((grid[[a, b]] - p).abs() < 1e-12, "{spec} {extension:?}: {} vs {p}", grid[[a, b]]);
                }
            }
        }
    }
}

#[test]
fn separable_one_dimensional() {
    let scheme = SamplingScheme::uniform(1);
    let kernel = make_product(vec![make_jackson(3, 1.0).unwrap()]).unwrap();
    let means = CellMeans::from_fn(&scheme, 3.0, &[(0.0, 2.0)], 5, |x| x[0].sin()).unwrap();
    let xs: Vec<f64> = (0..40).map(|i| -0.5 + 0.08 * f64::from(i)).collect();
    let grid = evaluate_operator_separable(&means, &kernel, &scheme, &[xs.clone()]).unwrap();
    for (i, &x) in xs.iter().enumerate() {
        assert_eq!(grid[[i]], evaluate_operator(&means, &kernel, &scheme, &[x]).unwrap());
    }
}

#[test]
fn separable_rejects_explicit_schemes_and_mismatches() {
    let img = StepImage::constant(2, 2, 1.0).unwrap();
    let scheme = SamplingScheme::new(vec![half_shifted(-5, 8), half_shifted(-5, 8)]).unwrap();
    let kernel = KernelSpec::BSpline(2).build_product(2).unwrap();
    let means = step_cell_means(&img, &scheme, 1.0).unwrap();
    assert!(evaluate_operator_separable(&means, &kernel, &scheme, &[vec![0.5], vec![0.5]]).is_err());
    assert!(evaluate_operator(&means, &kernel, &SamplingScheme::uniform(2), &[0.5, 0.5]).is_err());
    let k1 = KernelSpec::BSpline(2).build_product(1).unwrap();
    assert!(evaluate_operator(&means, &k1, &scheme, &[0.5]).is_err());
    assert!(evaluate_operator(&means, &kernel, &scheme, &[f64::NAN, 0.0]).is_err());
}

#[test]
fn explicit_scheme_reproduces_interior_constants() {
    // shifted integer nodes still satisfy the partition of unity for M_2
    let img = StepImage::constant(6, 6, 90.0).unwrap();
    let scheme = SamplingScheme::new(vec![half_shifted(-10, 20), half_shifted(-10, 20)]).unwrap();
    let kernel = KernelSpec::BSpline(2).build_product(2).unwrap();
    let means = step_cell_means(&img, &scheme, 1.0).unwrap();
    let v = evaluate_operator(&means, &kernel, &scheme, &[3.1, 2.6]).unwrap();
    assert!((v - 90.0).abs() < 1e-12);
}

#[test]
fn boundedness_by_first_moment() {
    let img = random_image(6, 8, 8);
    let scheme = SamplingScheme::uniform(2);
    let factor = make_fejer();
    let m0 = moment_m_beta(&factor, 0.0, 200).unwrap().upper_bound();
    let kernel = make_product(vec![factor.clone(), factor]).unwrap();
    let means = step_cell_means(&img, &scheme, 1.5).unwrap();
    let sup = img.pixels().iter().fold(0.0f64, |a, &b| a.max(b));
    let grid: Vec<f64> = (0..60).map(|i| -2.0 + 0.2 * f64::from(i)).collect();
    let vals = evaluate_operator_separable(&means, &kernel, &scheme, &[grid.clone(), grid]).unwrap();
    for &v in vals.iter() {
        assert!(v.abs() <= m0 * m0 * sup * (1.0 + 1e-6));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn means_stay_within_image_range(seed in 0u64..1000, w in 0.3f64..4.0) {
        let img = random_image(seed, 5, 6);
        let means = step_cell_means_with(&img, &SamplingScheme::uniform(2), w, Extension::Clamp).unwrap();
        let lo = img.pixels().iter().copied().fold(f64::INFINITY, f64::min);
        let hi = img.pixels().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for &m in means.values().iter() {
            prop_assert!(m >= lo - 1e-9 && m <= hi + 1e-9);
        }
    }

    #[test]
    fn nonnegative_kernels_keep_nonnegative_signals(seed in 0u64..1000, x in -2.0f64..8.0, y in -2.0f64..8.0) {
        let img = random_image(seed, 6, 6);
        let scheme = SamplingScheme::uniform(2);
        for spec in [KernelSpec::BSpline(3), KernelSpec::Jackson { k: 4, alpha: 1.0 }] {
            let kernel = spec.build_product(2).unwrap();
            let means = step_cell_means(&img, &scheme, 2.0).unwrap();
            prop_assert!(evaluate_operator(&means, &kernel, &scheme, &[y, x]).unwrap() >= -1e-8);
        }
    }

    #[test]
    fn separable_equals_pointwise_on_random_probes(seed in 0u64..1000, x in -1.0f64..7.0, y in -1.0f64..7.0) {
        let img = random_image(seed, 6, 6);
        let scheme = SamplingScheme::uniform(2);
        let kernel = KernelSpec::BSpline(3).build_product(2).unwrap();
        let means = step_cell_means(&img, &scheme, 1.3).unwrap();
        let grid = evaluate_operator_separable(&means, &kernel, &scheme, &[vec![y], vec![x]]).unwrap();
        let p = evaluate_operator(&means, &kernel, &scheme, &[y, x]).unwrap();
        prop_assert!((grid[[0, 0]] - p).abs() < 1e-12);
    }
}
