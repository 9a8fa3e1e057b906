mod common;

use impulse_denoise::detect::Thresholds;
use impulse_denoise::noise::{inject, inject_fvin, inject_rvin, NoiseSpec};
use impulse_denoise::pipeline::{denoise_iteration, GateMode, PixelClass};
use impulse_denoise::stream::stream_denoise;
use impulse_denoise::{denoise, median_filter, GrayImage, PipelineConfig};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Straightforward floating-point restatement of one pass, written without
/// any of the library's window types.
fn reference_pass(img: &GrayImage, t: &Thresholds, gate: GateMode) -> (GrayImage, Vec<PixelClass>) {
    let mut classes = Vec::new();
    let out = GrayImage::from_fn(img.width(), img.height(), |row, col| {
        let at = |dr: isize, dc: isize| img.get_clamped(row as isize + dr, col as isize + dc) as f64;
        let c = at(0, 0);
        let mut nine: Vec<f64> = (-1..=1).flat_map(|dr| (-1..=1).map(move |dc| (dr, dc))).map(|(dr, dc)| at(dr, dc)).collect();
        nine.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let f = |k: usize| nine[k - 1];
        let round = |x: f64| (x + 0.5).floor() as u8;

        let lines: [[(isize, isize); 2]; 4] = [[(0, 1), (0, 2)], [(1, 0), (2, 0)], [(1, 1), (2, 2)], [(1, -1), (2, -2)]];
        let similar_count = (-1..=1)
            .flat_map(|dr| (-1..=1).map(move |dc| (dr, dc)))
            .filter(|&(dr, dc)| (dr, dc) != (0, 0) && (at(dr, dc) - c).abs() <= t.t4 as f64)
            .count();
        let similar = similar_count >= t.t5 as usize;

        let class = if f(5) - f(4) > t.t1 as f64 || f(6) - f(5) > t.t1 as f64 {
            let dmin = lines
                .iter()
                .map(|[(nr, nc), (fr, fc)]| {
                    (c - at(*nr, *nc)).abs() + (c - at(-nr, -nc)).abs()
                        + 0.5 * ((c - at(*fr, *fc)).abs() + (c - at(-fr, -fc)).abs())
                })
                .fold(f64::INFINITY, f64::min);
            if dmin > t.t2 as f64 || !similar {
                PixelClass::NoisyEdge
            } else {
                PixelClass::KeepEdge
            }
        } else if [f(4), f(5), f(6)].iter().all(|&v| (v - c).abs() > t.t3 as f64) {
            PixelClass::Disordered
        } else if gate == GateMode::SkipExtremeCheck {
            PixelClass::KeepSmooth
        } else if f(9) - c < t.t4 as f64 || c - f(1) < t.t4 as f64 {
            if gate == GateMode::Active && similar {
                PixelClass::RescuedCandidate
            } else {
                PixelClass::NoisySmooth
            }
        } else {
            PixelClass::KeepSmooth
        };
        classes.push(class);

        match class {
            PixelClass::NoisySmooth => round((f(4) + f(5) + f(6)) / 3.0),
            PixelClass::Disordered => {
                let mut best = (f64::INFINITY, 0.0);
                for [(nr, nc), _] in &lines {
                    let (a, b) = (at(*nr, *nc), at(-nr, -nc));
                    if (a - b).abs() < best.0 {
                        best = ((a - b).abs(), (a + b) / 2.0);
                    }
                }
                round(best.1)
            }
            PixelClass::NoisyEdge => {
                let mut best = (f64::INFINITY, 0.0);
                for [(nr, nc), (fr, fc)] in &lines {
                    let mut v = [at(-fr, -fc), at(-nr, -nc), at(*nr, *nc), at(*fr, *fc)];
                    let mean = v.iter().sum::<f64>() / 4.0;
                    let spread: f64 = v.iter().map(|x| (x - mean).abs()).sum();
                    if spread < best.0 {
                        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                        best = (spread, (v[1] + v[2]) / 2.0);
                    }
                }
                round(best.1)
            }
            _ => c as u8,
        }
    })
    .unwrap();
    (out, classes)
}

#[test]
fn pass_matches_floating_point_reference() {
    let gates = [GateMode::Active, GateMode::Bypass, GateMode::SkipExtremeCheck];
    let mut rng = common::Rng::new(3);
    for i in 0..150u64 {
        let (w, h) = (rng.range(5, 40), rng.range(5, 40));
        let img = if i % 2 == 0 {
            common::random_scene(w, h, rng.unit() * 0.5, i)
        } else {
            common::random_pixels(w, h, i)
        };
        let thresholds = if i < 50 {
            Thresholds::default()
        } else {
            Thresholds {
                t1: rng.below(80) as u8,
                t2: rng.below(400) as u32,
                t3: rng.below(80) as u8,
                t4: rng.below(60) as u8,
                t5: rng.below(9) as u8,
            }
        };
        let cfg = PipelineConfig { thresholds, ..PipelineConfig::default() };
        let gate = gates[i as usize % 3];
        let (expected, _) = reference_pass(&img, &thresholds, gate);
        let (got, _) = denoise_iteration(&img, &cfg, gate).unwrap();
        assert_eq!(got, expected, "image {i} ({w}x{h}) gate {gate:?} {thresholds}");
    }
}

#[test]
fn median_matches_sorting_oracle() {
    for seed in 0..40 {
        let img = common::random_pixels(17 + seed as usize % 9, 11 + seed as usize % 7, seed);
        for k in [3, 5] {
            assert_eq!(median_filter(&img, k).unwrap(), common::brute_force_median(&img, k));
        }
    }
}

#[test]
fn stream_engine_reproduces_frame_pipeline() {
    let mut rng = common::Rng::new(11);
    for i in 0..40u64 {
        let (w, h) = (rng.range(5, 50), rng.range(5, 50));
        let img = common::random_scene(w, h, rng.unit() * 0.4, i);
        let cfg = PipelineConfig {
            iterations: 1 + (i % 3) as u32,
            first_pass: [GateMode::Active, GateMode::Bypass, GateMode::SkipExtremeCheck][i as usize % 3],
            ..PipelineConfig::default()
        };
        let frame = denoise(&img, &cfg).unwrap();
        let stream = stream_denoise(&img, &cfg).unwrap();
        assert_eq!(frame.image, stream.image, "image {i} {w}x{h}");
        assert_eq!(frame.stats, stream.stats);
    }
}

/// Independent restatement of the documented injection bitstream.
fn reference_rvin(img: &GrayImage, p: f64, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let data = img
        .as_raw()
        .iter()
        .map(|&px| {
            let u = unit();
            let v = unit();
            if u < p {
                ((v * 256.0) as u32).min(255) as u8
            } else {
                px
            }
        })
        .collect();
    GrayImage::new(img.width(), img.height(), data).unwrap()
}

#[test]
fn rvin_matches_reference_bitstream() {
    let img = common::random_pixels(64, 48, 5);
    for (p, seed) in [(0.0, 1), (0.1, 2), (0.37, 3), (1.0, 4)] {
        let (noisy, _) = inject_rvin(&img, &NoiseSpec::rvin(p, seed)).unwrap();
        assert_eq!(noisy, reference_rvin(&img, p, seed));
    }
}

#[test]
fn rvin_density_within_binomial_interval() {
    let img = GrayImage::filled(256, 256, 128).unwrap();
    let n = img.len() as f64;
    let p = 0.1;
    let z = 3.2905;
    for seed in 0..5 {
        let (_, mask) = inject_rvin(&img, &NoiseSpec::rvin(p, seed)).unwrap();
        let half = z * (p * (1.0 - p) / n).sqrt();
        let fraction = mask.fraction();
        assert!((fraction - p).abs() <= half, "seed {seed}: fraction {fraction}");
    }
}

#[test]
fn rvin_values_uniform_by_chi_square() {
    let img = GrayImage::filled(256, 256, 0).unwrap();
    let (noisy, mask) = inject_rvin(&img, &NoiseSpec::rvin(0.1, 42)).unwrap();
    let mut bins = [0u64; 16];
    for (v, &hit) in noisy.as_raw().iter().zip(mask.as_slice()) {
        if hit {
            bins[*v as usize / 16] += 1;
        }
    }
    let total: u64 = bins.iter().sum();
    let expected = total as f64 / 16.0;
    let stat: f64 = bins.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(15.0).unwrap().inverse_cdf(0.999);
    assert!(stat < critical, "chi-square {stat} >= {critical}");
}

#[test]
fn fvin_values_stay_in_their_bands() {
    let img = GrayImage::filled(128, 128, 128).unwrap();
    for m in [0u8, 5, 30] {
        let (noisy, mask) = inject_fvin(&img, &NoiseSpec::fvin(0.2, 0.2, m, m as u64)).unwrap();
        let (mut low, mut high) = (0usize, 0usize);
        for (v, &hit) in noisy.as_raw().iter().zip(mask.as_slice()) {
            if hit {
                assert!(*v <= m || *v >= 255 - m, "value {v} outside bands for m={m}");
                if *v <= m {
                    low += 1;
                } else {
                    high += 1;
                }
            } else {
                assert_eq!(*v, 128);
            }
        }
        let n = img.len() as f64;
        let half = 3.2905 * (0.2 * 0.8 / n).sqrt();
        assert!((low as f64 / n - 0.2).abs() <= half);
        assert!((high as f64 / n - 0.2).abs() <= half);
    }
}

#[test]
fn zero_density_is_identity() {
    let img = common::random_pixels(31, 9, 1);
    let (noisy, mask) = inject(&img, &NoiseSpec::rvin(0.0, 9)).unwrap();
    assert_eq!(noisy, img);
    assert_eq!(mask.count(), 0);
}
