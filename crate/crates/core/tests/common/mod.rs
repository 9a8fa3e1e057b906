#![allow(dead_code)]

use impulse_denoise::detect::Thresholds;
use impulse_denoise::noise::{inject_rvin, NoiseSpec};
use impulse_denoise::{GrayImage, GateMode, PipelineConfig};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Rng(pub ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        lo + self.below((hi_inclusive - lo + 1) as u64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Piecewise-smooth content with a few regions, plus optional RVIN.
pub fn random_scene(w: usize, h: usize, density: f64, seed: u64) -> GrayImage {
    let mut rng = Rng::new(seed);
    let levels: Vec<u8> = (0..4).map(|_| rng.below(256) as u8).collect();
    let (cx, cy) = (rng.range(0, w) as f64, rng.range(0, h) as f64);
    let radius = 1.0 + rng.unit() * (w.max(h) as f64) / 2.0;
    let split = rng.range(0, w);
    let grad = rng.unit() * 2.0;
    let clean = GrayImage::from_fn(w, h, |r, c| {
        let (x, y) = (c as f64, r as f64);
        let inside = (x - cx).powi(2) + (y - cy).powi(2) < radius * radius;
        let base = match (inside, c < split) {
            (true, true) => levels[0],
            (true, false) => levels[1],
            (false, true) => levels[2],
            (false, false) => levels[3],
        } as f64;
        (base + grad * ((r + c) % 8) as f64).clamp(0.0, 255.0) as u8
    })
    .unwrap();
    inject_rvin(&clean, &NoiseSpec::rvin(density, seed ^ 0xABCD)).unwrap().0
}

/// Uniform random pixels.
pub fn random_pixels(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut rng = Rng::new(seed);
    GrayImage::from_fn(w, h, |_, _| rng.below(256) as u8).unwrap()
}

/// Exact median of the replication-padded k x k neighborhood by sorting a copy.
pub fn brute_force_median(img: &GrayImage, k: usize) -> GrayImage {
    let r = (k / 2) as isize;
    GrayImage::from_fn(img.width(), img.height(), |row, col| {
        let mut v = Vec::with_capacity(k * k);
        for dr in -r..=r {
            for dc in -r..=r {
                v.push(img.get_clamped(row as isize + dr, col as isize + dc));
            }
        }
        v.sort();
        v[v.len() / 2]
    })
    .unwrap()
}

pub fn thresholds_strategy() -> impl Strategy<Value = Thresholds> {
    (any::<u8>(), 0u32..1200, any::<u8>(), any::<u8>(), 0u8..=8).prop_map(
        |(t1, t2, t3, t4, t5)| Thresholds { t1, t2, t3, t4, t5 },
    )
}

pub fn gate_strategy() -> impl Strategy<Value = GateMode> {
    prop_oneof![
        Just(GateMode::Active),
        Just(GateMode::Bypass),
        Just(GateMode::SkipExtremeCheck)
    ]
}

pub fn config_strategy() -> impl Strategy<Value = PipelineConfig> {
    (thresholds_strategy(), 1u32..=3, gate_strategy(), any::<bool>()).prop_map(
        |(thresholds, iterations, first_pass, literal)| PipelineConfig {
            thresholds,
            iterations,
            first_pass,
            weighting: if literal {
                impulse_denoise::detect::DistanceWeighting::Literal
            } else {
                impulse_denoise::detect::DistanceWeighting::Outside
            },
        },
    )
}

/// Small image with either uniform-random or piecewise-smooth noisy content.
pub fn image_strategy(max_w: usize, max_h: usize) -> impl Strategy<Value = GrayImage> {
    (5..=max_w, 5..=max_h, any::<u64>(), 0.0f64..0.5, any::<bool>()).prop_map(
        |(w, h, seed, density, scene)| {
            if scene {
                random_scene(w, h, density, seed)
            } else {
                random_pixels(w, h, seed)
            }
        },
    )
}
