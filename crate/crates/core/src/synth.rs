//! Synthetic head-slice phantoms for evaluation when no clean scan corpus is
//! at hand.
//!
//! Each phantom is an axial-slice-like picture: dark background, a bright
//! scalp ring, folded gray/white matter, dark ventricles, a few small
//! lesions, a gentle multiplicative bias field and low-amplitude texture.
//! Tissue boundaries are rendered with partial-volume supersampling and a
//! small point-spread blur, so edges are band-limited as in a real scan.
//! Shape parameters are drawn from a ChaCha8 stream seeded with `seed`.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::img::GrayImage;

struct Draw(ChaCha8Rng);

impl Draw {
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

struct Ellipse {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    cos: f64,
    sin: f64,
}

impl Ellipse {
    fn new(cx: f64, cy: f64, rx: f64, ry: f64, angle: f64) -> Self {
        Self {
            cx,
            cy,
            rx,
            ry,
            cos: angle.cos(),
            sin: angle.sin(),
        }
    }

    /// Normalized radius and polar angle of `(x, y)` in the ellipse frame.
    fn polar(&self, x: f64, y: f64) -> (f64, f64) {
        let (dx, dy) = (x - self.cx, y - self.cy);
        let u = (dx * self.cos + dy * self.sin) / self.rx;
        let v = (-dx * self.sin + dy * self.cos) / self.ry;
        ((u * u + v * v).sqrt(), v.atan2(u))
    }
}

/// Deterministic `size` x `size` phantom; different seeds vary anatomy and contrast.
pub fn phantom(size: usize, seed: u64) -> GrayImage {
    let mut d = Draw(ChaCha8Rng::seed_from_u64(seed));
    let s = size as f64;

    let head = Ellipse::new(
        s * d.range(0.47, 0.53),
        s * d.range(0.47, 0.53),
        s * d.range(0.36, 0.42),
        s * d.range(0.42, 0.47),
        d.range(-0.15, 0.15),
    );
    let scalp_width = d.range(0.06, 0.09);
    let folds = 7.0 + (d.unit() * 6.0).floor();
    let fold_depth = d.range(0.03, 0.06);
    let fold_phase = d.range(0.0, 2.0 * PI);
    let white_radius = d.range(0.55, 0.65);

    let vent_offset = s * d.range(0.04, 0.06);
    let ventricles = [
        Ellipse::new(head.cx - vent_offset, head.cy - s * 0.02, s * 0.035, s * d.range(0.08, 0.11), 0.2),
        Ellipse::new(head.cx + vent_offset, head.cy - s * 0.02, s * 0.035, s * d.range(0.08, 0.11), -0.2),
    ];
    let lesions: Vec<(Ellipse, f64)> = (0..3)
        .map(|_| {
            let r = s * d.range(0.012, 0.03);
            let a = d.range(0.0, 2.0 * PI);
            let rad = d.range(0.2, 0.6);
            (
                Ellipse::new(
                    head.cx + a.cos() * rad * head.rx,
                    head.cy + a.sin() * rad * head.ry,
                    r,
                    r * d.range(0.7, 1.3),
                    0.0,
                ),
                d.range(170.0, 230.0),
            )
        })
        .collect();

    let background = d.range(4.0, 14.0);
    let scalp = d.range(180.0, 230.0);
    let skull = d.range(20.0, 45.0);
    let gray = d.range(95.0, 125.0);
    let white = d.range(140.0, 175.0);
    let csf = d.range(30.0, 60.0);
    let bias_amp = d.range(0.05, 0.12);
    let bias_angle = d.range(0.0, 2.0 * PI);
    let texture_seed = d.0.next_u64();
    let mut tex = Draw(ChaCha8Rng::seed_from_u64(texture_seed));

    let tissue = |x: f64, y: f64| -> f64 {
        let (r, theta) = head.polar(x, y);
        if r > 1.0 {
            background
        } else if r > 1.0 - scalp_width {
            scalp
        } else if r > 1.0 - 1.6 * scalp_width {
            skull
        } else {
            let fold = 1.0 + fold_depth * (folds * theta + fold_phase).sin();
            let mut t = if r < white_radius * fold { white } else { gray };
            if ventricles.iter().any(|e| e.polar(x, y).0 <= 1.0) {
                t = csf;
            }
            for (e, level) in &lesions {
                if e.polar(x, y).0 <= 1.0 {
                    t = *level;
                }
            }
            t
        }
    };

    // Partial-volume rendering: each pixel averages a 4x4 grid of samples.
    const SUB: usize = 4;
    let mut field = vec![0.0f64; size * size];
    for row in 0..size {
        for col in 0..size {
            let mut acc = 0.0;
            for sy in 0..SUB {
                for sx in 0..SUB {
                    let x = col as f64 + (sx as f64 + 0.5) / SUB as f64;
                    let y = row as f64 + (sy as f64 + 0.5) / SUB as f64;
                    acc += tissue(x, y);
                }
            }
            field[row * size + col] = acc / (SUB * SUB) as f64;
        }
    }
    let field = blur_binomial(&field, size);

    GrayImage::from_fn(size, size, |row, col| {
        let (x, y) = (col as f64 + 0.5, row as f64 + 0.5);
        let gx = (x / s - 0.5) * bias_angle.cos() + (y / s - 0.5) * bias_angle.sin();
        let mut v = field[row * size + col] * (1.0 + bias_amp * (PI * gx).sin());
        v += tex.range(-2.0, 2.0);
        v.round().clamp(0.0, 255.0) as u8
    })
    .expect("phantom dimensions are nonzero")
}

/// Separable [1 2 1] / 4 point-spread blur with edge clamping.
fn blur_binomial(src: &[f64], size: usize) -> Vec<f64> {
    let at = |v: &[f64], r: isize, c: isize| {
        let r = r.clamp(0, size as isize - 1) as usize;
        let c = c.clamp(0, size as isize - 1) as usize;
        v[r * size + c]
    };
    let mut tmp = vec![0.0; size * size];
    for r in 0..size as isize {
        for c in 0..size as isize {
            tmp[r as usize * size + c as usize] =
                (at(src, r, c - 1) + 2.0 * at(src, r, c) + at(src, r, c + 1)) / 4.0;
        }
    }
    let mut out = vec![0.0; size * size];
    for r in 0..size as isize {
        for c in 0..size as isize {
            out[r as usize * size + c as usize] =
                (at(&tmp, r - 1, c) + 2.0 * at(&tmp, r, c) + at(&tmp, r + 1, c)) / 4.0;
        }
    }
    out
}

/// `count` phantoms with consecutive seeds starting at `seed`.
pub fn phantom_corpus(count: usize, size: usize, seed: u64) -> Vec<(String, GrayImage)> {
    (0..count as u64)
        .map(|i| (format!("phantom_{i:03}"), phantom(size, seed.wrapping_add(i))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_seed_dependent() {
        assert_eq!(phantom(64, 5), phantom(64, 5));
        assert_ne!(phantom(64, 5), phantom(64, 6));
    }

    #[test]
    fn has_dark_background_and_bright_tissue() {
        let img = phantom(128, 1);
        assert!(img.get(0, 0) < 30);
        let max = *img.as_raw().iter().max().unwrap();
        assert!(max > 150);
    }
}
