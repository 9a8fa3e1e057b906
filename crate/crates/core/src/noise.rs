//! Seeded impulse-noise injection.
//!
//! The random stream is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Pixels are visited in raster order and each
//! one consumes exactly two 64-bit outputs, whether or not it is replaced:
//!
//! 1. decision draw `u = (next_u64 >> 11) * 2^-53`, uniform in `[0, 1)`;
//! 2. value draw `v`, mapped the same way and scaled onto the inclusive
//!    replacement range `[lo, hi]` as `lo + floor(v * (hi - lo + 1))`.
//!
//! RVIN replaces when `u < p`, with range `[0, 255]`. FVIN replaces with the
//! low range `[0, m]` when `u < p1`, with the high range `[255 - m, 255]` when
//! `p1 <= u < p1 + p2`, and keeps the pixel otherwise.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::img::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// Random-valued impulses: replacement drawn from the full intensity range.
    Rvin { p: f64 },
    /// Fixed-valued impulses near either end of the range; `m = 0` is salt and pepper.
    Fvin { p1: f64, p2: f64, m: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn rvin(p: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Rvin { p },
            seed,
        }
    }

    pub fn fvin(p1: f64, p2: f64, m: u8, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Fvin { p1, p2, m },
            seed,
        }
    }

    /// Total corruption probability.
    pub fn density(&self) -> f64 {
        match self.kind {
            NoiseKind::Rvin { p } => p,
            NoiseKind::Fvin { p1, p2, .. } => p1 + p2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} = {v} is not a probability in [0, 1]"
                )))
            }
        };
        match self.kind {
            NoiseKind::Rvin { p } => prob("p", p),
            NoiseKind::Fvin { p1, p2, m } => {
                prob("p1", p1)?;
                prob("p2", p2)?;
                prob("p1 + p2", p1 + p2)?;
                if m > 127 {
                    return Err(Error::InvalidParameter(format!(
                        "margin m = {m} exceeds 127"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Per-pixel record of which pixels the injector replaced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl NoiseMask {
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / self.bits.len() as f64
    }

    /// Mask as a PGM-ready image: 255 where corrupted, 0 elsewhere.
    pub fn to_image(&self) -> GrayImage {
        let data = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        GrayImage::new(self.width, self.height, data).expect("mask dimensions are valid")
    }
}

struct UnitStream(ChaCha8Rng);

impl UnitStream {
    #[inline]
    fn next_unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    fn next_in(&mut self, lo: u8, hi: u8) -> u8 {
        let span = (hi - lo) as f64 + 1.0;
        let offset = (self.next_unit() * span) as u16;
        lo + offset.min((hi - lo) as u16) as u8
    }
}

/// Applies `spec` to `img`, returning the noisy image and the corruption mask.
pub fn inject(img: &GrayImage, spec: &NoiseSpec) -> Result<(GrayImage, NoiseMask)> {
    spec.validate()?;
    let mut rng = UnitStream(ChaCha8Rng::seed_from_u64(spec.seed));
    let mut data = img.as_raw().to_vec();
    let mut bits = vec![false; data.len()];
    for (px, hit) in data.iter_mut().zip(bits.iter_mut()) {
        let u = rng.next_unit();
        let range = match spec.kind {
            NoiseKind::Rvin { p } => (u < p).then_some((0, 255)),
            NoiseKind::Fvin { p1, p2, m } => {
                if u < p1 {
                    Some((0, m))
                } else if u < p1 + p2 {
                    Some((255 - m, 255))
                } else {
                    None
                }
            }
        };
        // The value draw is consumed even for kept pixels so that stream
        // positions do not depend on earlier decisions.
        let candidate = match range {
            Some((lo, hi)) => Some(rng.next_in(lo, hi)),
            None => {
                rng.next_unit();
                None
            }
        };
        if let Some(v) = candidate {
            *px = v;
            *hit = true;
        }
    }
    let (width, height) = img.dimensions();
    Ok((
        GrayImage::new(width, height, data)?,
        NoiseMask {
            width,
            height,
            bits,
        },
    ))
}

/// Random-valued impulse noise; `spec.kind` must be [`NoiseKind::Rvin`].
pub fn inject_rvin(img: &GrayImage, spec: &NoiseSpec) -> Result<(GrayImage, NoiseMask)> {
    match spec.kind {
        NoiseKind::Rvin { .. } => inject(img, spec),
        _ => Err(Error::InvalidParameter("expected an RVIN noise spec".into())),
    }
}

/// Fixed-valued impulse noise; `spec.kind` must be [`NoiseKind::Fvin`].
pub fn inject_fvin(img: &GrayImage, spec: &NoiseSpec) -> Result<(GrayImage, NoiseMask)> {
    match spec.kind {
        NoiseKind::Fvin { .. } => inject(img, spec),
        _ => Err(Error::InvalidParameter("expected an FVIN noise spec".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient(w: usize, h: usize) -> GrayImage {
        GrayImage::from_fn(w, h, |r, c| ((r * 7 + c * 3) % 256) as u8).unwrap()
    }

    #[test]
    fn zero_density_is_identity() {
        let img = gradient(40, 30);
        let (out, mask) = inject_rvin(&img, &NoiseSpec::rvin(0.0, 9)).unwrap();
        assert_eq!(out, img);
        assert_eq!(mask.count(), 0);
        let (out, mask) = inject_fvin(&img, &NoiseSpec::fvin(0.0, 0.0, 20, 9)).unwrap();
        assert_eq!(out, img);
        assert_eq!(mask.count(), 0);
    }

    #[test]
    fn full_density_corrupts_everything() {
        let img = gradient(40, 30);
        let (_, mask) = inject_rvin(&img, &NoiseSpec::rvin(1.0, 3)).unwrap();
        assert_eq!(mask.count(), img.len());
    }

    #[test]
    fn pepper_only() {
        let img = gradient(20, 20);
        let (out, mask) = inject_fvin(&img, &NoiseSpec::fvin(1.0, 0.0, 0, 5)).unwrap();
        assert!(out.as_raw().iter().all(|&v| v == 0));
        assert_eq!(mask.count(), 400);
    }

    #[test]
    fn fvin_values_stay_in_their_bands() {
        let img = GrayImage::filled(128, 128, 128).unwrap();
        let (out, mask) = inject_fvin(&img, &NoiseSpec::fvin(0.05, 0.05, 10, 77)).unwrap();
        assert!(mask.count() > 0);
        for (&v, &hit) in out.as_raw().iter().zip(mask.as_slice()) {
            if hit {
                assert!(v <= 10 || v >= 245, "value {v} outside both bands");
            } else {
                assert_eq!(v, 128);
            }
        }
    }

    #[test]
    fn seeds_are_reproducible_and_distinct() {
        let img = gradient(64, 64);
        let a = inject_rvin(&img, &NoiseSpec::rvin(0.2, 42)).unwrap();
        let b = inject_rvin(&img, &NoiseSpec::rvin(0.2, 42)).unwrap();
        let c = inject_rvin(&img, &NoiseSpec::rvin(0.2, 43)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn kind_mismatch_and_bad_probabilities_are_rejected() {
        let img = gradient(8, 8);
        assert!(inject_rvin(&img, &NoiseSpec::fvin(0.1, 0.1, 0, 1)).is_err());
        assert!(inject_fvin(&img, &NoiseSpec::rvin(0.1, 1)).is_err());
        assert!(inject(&img, &NoiseSpec::rvin(1.5, 1)).is_err());
        assert!(inject(&img, &NoiseSpec::rvin(-0.1, 1)).is_err());
        assert!(inject(&img, &NoiseSpec::fvin(0.6, 0.6, 0, 1)).is_err());
        assert!(inject(&img, &NoiseSpec::fvin(0.1, 0.1, 128, 1)).is_err());
    }

    #[test]
    fn mask_image_uses_zero_and_full_scale() {
        let img = gradient(16, 16);
        let (_, mask) = inject_rvin(&img, &NoiseSpec::rvin(0.5, 8)).unwrap();
        let m = mask.to_image();
        assert!(m.as_raw().iter().all(|&v| v == 0 || v == 255));
        assert_eq!(m.as_raw().iter().filter(|&&v| v == 255).count(), mask.count());
    }
}
