//! Impulse-noise detection and restoration for 8-bit grayscale images.
//!
//! Each pixel is classified from its 3x3 and 5x5 neighborhoods as a kept
//! edge, noisy edge, disordered, noisy smooth or kept smooth pixel, and the
//! class selects one of three restorers. The crate also provides seeded
//! noise injectors, median baselines, PSNR evaluation, PGM I/O and a
//! line-buffered streaming engine that reproduces the frame pipeline
//! bit for bit.

pub mod detect;
pub mod error;
pub mod eval;
pub mod img;
pub mod noise;
pub mod pgm;
pub mod pipeline;
pub mod restore;
pub mod stream;
pub mod synth;

pub use error::{Error, Result};
pub use img::{GrayImage, SortedNine, Window3, Window5};
pub use pipeline::{denoise, median_filter, Denoised, GateMode, PixelClass, PipelineConfig};
pub use stream::stream_denoise;
