//! Grayscale image container, replication padding, window extraction,
//! the nine-element sorter and PSNR/MSE metrics.

use crate::error::{Error, Result};

/// Peak intensity of an 8-bit image.
pub const PEAK: u8 = 255;

/// Row-major 8-bit grayscale image with a top-left origin.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "width and height must be at least 1",
            });
        }
        if width.checked_mul(height) != Some(data.len()) {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "pixel buffer length does not equal width * height",
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    /// Pixel at `(row, col)`. Panics when out of range.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        assert!(row < self.height && col < self.width, "pixel out of range");
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        assert!(row < self.height && col < self.width, "pixel out of range");
        self.data[row * self.width + col] = value;
    }

    /// Pixel at a signed coordinate, clamped to the nearest edge pixel.
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize) -> u8 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.data[r * self.width + c]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    /// Rejects images smaller than `min` x `min`.
    pub fn require_at_least(&self, min: usize) -> Result<()> {
        if self.width < min || self.height < min {
            return Err(Error::TooSmall {
                width: self.width,
                height: self.height,
                min,
            });
        }
        Ok(())
    }

    fn check_window(&self, row: usize, col: usize, radius: usize) -> Result<()> {
        if row < radius
            || col < radius
            || row + radius >= self.height
            || col + radius >= self.width
        {
            return Err(Error::WindowOutOfBounds {
                row,
                col,
                radius,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }

    /// 3x3 neighborhood centered at `(row, col)`; the whole window must lie inside the image.
    pub fn window3(&self, row: usize, col: usize) -> Result<Window3> {
        self.check_window(row, col, 1)?;
        Ok(self.window3_unchecked(row, col))
    }

    /// 5x5 neighborhood centered at `(row, col)`; the whole window must lie inside the image.
    pub fn window5(&self, row: usize, col: usize) -> Result<Window5> {
        self.check_window(row, col, 2)?;
        Ok(self.window5_unchecked(row, col))
    }

    #[inline]
    pub(crate) fn window3_unchecked(&self, row: usize, col: usize) -> Window3 {
        let mut p = [0u8; 9];
        for (dr, chunk) in p.chunks_exact_mut(3).enumerate() {
            let start = (row + dr - 1) * self.width + col - 1;
            chunk.copy_from_slice(&self.data[start..start + 3]);
        }
        Window3 { p }
    }

    #[inline]
    pub(crate) fn window5_unchecked(&self, row: usize, col: usize) -> Window5 {
        let mut p = [0u8; 25];
        for (dr, chunk) in p.chunks_exact_mut(5).enumerate() {
            let start = (row + dr - 2) * self.width + col - 2;
            chunk.copy_from_slice(&self.data[start..start + 5]);
        }
        Window5 { p }
    }
}

/// Pads `img` by `margin` pixels on every side, replicating the nearest edge pixel.
pub fn pad_replicate(img: &GrayImage, margin: usize) -> GrayImage {
    if margin == 0 {
        return img.clone();
    }
    let m = margin as isize;
    let width = img.width + 2 * margin;
    let height = img.height + 2 * margin;
    let mut data = Vec::with_capacity(width * height);
    for row in 0..height as isize {
        let src = img.row((row - m).clamp(0, img.height as isize - 1) as usize);
        let (first, last) = (src[0], src[src.len() - 1]);
        data.extend(std::iter::repeat_n(first, margin));
        data.extend_from_slice(src);
        data.extend(std::iter::repeat_n(last, margin));
    }
    GrayImage {
        width,
        height,
        data,
    }
}

/// 3x3 window in row-major P1..P9 layout; `p[4]` (P5) is the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window3 {
    pub p: [u8; 9],
}

impl Window3 {
    pub const CENTER: usize = 4;

    pub fn new(p: [u8; 9]) -> Self {
        Self { p }
    }

    #[inline]
    pub fn center(&self) -> u8 {
        self.p[Self::CENTER]
    }

    /// The eight values around the center, in P-index order.
    pub fn neighbors(&self) -> impl Iterator<Item = u8> + '_ {
        self.p
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != Self::CENTER)
            .map(|(_, &v)| v)
    }

    pub fn min(&self) -> u8 {
        *self.p.iter().min().unwrap()
    }

    pub fn max(&self) -> u8 {
        *self.p.iter().max().unwrap()
    }
}

/// 5x5 window in row-major P1..P25 layout; `p[12]` (P13) is the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window5 {
    pub p: [u8; 25],
}

impl Window5 {
    pub const CENTER: usize = 12;

    pub fn new(p: [u8; 25]) -> Self {
        Self { p }
    }

    #[inline]
    pub fn center(&self) -> u8 {
        self.p[Self::CENTER]
    }

    /// Value at 1-based P-index, as the pixels are numbered in the layout.
    #[inline]
    pub fn at(&self, index: usize) -> u8 {
        self.p[index - 1]
    }

    /// The inner 3x3 neighborhood sharing this window's center.
    pub fn inner(&self) -> Window3 {
        let p = &self.p;
        Window3 {
            p: [p[6], p[7], p[8], p[11], p[12], p[13], p[16], p[17], p[18]],
        }
    }

    pub fn min(&self) -> u8 {
        *self.p.iter().min().unwrap()
    }

    pub fn max(&self) -> u8 {
        *self.p.iter().max().unwrap()
    }
}

/// The nine values of a [`Window3`] in nondecreasing order, F1..F9.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SortedNine {
    pub f: [u8; 9],
}

impl SortedNine {
    /// 1-based access: `f(5)` is the median.
    #[inline]
    pub fn f(&self, k: usize) -> u8 {
        self.f[k - 1]
    }

    pub fn median(&self) -> u8 {
        self.f[4]
    }
}

// 25 compare-exchange units in 7 layers.
const SORT9_NETWORK: [(usize, usize); 25] = [
    (0, 3),
    (1, 7),
    (2, 5),
    (4, 8),
    (0, 7),
    (2, 4),
    (3, 8),
    (5, 6),
    (0, 2),
    (1, 3),
    (4, 5),
    (7, 8),
    (1, 4),
    (3, 6),
    (5, 7),
    (0, 1),
    (2, 4),
    (3, 5),
    (6, 8),
    (2, 3),
    (4, 5),
    (6, 7),
    (1, 2),
    (3, 4),
    (5, 6),
];

/// Sorts a 3x3 window with a fixed compare-exchange network, the shape a
/// pipelined hardware sorter takes.
#[inline]
pub fn sort9(w: &Window3) -> SortedNine {
    let mut f = w.p;
    for &(a, b) in SORT9_NETWORK.iter() {
        let (lo, hi) = (f[a].min(f[b]), f[a].max(f[b]));
        f[a] = lo;
        f[b] = hi;
    }
    SortedNine { f }
}

fn check_same_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.dimensions() != b.dimensions() {
        return Err(Error::DimensionMismatch {
            left: a.dimensions(),
            right: b.dimensions(),
        });
    }
    Ok(())
}

/// Sum of squared differences, accumulated exactly.
pub fn squared_error_sum(a: &GrayImage, b: &GrayImage) -> Result<u64> {
    check_same_dims(a, b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| {
            let d = x.abs_diff(y) as u64;
            d * d
        })
        .sum())
}

/// Mean squared error between two equally sized images.
pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    let sse = squared_error_sum(a, b)?;
    Ok(sse as f64 / a.len() as f64)
}

/// PSNR in decibels with peak 255; identical images give `f64::INFINITY`.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        return f64::INFINITY;
    }
    let peak = PEAK as f64;
    10.0 * (peak * peak / mse).log10()
}
