//! Per-pixel decision tree, frame-based denoising passes and median baselines.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::detect::{
    self, directional_distances_with, DistanceWeighting, EdgeNoise, EdgeTest, ExtremeCheck,
    Similarity, Thresholds,
};
use crate::error::{Error, Result};
use crate::img::{pad_replicate, sort9, GrayImage, SortedNine, Window3, Window5};
use crate::restore;

/// Smallest image the detector accepts.
pub const MIN_SIZE: usize = 5;

/// Padding needed for a full 5x5 window at every pixel.
pub const MARGIN: usize = 2;

/// Outcome of the decision tree for one pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PixelClass {
    KeepEdge,
    NoisyEdge,
    Disordered,
    NoisySmooth,
    KeepSmooth,
    /// Extreme-valued pixel saved by the similarity check.
    RescuedCandidate,
}

impl PixelClass {
    pub const ALL: [PixelClass; 6] = [
        PixelClass::KeepEdge,
        PixelClass::NoisyEdge,
        PixelClass::Disordered,
        PixelClass::NoisySmooth,
        PixelClass::KeepSmooth,
        PixelClass::RescuedCandidate,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            PixelClass::KeepEdge => "keep_edge",
            PixelClass::NoisyEdge => "noisy_edge",
            PixelClass::Disordered => "disordered",
            PixelClass::NoisySmooth => "noisy_smooth",
            PixelClass::KeepSmooth => "keep_smooth",
            PixelClass::RescuedCandidate => "rescued_candidate",
        }
    }

    /// True when the pixel passes through unchanged.
    pub fn keeps_original(self) -> bool {
        matches!(
            self,
            PixelClass::KeepEdge | PixelClass::KeepSmooth | PixelClass::RescuedCandidate
        )
    }
}

impl fmt::Display for PixelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How extreme-valued candidates in smooth areas are treated during a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateMode {
    /// Candidates similar to their neighbors are kept, the rest averaged.
    Active,
    /// Every candidate is averaged without consulting the similarity check.
    Bypass,
    /// The extreme-value check is not run; smooth pixels are kept.
    SkipExtremeCheck,
}

impl FromStr for GateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "active" | "gate" => Ok(Self::Active),
            "bypass" => Ok(Self::Bypass),
            "skip" => Ok(Self::SkipExtremeCheck),
            _ => Err(Error::InvalidParameter(format!("unknown gate mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub thresholds: Thresholds,
    /// Number of passes, at least 1.
    pub iterations: u32,
    /// Gate mode of the first pass; later passes always use [`GateMode::Active`].
    pub first_pass: GateMode,
    pub weighting: DistanceWeighting,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            thresholds: Thresholds::default(),
            iterations: 2,
            first_pass: GateMode::Bypass,
            weighting: DistanceWeighting::Outside,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be at least 1".into()));
        }
        self.thresholds.validate()
    }

    /// Gate mode for the 1-based pass number.
    pub fn gate_for(&self, pass: u32) -> GateMode {
        if pass <= 1 {
            self.first_pass
        } else {
            GateMode::Active
        }
    }

    /// Applies `key=value` lines on top of `self`. Blank lines and `#`
    /// comments are ignored. Keys: `t1`..`t5`, `iterations`, `first_pass`
    /// (`bypass`, `active`, `skip`) and `weighting` (`outside`, `literal`).
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || {
                Error::InvalidParameter(format!(
                    "line {}: invalid value '{value}' for '{key}'",
                    lineno + 1
                ))
            };
            let t = &mut self.thresholds;
            match key {
                "t1" => t.t1 = value.parse().map_err(|_| bad())?,
                "t2" => t.t2 = value.parse().map_err(|_| bad())?,
                "t3" => t.t3 = value.parse().map_err(|_| bad())?,
                "t4" => t.t4 = value.parse().map_err(|_| bad())?,
                "t5" => t.t5 = value.parse().map_err(|_| bad())?,
                "iterations" => self.iterations = value.parse().map_err(|_| bad())?,
                "first_pass" => self.first_pass = value.parse()?,
                "weighting" => self.weighting = value.parse()?,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "line {}: unknown key '{key}'",
                        lineno + 1
                    )))
                }
            }
        }
        self.validate()
    }
}

/// Runs the decision tree on one 5x5 window.
pub fn classify_window(w5: &Window5, cfg: &PipelineConfig, gate: GateMode) -> PixelClass {
    let w3 = w5.inner();
    let f = sort9(&w3);
    classify_parts(w5, &w3, &f, cfg, gate)
}

fn classify_parts(
    w5: &Window5,
    w3: &Window3,
    f: &SortedNine,
    cfg: &PipelineConfig,
    gate: GateMode,
) -> PixelClass {
    let t = &cfg.thresholds;
    let p5 = w3.center();
    let similar = || detect::similarity(w3, t.t4, t.t5) == Similarity::Similar;

    if detect::type1_edge(f, t.t1) == EdgeTest::Edge {
        let d = directional_distances_with(w5, cfg.weighting);
        return match detect::type2_edge_from(&d, t.t2) {
            EdgeNoise::NoisyEdge => PixelClass::NoisyEdge,
            EdgeNoise::CleanEdge if similar() => PixelClass::KeepEdge,
            EdgeNoise::CleanEdge => PixelClass::NoisyEdge,
        };
    }
    if detect::disorder(p5, f, t.t3) == detect::Disorder::Disordered {
        return PixelClass::Disordered;
    }
    if gate == GateMode::SkipExtremeCheck {
        return PixelClass::KeepSmooth;
    }
    match detect::noisy_pixel(p5, f, t.t4) {
        ExtremeCheck::Clean => PixelClass::KeepSmooth,
        ExtremeCheck::Candidate => match gate {
            GateMode::Active if similar() => PixelClass::RescuedCandidate,
            _ => PixelClass::NoisySmooth,
        },
    }
}

/// Classifies the pixel whose 5x5 window is centered at `(row, col)` of an
/// already padded image.
pub fn classify(
    padded: &GrayImage,
    row: usize,
    col: usize,
    cfg: &PipelineConfig,
    gate: GateMode,
) -> Result<PixelClass> {
    Ok(classify_window(&padded.window5(row, col)?, cfg, gate))
}

/// Output intensity for a classified pixel.
pub fn restore_pixel(class: PixelClass, w5: &Window5, w3: &Window3, f: &SortedNine) -> u8 {
    match class {
        PixelClass::KeepEdge | PixelClass::KeepSmooth | PixelClass::RescuedCandidate => {
            w3.center()
        }
        PixelClass::Disordered => restore::type1_edge_preserve(w3),
        PixelClass::NoisyEdge => restore::type2_edge_preserve(w5),
        PixelClass::NoisySmooth => restore::average_restore(f),
    }
}

/// Classify and restore one window.
#[inline]
pub fn process_window(w5: &Window5, cfg: &PipelineConfig, gate: GateMode) -> (PixelClass, u8) {
    let w3 = w5.inner();
    let f = sort9(&w3);
    let class = classify_parts(w5, &w3, &f, cfg, gate);
    (class, restore_pixel(class, w5, &w3, &f))
}

/// Per-class pixel counts for one pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts(pub [u64; 6]);

impl ClassCounts {
    pub fn get(&self, class: PixelClass) -> u64 {
        self.0[class.index()]
    }

    pub fn add(&mut self, class: PixelClass) {
        self.0[class.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
        self
    }
}

/// Writes `iteration,class,count` rows, one per class per pass (1-based).
pub fn write_class_counts_csv(stats: &[ClassCounts], out: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["iteration", "class", "count"])?;
    for (i, counts) in stats.iter().enumerate() {
        for class in PixelClass::ALL {
            wtr.write_record([
                (i + 1).to_string(),
                class.name().to_string(),
                counts.get(class).to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn check_input(img: &GrayImage, cfg: &PipelineConfig) -> Result<()> {
    cfg.validate()?;
    img.require_at_least(MIN_SIZE)
}

/// Classifies every pixel of `img` for one pass without restoring it.
pub fn classify_image(
    img: &GrayImage,
    cfg: &PipelineConfig,
    gate: GateMode,
) -> Result<Vec<PixelClass>> {
    check_input(img, cfg)?;
    let padded = pad_replicate(img, MARGIN);
    let (w, h) = img.dimensions();
    Ok((0..h)
        .flat_map(|r| (0..w).map(move |c| (r, c)))
        .map(|(r, c)| classify_window(&padded.window5_unchecked(r + MARGIN, c + MARGIN), cfg, gate))
        .collect())
}

/// One pass over the frame.
///
/// Every window is read from a padded copy of `img`, so restored values never
/// feed back into the same pass. Rows are processed in parallel on the
/// current rayon pool; the result does not depend on the worker count.
pub fn denoise_iteration(
    img: &GrayImage,
    cfg: &PipelineConfig,
    gate: GateMode,
) -> Result<(GrayImage, ClassCounts)> {
    check_input(img, cfg)?;
    let padded = pad_replicate(img, MARGIN);
    let (w, h) = img.dimensions();
    let mut out = vec![0u8; w * h];
    let counts = out
        .par_chunks_mut(w)
        .enumerate()
        .map(|(r, row)| {
            let mut counts = ClassCounts::default();
            for (c, px) in row.iter_mut().enumerate() {
                let w5 = padded.window5_unchecked(r + MARGIN, c + MARGIN);
                let (class, value) = process_window(&w5, cfg, gate);
                counts.add(class);
                *px = value;
            }
            counts
        })
        .reduce(ClassCounts::default, ClassCounts::merge);
    Ok((GrayImage::new(w, h, out)?, counts))
}

/// Result of a full denoising run.
#[derive(Debug, Clone, PartialEq)]
pub struct Denoised {
    pub image: GrayImage,
    /// Class counts for each pass, in order.
    pub stats: Vec<ClassCounts>,
}

/// Runs `cfg.iterations` passes; the first uses `cfg.first_pass`, the rest
/// the full similarity gate.
pub fn denoise(img: &GrayImage, cfg: &PipelineConfig) -> Result<Denoised> {
    check_input(img, cfg)?;
    let mut current = img.clone();
    let mut stats = Vec::with_capacity(cfg.iterations as usize);
    for pass in 1..=cfg.iterations {
        let (next, counts) = denoise_iteration(&current, cfg, cfg.gate_for(pass))?;
        current = next;
        stats.push(counts);
    }
    Ok(Denoised {
        image: current,
        stats,
    })
}

/// Median filter over a `k` x `k` replication-padded neighborhood, `k` in {3, 5}.
pub fn median_filter(img: &GrayImage, k: usize) -> Result<GrayImage> {
    if k != 3 && k != 5 {
        return Err(Error::InvalidParameter(format!(
            "median kernel size must be 3 or 5, got {k}"
        )));
    }
    img.require_at_least(k)?;
    let r = k / 2;
    let padded = pad_replicate(img, r);
    let (w, h) = img.dimensions();
    let pw = padded.width();
    let src = padded.as_raw();
    let mut out = vec![0u8; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(row, dst)| {
        let mut buf = [0u8; 25];
        let n = k * k;
        for (col, px) in dst.iter_mut().enumerate() {
            for dr in 0..k {
                let start = (row + dr) * pw + col;
                buf[dr * k..dr * k + k].copy_from_slice(&src[start..start + k]);
            }
            let window = &mut buf[..n];
            *px = *window.select_nth_unstable(n / 2).1;
        }
    });
    GrayImage::new(w, h, out)
}
