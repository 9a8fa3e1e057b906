//! Raster-scan streaming engine.
//!
//! Pixels of the replication-padded frame arrive one per call in raster
//! order. Four line buffers and a 5x5 shift-window register file rebuild the
//! neighborhood of the pixel two rows and two columns behind the input, and
//! a datapath of per-unit stage functions (sorter, edge detectors, disorder
//! analyzer, extreme-value checker, similarity checker and the three
//! restorers feeding an output mux) turns each window into one output pixel.
//!
//! Memory is `4 * (width + 4) + 25` bytes regardless of image height.

use std::io::Write;

use crate::detect::{self, DistanceWeighting, Thresholds};
use crate::error::{Error, Result};
use crate::img::{sort9, GrayImage, SortedNine, Window3, Window5};
use crate::pipeline::{ClassCounts, GateMode, PixelClass, PipelineConfig, MARGIN, MIN_SIZE};
use crate::restore::{self, Direction};

const ROWS: usize = 2 * MARGIN + 1;

/// Line buffers plus the 5x5 shift-window register file.
#[derive(Debug, Clone)]
pub struct LineBufferBank {
    width: usize,
    height: usize,
    padded_width: usize,
    /// For each padded column, the four most recent rows, oldest first.
    lines: Vec<[u8; ROWS - 1]>,
    /// Register file, column-major: `window[c][r]`.
    window: [[u8; ROWS]; ROWS],
    pushed: usize,
}

impl LineBufferBank {
    /// Bank for a `width` x `height` frame, fed with its 2-pixel padded raster.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "width and height must be at least 1",
            });
        }
        let padded_width = width + 2 * MARGIN;
        Ok(Self {
            width,
            height,
            padded_width,
            lines: vec![[0; ROWS - 1]; padded_width],
            window: [[0; ROWS]; ROWS],
            pushed: 0,
        })
    }

    pub fn padded_len(&self) -> usize {
        self.padded_width * (self.height + 2 * MARGIN)
    }

    /// Raster position `(row, col)` of the next padded pixel.
    pub fn position(&self) -> (usize, usize) {
        (self.pushed / self.padded_width, self.pushed % self.padded_width)
    }

    pub fn is_complete(&self) -> bool {
        self.pushed == self.padded_len()
    }

    /// Bytes of pixel storage held by the bank.
    pub fn footprint(&self) -> usize {
        self.lines.len() * (ROWS - 1) + ROWS * ROWS
    }

    /// Pushes between a center pixel entering the bank and its window being complete.
    pub fn latency(&self) -> usize {
        MARGIN * self.padded_width + MARGIN
    }

    /// Shifts one padded pixel in. Once the register file holds a full
    /// window centered on a frame pixel, returns that pixel's frame
    /// coordinates and its window.
    pub fn push(&mut self, value: u8) -> Result<Option<(usize, usize, Window5)>> {
        if self.is_complete() {
            return Err(Error::StreamOverflow(self.padded_len()));
        }
        let (row, col) = self.position();
        self.pushed += 1;

        let held = self.lines[col];
        let mut column = [0u8; ROWS];
        column[..ROWS - 1].copy_from_slice(&held);
        column[ROWS - 1] = value;
        self.window.copy_within(1.., 0);
        self.window[ROWS - 1] = column;
        self.lines[col] = [held[1], held[2], held[3], value];

        if row < ROWS - 1 || col < ROWS - 1 {
            return Ok(None);
        }
        let mut p = [0u8; ROWS * ROWS];
        for (c, column) in self.window.iter().enumerate() {
            for (r, &v) in column.iter().enumerate() {
                p[r * ROWS + c] = v;
            }
        }
        Ok(Some((row + 1 - ROWS, col + 1 - ROWS, Window5::new(p))))
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

/// Padded raster stream of `img`: border pixels replicate the nearest edge pixel.
pub fn padded_raster(img: &GrayImage) -> impl Iterator<Item = u8> + '_ {
    let m = MARGIN as isize;
    let (w, h) = img.dimensions();
    (0..h as isize + 2 * m).flat_map(move |r| {
        (0..w as isize + 2 * m).map(move |c| img.get_clamped(r - m, c - m))
    })
}

/// Invocation count of each datapath unit. A unit counts only when its
/// result is consumed by the output mux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModuleCounters {
    pub sorter: u64,
    pub type1_edge: u64,
    pub type2_edge: u64,
    pub disorder: u64,
    pub noisy_check: u64,
    pub similarity: u64,
    pub average: u64,
    pub type1_preserve: u64,
    pub type2_preserve: u64,
    pub mux: u64,
}

impl ModuleCounters {
    pub fn entries(&self) -> [(&'static str, u64); 10] {
        [
            ("sorter", self.sorter),
            ("type1_edge", self.type1_edge),
            ("type2_edge", self.type2_edge),
            ("disorder", self.disorder),
            ("noisy_check", self.noisy_check),
            ("similarity", self.similarity),
            ("average", self.average),
            ("type1_preserve", self.type1_preserve),
            ("type2_preserve", self.type2_preserve),
            ("mux", self.mux),
        ]
    }
}

/// Writes `iteration,module,count` rows.
pub fn write_module_counts_csv(stats: &[ModuleCounters], out: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["iteration", "module", "count"])?;
    for (i, counters) in stats.iter().enumerate() {
        for (name, count) in counters.entries() {
            wtr.write_record([(i + 1).to_string(), name.to_string(), count.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Per-pixel datapath: stage functions wired the way the hardware units
/// feed each other, with activity counters.
#[derive(Debug, Clone)]
pub struct Datapath {
    thresholds: Thresholds,
    weighting: DistanceWeighting,
    gate: GateMode,
    pub counters: ModuleCounters,
}

impl Datapath {
    pub fn new(cfg: &PipelineConfig, gate: GateMode) -> Self {
        Self {
            thresholds: cfg.thresholds,
            weighting: cfg.weighting,
            gate,
            counters: ModuleCounters::default(),
        }
    }

    fn sorter(&mut self, w3: &Window3) -> SortedNine {
        self.counters.sorter += 1;
        sort9(w3)
    }

    fn type1_edge(&mut self, f: &SortedNine) -> bool {
        self.counters.type1_edge += 1;
        detect::type1_edge(f, self.thresholds.t1) == detect::EdgeTest::Edge
    }

    // Sixteen absolute differences, weighted by shifts, then a min and a compare.
    fn type2_edge(&mut self, w5: &Window5) -> bool {
        self.counters.type2_edge += 1;
        let d = detect::directional_distances_with(w5, self.weighting);
        detect::type2_edge_from(&d, self.thresholds.t2) == detect::EdgeNoise::NoisyEdge
    }

    fn disorder(&mut self, p5: u8, f: &SortedNine) -> bool {
        self.counters.disorder += 1;
        detect::disorder(p5, f, self.thresholds.t3) == detect::Disorder::Disordered
    }

    fn noisy_check(&mut self, p5: u8, f: &SortedNine) -> bool {
        self.counters.noisy_check += 1;
        detect::noisy_pixel(p5, f, self.thresholds.t4) == detect::ExtremeCheck::Candidate
    }

    fn similarity(&mut self, w3: &Window3) -> bool {
        self.counters.similarity += 1;
        detect::similar_count(w3, self.thresholds.t4) >= self.thresholds.t5
    }

    fn average(&mut self, f: &SortedNine) -> u8 {
        self.counters.average += 1;
        restore::average_restore(f)
    }

    fn type1_preserve(&mut self, w3: &Window3) -> u8 {
        self.counters.type1_preserve += 1;
        restore::type1_edge_preserve(w3)
    }

    // Four VAR units select one of four directional medians.
    fn type2_preserve(&mut self, w5: &Window5) -> u8 {
        self.counters.type2_preserve += 1;
        let mut medians = [0u8; 4];
        let mut spreads = [0u32; 4];
        for dir in Direction::ALL {
            let values = restore::direction_values(w5, dir);
            spreads[dir.index()] = restore::spread_quarters(&values);
            medians[dir.index()] = restore::median4(&values);
        }
        let select = (0..4).fold(0, |best, i| if spreads[i] < spreads[best] { i } else { best });
        medians[select]
    }

    /// Classifies and restores the center of `w5`.
    pub fn process(&mut self, w5: &Window5) -> (PixelClass, u8) {
        let w3 = w5.inner();
        let p5 = w3.center();
        let f = self.sorter(&w3);

        let class = if self.type1_edge(&f) {
            if self.type2_edge(w5) || !self.similarity(&w3) {
                PixelClass::NoisyEdge
            } else {
                PixelClass::KeepEdge
            }
        } else if self.disorder(p5, &f) {
            PixelClass::Disordered
        } else if self.gate == GateMode::SkipExtremeCheck || !self.noisy_check(p5, &f) {
            PixelClass::KeepSmooth
        } else if self.gate == GateMode::Active && self.similarity(&w3) {
            PixelClass::RescuedCandidate
        } else {
            PixelClass::NoisySmooth
        };

        self.counters.mux += 1;
        let value = match class {
            PixelClass::Disordered => self.type1_preserve(&w3),
            PixelClass::NoisyEdge => self.type2_preserve(w5),
            PixelClass::NoisySmooth => self.average(&f),
            PixelClass::KeepEdge | PixelClass::KeepSmooth | PixelClass::RescuedCandidate => p5,
        };
        (class, value)
    }
}

/// One restored pixel leaving the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamPixel {
    pub row: usize,
    pub col: usize,
    pub value: u8,
    pub class: PixelClass,
}

/// Line-buffer bank and datapath for one pass over one frame.
#[derive(Debug, Clone)]
pub struct StreamEngine {
    bank: LineBufferBank,
    datapath: Datapath,
    classes: ClassCounts,
}

impl StreamEngine {
    pub fn new(width: usize, height: usize, cfg: &PipelineConfig, gate: GateMode) -> Result<Self> {
        cfg.validate()?;
        if width < MIN_SIZE || height < MIN_SIZE {
            return Err(Error::TooSmall {
                width,
                height,
                min: MIN_SIZE,
            });
        }
        Ok(Self {
            bank: LineBufferBank::new(width, height)?,
            datapath: Datapath::new(cfg, gate),
            classes: ClassCounts::default(),
        })
    }

    /// Accepts the next padded pixel; emits a restored frame pixel once the
    /// window behind it is complete. Pushing past the end of the padded
    /// frame is an error.
    pub fn push_pixel(&mut self, value: u8) -> Result<Option<StreamPixel>> {
        Ok(self.bank.push(value)?.map(|(row, col, w5)| {
            let (class, value) = self.datapath.process(&w5);
            self.classes.add(class);
            StreamPixel {
                row,
                col,
                value,
                class,
            }
        }))
    }

    pub fn bank(&self) -> &LineBufferBank {
        &self.bank
    }

    pub fn counters(&self) -> ModuleCounters {
        self.datapath.counters
    }

    pub fn class_counts(&self) -> ClassCounts {
        self.classes
    }
}

/// Streams one pass over `img`.
pub fn stream_iteration(
    img: &GrayImage,
    cfg: &PipelineConfig,
    gate: GateMode,
) -> Result<(GrayImage, ClassCounts, ModuleCounters)> {
    let (w, h) = img.dimensions();
    let mut engine = StreamEngine::new(w, h, cfg, gate)?;
    let mut out = Vec::with_capacity(w * h);
    for v in padded_raster(img) {
        if let Some(px) = engine.push_pixel(v)? {
            out.push(px.value);
        }
    }
    debug_assert_eq!(out.len(), w * h);
    Ok((
        GrayImage::new(w, h, out)?,
        engine.class_counts(),
        engine.counters(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamDenoised {
    pub image: GrayImage,
    pub stats: Vec<ClassCounts>,
    pub modules: Vec<ModuleCounters>,
}

/// Streaming counterpart of [`crate::pipeline::denoise`]: one raster pass per iteration.
pub fn stream_denoise(img: &GrayImage, cfg: &PipelineConfig) -> Result<StreamDenoised> {
    cfg.validate()?;
    img.require_at_least(MIN_SIZE)?;
    let mut current = img.clone();
    let mut stats = Vec::new();
    let mut modules = Vec::new();
    for pass in 1..=cfg.iterations {
        let (next, classes, counters) = stream_iteration(&current, cfg, cfg.gate_for(pass))?;
        current = next;
        stats.push(classes);
        modules.push(counters);
    }
    Ok(StreamDenoised {
        image: current,
        stats,
        modules,
    })
}
