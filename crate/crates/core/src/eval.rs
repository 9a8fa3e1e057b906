//! PSNR evaluation harness: inject RVIN into a clean corpus at several
//! densities, run each restoration method and report PSNR against the clean
//! originals.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::img::{psnr, GrayImage};
use crate::noise::{inject_rvin, NoiseSpec};
use crate::pgm;
use crate::pipeline::{denoise, median_filter, PipelineConfig};

/// Densities reported in the reference comparison table.
pub const TABLE_DENSITIES: [f64; 6] = [0.05, 0.10, 0.15, 0.20, 0.30, 0.40];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Proposed,
    Median3,
    Median5,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Proposed, Method::Median3, Method::Median5];

    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Median3 => "median3",
            Method::Median5 => "median5",
        }
    }

    pub fn apply(self, img: &GrayImage, cfg: &PipelineConfig) -> Result<GrayImage> {
        match self {
            Method::Proposed => Ok(denoise(img, cfg)?.image),
            Method::Median3 => median_filter(img, 3),
            Method::Median5 => median_filter(img, 5),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{s}'")))
    }
}

/// One CSV row: one image, one density, one method.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub image_id: String,
    pub noise: &'static str,
    pub density: f64,
    pub method: Method,
    /// `f64::INFINITY` when the output equals the clean image.
    pub psnr_db: f64,
    /// Present only when timing is enabled.
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub densities: Vec<f64>,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub config: PipelineConfig,
    /// Record wall time per row. Off by default so reruns are byte-identical.
    pub timing: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            densities: TABLE_DENSITIES.to_vec(),
            methods: Method::ALL.to_vec(),
            seed: 0,
            config: PipelineConfig::default(),
            timing: false,
        }
    }
}

/// Noise seed of the `(image, density)` cell; every method sees the same noisy image.
pub fn cell_seed(seed: u64, image_index: usize, density_index: usize) -> u64 {
    seed ^ ((image_index as u64) << 16 | density_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs every image x density x method cell. Rows come back ordered by
/// image, then density, then method, independent of scheduling.
pub fn run(corpus: &[(String, GrayImage)], opts: &EvalOptions) -> Result<Vec<EvalRow>> {
    if corpus.is_empty() {
        return Err(Error::InvalidParameter("empty corpus".into()));
    }
    for &d in &opts.densities {
        NoiseSpec::rvin(d, 0).validate()?;
    }
    opts.config.validate()?;
    let cells: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|i| (0..opts.densities.len()).map(move |j| (i, j)))
        .collect();
    let rows: Vec<Vec<EvalRow>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let (id, clean) = &corpus[i];
            let density = opts.densities[j];
            let spec = NoiseSpec::rvin(density, cell_seed(opts.seed, i, j));
            let (noisy, _) = inject_rvin(clean, &spec)?;
            opts.methods
                .iter()
                .map(|&method| {
                    let start = Instant::now();
                    let restored = method.apply(&noisy, &opts.config)?;
                    let elapsed = start.elapsed().as_secs_f64() * 1e3;
                    Ok(EvalRow {
                        image_id: id.clone(),
                        noise: "rvin",
                        density,
                        method,
                        psnr_db: psnr(clean, &restored)?,
                        wall_ms: opts.timing.then_some(elapsed),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn format_psnr(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.4}")
    }
}

/// Header `image,noise,density,method,psnr_db,wall_ms`; `wall_ms` is empty
/// when timing is off.
pub fn write_csv(rows: &[EvalRow], out: impl Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["image", "noise", "density", "method", "psnr_db", "wall_ms"])?;
    for row in rows {
        wtr.write_record([
            row.image_id.clone(),
            row.noise.to_string(),
            row.density.to_string(),
            row.method.name().to_string(),
            format_psnr(row.psnr_db),
            row.wall_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Mean PSNR of `method` over all rows at `density`.
pub fn mean_psnr(rows: &[EvalRow], method: Method, density: f64) -> Option<f64> {
    let values: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == method && r.density == density)
        .map(|r| r.psnr_db)
        .collect();
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Method-by-density table of mean PSNR, densities printed as percentages.
pub fn summary_table(rows: &[EvalRow], methods: &[Method], densities: &[f64]) -> String {
    let mut out = format!("{:<10}", "method");
    for d in densities {
        out.push_str(&format!("{:>9}", format!("{}%", (d * 100.0 * 100.0).round() / 100.0)));
    }
    out.push('\n');
    for &m in methods {
        out.push_str(&format!("{:<10}", m.name()));
        for &d in densities {
            let cell = mean_psnr(rows, m, d)
                .map(|v| if v.is_infinite() { "inf".into() } else { format!("{v:.2}") })
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!("{cell:>9}"));
        }
        out.push('\n');
    }
    out
}

/// Loads every `.pgm` file in `dir`, sorted by file name; ids are file stems.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<(String, GrayImage)>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .is_some_and(|ext| ext.eq_ignore_ascii_case("pgm"))
        })
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((id, pgm::read(&p)?.0))
        })
        .collect()
}
