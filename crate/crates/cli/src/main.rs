use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use impulse_denoise::detect::DistanceWeighting;
use impulse_denoise::eval::{self, EvalOptions, Method};
use impulse_denoise::noise::{inject, NoiseSpec};
use impulse_denoise::pgm::{self, PgmFormat};
use impulse_denoise::pipeline::write_class_counts_csv;
use impulse_denoise::stream::write_module_counts_csv;
use impulse_denoise::synth::phantom_corpus;
use impulse_denoise::{denoise, stream_denoise, Error, GateMode, PipelineConfig, Result};

#[derive(Parser)]
#[command(name = "impulse", version, about = "Impulse-noise injection, removal and evaluation for 8-bit PGM images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corrupt an image with seeded impulse noise.
    Inject(InjectArgs),
    /// Detect and restore impulse-corrupted pixels.
    Denoise(DenoiseArgs),
    /// PSNR comparison of the denoiser and median baselines over a corpus.
    Eval(EvalArgs),
    /// Write a deterministic corpus of synthetic head-slice phantoms.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Rvin,
    Fvin,
}

#[derive(Args)]
struct InjectArgs {
    #[arg(long, value_enum, default_value = "rvin")]
    kind: Kind,
    /// Total corruption probability; split evenly between low and high bands for fvin.
    #[arg(long)]
    p: Option<f64>,
    /// Probability of a low-band impulse (fvin).
    #[arg(long)]
    p1: Option<f64>,
    /// Probability of a high-band impulse (fvin).
    #[arg(long)]
    p2: Option<f64>,
    /// Band width for fvin; 0 gives salt-and-pepper noise.
    #[arg(long, default_value_t = 0)]
    m: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    input: PathBuf,
    output: PathBuf,
    /// Corruption mask, 255 where a pixel was replaced.
    mask: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Frame,
    Stream,
}

#[derive(Args)]
struct ConfigArgs {
    /// key=value file (t1..t5, iterations, first_pass, weighting); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    t1: Option<u8>,
    #[arg(long)]
    t2: Option<u32>,
    #[arg(long)]
    t3: Option<u8>,
    #[arg(long)]
    t4: Option<u8>,
    #[arg(long)]
    t5: Option<u8>,
    #[arg(long)]
    iterations: Option<u32>,
    /// Use |Ic - W*Ij| distances instead of W*|Ic - Ij|.
    #[arg(long)]
    eq4_literal: bool,
    /// Run the similarity gate in the first pass too.
    #[arg(long, conflicts_with = "first_pass")]
    no_iter1_bypass: bool,
    /// First-pass gate: bypass, active or skip.
    #[arg(long)]
    first_pass: Option<String>,
}

impl ConfigArgs {
    fn build(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_kv(&fs::read_to_string(path)?)?;
        }
        let t = &mut cfg.thresholds;
        t.t1 = self.t1.unwrap_or(t.t1);
        t.t2 = self.t2.unwrap_or(t.t2);
        t.t3 = self.t3.unwrap_or(t.t3);
        t.t4 = self.t4.unwrap_or(t.t4);
        t.t5 = self.t5.unwrap_or(t.t5);
        cfg.iterations = self.iterations.unwrap_or(cfg.iterations);
        if self.eq4_literal {
            cfg.weighting = DistanceWeighting::Literal;
        }
        if self.no_iter1_bypass {
            cfg.first_pass = GateMode::Active;
        }
        if let Some(mode) = &self.first_pass {
            cfg.first_pass = mode.parse()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct DenoiseArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long, value_enum, default_value = "frame")]
    engine: Engine,
    /// Per-pass class counts CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Per-pass stream module activity CSV (stream engine only).
    #[arg(long)]
    module_stats: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of clean PGM images.
    corpus: PathBuf,
    /// Output CSV.
    csv: PathBuf,
    /// Comma-separated densities as fractions.
    #[arg(long, value_delimiter = ',', default_values_t = eval::TABLE_DENSITIES)]
    densities: Vec<f64>,
    /// Comma-separated methods: proposed, median3, median5.
    #[arg(long, value_delimiter = ',', default_value = "proposed,median3,median5")]
    methods: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fill the wall_ms column.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory, created if missing.
    dir: PathBuf,
    #[arg(long, default_value_t = 5)]
    count: usize,
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn noise_spec(args: &InjectArgs) -> Result<NoiseSpec> {
    let missing = || Error::InvalidParameter("a noise probability is required (--p, or --p1/--p2 for fvin)".into());
    match args.kind {
        Kind::Rvin => {
            if args.p1.is_some() || args.p2.is_some() {
                return Err(Error::InvalidParameter("--p1/--p2 apply to fvin only".into()));
            }
            Ok(NoiseSpec::rvin(args.p.ok_or_else(missing)?, args.seed))
        }
        Kind::Fvin => {
            let (p1, p2) = match (args.p, args.p1, args.p2) {
                (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                    return Err(Error::InvalidParameter("give either --p or --p1/--p2, not both".into()))
                }
                (Some(p), None, None) => (p / 2.0, p / 2.0),
                (None, None, None) => return Err(missing()),
                (None, p1, p2) => (p1.unwrap_or(0.0), p2.unwrap_or(0.0)),
            };
            Ok(NoiseSpec::fvin(p1, p2, args.m, args.seed))
        }
    }
}

fn cmd_inject(args: &InjectArgs) -> Result<()> {
    let spec = noise_spec(args)?;
    spec.validate()?;
    let (img, format) = pgm::read(&args.input)?;
    let (noisy, mask) = inject(&img, &spec)?;
    pgm::write(&args.output, &noisy, format)?;
    pgm::write(&args.mask, &mask.to_image(), format)?;
    println!(
        "corrupted {} of {} pixels (fraction {:.6})",
        mask.count(),
        img.len(),
        mask.fraction()
    );
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_denoise(args: &DenoiseArgs) -> Result<()> {
    let cfg = args.config.build()?;
    if args.module_stats.is_some() && args.engine != Engine::Stream {
        return Err(Error::InvalidParameter("--module-stats requires --engine stream".into()));
    }
    let (img, format) = pgm::read(&args.input)?;
    let (out, stats, modules) = match args.engine {
        Engine::Frame => {
            let r = denoise(&img, &cfg)?;
            (r.image, r.stats, None)
        }
        Engine::Stream => {
            let r = stream_denoise(&img, &cfg)?;
            (r.image, r.stats, Some(r.modules))
        }
    };
    pgm::write(&args.output, &out, format)?;
    if let Some(path) = &args.stats {
        write_class_counts_csv(&stats, create(path)?)?;
    }
    if let (Some(path), Some(modules)) = (&args.module_stats, modules) {
        write_module_counts_csv(&modules, create(path)?)?;
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<Result<Vec<_>>>()?;
    let opts = EvalOptions {
        densities: args.densities.clone(),
        methods,
        seed: args.seed,
        config: args.config.build()?,
        timing: args.timing,
    };
    let corpus = eval::load_corpus(&args.corpus)?;
    if corpus.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no .pgm files in {}",
            args.corpus.display()
        )));
    }
    let rows = eval::run(&corpus, &opts)?;
    eval::write_csv(&rows, create(&args.csv)?)?;
    print!("{}", eval::summary_table(&rows, &opts.methods, &opts.densities));
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    if args.size < 5 {
        return Err(Error::InvalidParameter("phantom size must be at least 5".into()));
    }
    fs::create_dir_all(&args.dir)?;
    for (name, img) in phantom_corpus(args.count, args.size, args.seed) {
        pgm::write(args.dir.join(format!("{name}.pgm")), &img, PgmFormat::Binary)?;
    }
    println!("wrote {} phantoms to {}", args.count, args.dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Inject(a) => cmd_inject(a),
        Command::Denoise(a) => cmd_denoise(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(io::stderr(), "impulse: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
