use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use pricetag_core::imgcore::pnm;
use pricetag_core::pipeline::{
    bench, run_dataset, save_results_csv, write_debug, write_results_csv, DatasetOptions, Pipeline, PipelineConfig,
};
use pricetag_core::synthgen::{generate_dataset, Mix, MANIFEST_FILE};

#[derive(Parser)]
#[command(name = "pricetag", version, about = "Retail price recognition on price-tag images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recognize the price on one image (PPM or PGM).
    Recognize {
        image: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write intermediate images here.
        #[arg(long)]
        debug_dir: Option<PathBuf>,
    },
    /// Run every image of a manifest and write a results CSV.
    Batch {
        manifest: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Count a found zone as correct only with the right value.
        #[arg(long)]
        check_value: bool,
        /// Leave out the total_us column.
        #[arg(long)]
        no_timings: bool,
    },
    /// Per-stage latency over a manifest.
    Bench {
        manifest: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        single_thread: bool,
    },
    /// Generate a synthetic dataset with a manifest.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Class fractions, e.g. angle=0.1,blur=0.1,absent=0.05
        #[arg(long)]
        mix: Option<Mix>,
    },
    /// Print the default configuration as JSON.
    Config,
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(PipelineConfig::default()),
    }
}

fn recognize(image: &Path, config: Option<&Path>, debug_dir: Option<&Path>) -> Result<bool> {
    let cfg = load_config(config)?;
    let debug_dir = debug_dir.map(Path::to_path_buf).or_else(|| cfg.debug.then(|| PathBuf::from("debug")));
    let pipeline = Pipeline::new(cfg)?;
    let img = pnm::read_color(image).with_context(|| format!("reading {}", image.display()))?;
    let result = match &debug_dir {
        Some(dir) => {
            let (r, trace) = pipeline.run_traced(&img);
            let stem = image.file_stem().and_then(|s| s.to_str()).unwrap_or("image");
            write_debug(dir, stem, &trace)?;
            r
        }
        None => pipeline.run(&img),
    };
    match (result.price, result.reason) {
        (Some(p), None) => {
            println!("{p}");
            Ok(true)
        }
        (_, reason) => {
            println!("REJECT {}", reason.map_or("unknown", |r| r.as_str()));
            Ok(false)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Recognize { image, config, debug_dir } => {
            let accepted = recognize(&image, config.as_deref(), debug_dir.as_deref())?;
            Ok(if accepted { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Batch { manifest, config, out, workers, check_value, no_timings } => {
            let cfg = load_config(config.as_deref())?;
            let report = run_dataset(&manifest, &cfg, &DatasetOptions { workers, check_value })?;
            if out == Path::new("-") {
                write_results_csv(&report.records, std::io::stdout().lock(), !no_timings)?;
                eprint!("{}", report.render());
            } else {
                save_results_csv(&report.records, &out, !no_timings)?;
                print!("{}", report.render());
            }
            if report.errors > 0 {
                eprintln!("warning: {} images could not be processed", report.errors);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { manifest, config, reps, single_thread } => {
            let cfg = load_config(config.as_deref())?;
            print!("{}", bench(&manifest, &cfg, reps, single_thread)?.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { n, seed, out, mix } => {
            let m = generate_dataset(n, &mix.unwrap_or_default(), seed, &out)?;
            println!("wrote {} images and {}", m.rows.len(), out.join(MANIFEST_FILE).display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Config => {
            println!("{}", PipelineConfig::default().to_json());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
