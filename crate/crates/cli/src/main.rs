use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meshmark::attacks::GRAMMAR_HELP;
use meshmark::metrics::DEFAULT_SAMPLES_PER_TRIANGLE;
use meshmark::{CarrierMode, WatermarkKey};
use meshmark_cli::bench::BenchOptions;
use meshmark_cli::config::OUTPUT_DIR_ENV;
use meshmark_cli::{commands, exit, CliError};

#[derive(Parser)]
#[command(name = "meshmark", version, about = "Blind saliency-guided QIM watermarking for triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed the key's payload into a mesh.
    Embed {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        key: KeyArgs,
    },
    /// Extract the payload and correlate it with the key's watermark.
    Extract {
        input: PathBuf,
        #[command(flatten)]
        key: KeyArgs,
    },
    /// Apply one attack to a mesh.
    #[command(after_help = GRAMMAR_HELP)]
    Attack {
        input: PathBuf,
        /// Attack spec, e.g. `noise:0.3`, `smooth:0.1,30`, `subdiv:loop,1`.
        spec: String,
        output: PathBuf,
        /// Seed used when the spec has no `@seed` suffix.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sampled MRMS and Hausdorff distance between two meshes.
    Metric {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_TRIANGLE)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a benchmark configuration and write CSV and Markdown reports.
    #[command(after_help = format!("The output directory can be overridden with {OUTPUT_DIR_ENV}.\n\n{GRAMMAR_HELP}"))]
    Bench {
        config: PathBuf,
        /// Use every vertex as a carrier instead of the salient subset.
        #[arg(long)]
        no_saliency: bool,
        /// Record per-cell runtimes (the CSV is then no longer reproducible).
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Write per-vertex saliency as CSV.
    Saliency {
        input: PathBuf,
        csv: PathBuf,
        /// Also write a color-coded COFF mesh.
        #[arg(long)]
        colored: Option<PathBuf>,
        #[arg(long, default_value_t = WatermarkKey::DEFAULT_SIGMA_FRACTION)]
        sigma_fraction: f64,
    },
    /// Write one of the bundled procedural meshes.
    Gen {
        /// bumpy_sphere, wavy_torus, bumpy_grid or icosphere.
        name: String,
        output: PathBuf,
    },
}

/// Key material: a key file, individual flags, or both (flags win).
#[derive(Args)]
struct KeyArgs {
    #[arg(long)]
    key_file: Option<PathBuf>,
    #[arg(long)]
    key1: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Payload length in bits.
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    sigma_fraction: Option<f64>,
    /// Use every vertex as a carrier.
    #[arg(long)]
    no_saliency: bool,
}

impl KeyArgs {
    fn resolve(&self) -> Result<WatermarkKey, CliError> {
        let mut key = match &self.key_file {
            Some(p) => commands::read_key_file(p)?,
            None => WatermarkKey::default(),
        };
        if let Some(v) = self.key1 {
            key.key1 = v;
        }
        if let Some(v) = self.delta {
            key.delta = v;
        }
        if let Some(v) = self.bits {
            key.payload_bits = v;
        }
        if let Some(v) = self.ratio {
            key.saliency_ratio = v;
        }
        if let Some(v) = self.sigma_fraction {
            key.sigma_fraction = v;
        }
        if self.no_saliency {
            key.carriers = CarrierMode::AllVertices;
            key.saliency_ratio = 1.0;
        }
        key.validate()?;
        Ok(key)
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Embed { input, output, key } => commands::cmd_embed(&input, &output, &key.resolve()?),
        Command::Extract { input, key } => commands::cmd_extract(&input, &key.resolve()?),
        Command::Attack { input, spec, output, seed } => commands::cmd_attack(&input, &spec, &output, seed),
        Command::Metric { a, b, samples, seed } => commands::cmd_metric(&a, &b, samples, seed),
        Command::Bench { config, no_saliency, timings, out_dir } => {
            commands::cmd_bench(&config, BenchOptions { no_saliency, timings }, out_dir.as_deref())
        }
        Command::Saliency { input, csv, colored, sigma_fraction } => {
            commands::cmd_saliency(&input, &csv, colored.as_deref(), sigma_fraction)
        }
        Command::Gen { name, output } => commands::cmd_gen(&name, &output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::from(exit::OK as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == exit::ATTACK_GRAMMAR {
                eprintln!("{GRAMMAR_HELP}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
