use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kergin_core::experiments::{self, ExperimentConfig, ExperimentKind, OutputFormat, Report};
use kergin_core::{KerginError, Result};

#[derive(Parser)]
#[command(name = "kergin", version, about = "Kergin interpolation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kergin terms and partial sums at each evaluation point.
    Interpolate(RunArgs),
    /// Remainder integrals next to the interpolation error.
    Remainder(RunArgs),
    /// Error decay against the Stirling bound.
    Converge(RunArgs),
    /// Exact terms of the divergent example at the origin.
    Diverge(RunArgs),
    /// Containment certificates and the radius condition.
    Certify(RunArgs),
    /// Cross-checks of derivatives, quadrature and interpolation.
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report files; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

impl Command {
    fn split(self) -> (ExperimentKind, RunArgs) {
        match self {
            Command::Interpolate(a) => (ExperimentKind::Interpolate, a),
            Command::Remainder(a) => (ExperimentKind::Remainder, a),
            Command::Converge(a) => (ExperimentKind::Converge, a),
            Command::Diverge(a) => (ExperimentKind::Diverge, a),
            Command::Certify(a) => (ExperimentKind::Certify, a),
            Command::Validate(a) => (ExperimentKind::Validate, a),
        }
    }
}

/// Built-in defaults for experiments that need no configuration.
fn default_config(kind: ExperimentKind) -> Result<ExperimentConfig> {
    match kind {
        ExperimentKind::Diverge => Ok(ExperimentConfig::new(kind, 10)),
        ExperimentKind::Validate => Ok(ExperimentConfig::new(kind, 1)),
        other => Err(KerginError::Config(format!("`{other}` needs --config"))),
    }
}

fn load(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => default_config(kind)?,
    };
    if cfg.experiment != kind {
        return Err(KerginError::Config(format!(
            "config describes a `{}` experiment, not `{kind}`",
            cfg.experiment
        )));
    }
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    Ok(cfg)
}

fn emit(report: &Report, cfg: &ExperimentConfig, args: &RunArgs) -> Result<()> {
    let format = OutputFormat::from(args.format);
    let dir = args.out.clone().or_else(|| cfg.output.dir.as_ref().map(PathBuf::from));
    match dir {
        Some(dir) => {
            let stem = cfg.output.stem.clone().unwrap_or_else(|| cfg.experiment.to_string());
            for path in report.write(&dir, &stem, format)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => match format {
            OutputFormat::Csv => print!("{}", report.table.to_csv()?),
            OutputFormat::Json => print!("{}", report.to_json()),
        },
    }
    Ok(())
}

fn run(kind: ExperimentKind, args: &RunArgs) -> Result<Report> {
    let cfg = load(kind, args)?;
    let report = experiments::run(&cfg)?;
    emit(&report, &cfg, args)?;
    Ok(report)
}

fn main() -> ExitCode {
    let (kind, args) = Cli::parse().command.split();
    let outcome = run(kind, &args);
    match &outcome {
        Ok(report) => {
            for note in &report.metadata.notes {
                eprintln!("note: {note}");
            }
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                eprintln!("[{tag}] {}: {}", c.name, c.detail);
            }
            if let Some(c) = report.first_failure() {
                eprintln!("first failing check: {}", c.name);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(experiments::exit_code_for(&outcome) as u8)
}
