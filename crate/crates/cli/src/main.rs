use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use schottky_cli::{parse_config, resolve_command, run, Command, RunError};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Validate,
    Words,
    Partition,
    Dimension,
    ZetaGrid,
    Zeros,
    Fup,
    Equivariance,
    Localization,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Words => Command::Words,
            Cmd::Partition => Command::Partition,
            Cmd::Dimension => Command::Dimension,
            Cmd::ZetaGrid => Command::ZetaGrid,
            Cmd::Zeros => Command::Zeros,
            Cmd::Fup => Command::Fup,
            Cmd::Equivariance => Command::Equivariance,
            Cmd::Localization => Command::Localization,
        }
    }
}

/// Schottky group zeta functions and fractal uncertainty experiments.
#[derive(Debug, Parser)]
#[command(name = "schottky-lab", version)]
struct Args {
    /// Command to run; may instead be set by `command` in the config.
    #[arg(value_enum)]
    command: Option<Cmd>,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory [default: `out` from the config, else ./out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Seed for randomized restarts [default: `seed` from the config, else 0].
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(args: &Args) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| RunError::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = parse_config(&text).map_err(RunError::Config)?;
    let command = resolve_command(args.command.map(Command::from), &cfg)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| RunError::Io(e.to_string()))?;
    let report = pool.install(|| run(&cfg, command, seed, &out))?;
    println!(
        "{}: wrote {} to {}",
        command,
        report
            .outputs
            .iter()
            .map(String::as_str)
            .chain(["report.json"])
            .collect::<Vec<_>>()
            .join(", "),
        out.display()
    );
    Ok(())
}
