use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qillum::commands;
use qillum::config::Origin;
use qillum::output::{emit, write_atomic};
use qillum::{CliError, CliResult, RunConfig};

/// Quantum illumination with the correlation-to-displacement receiver.
#[derive(Parser)]
#[command(name = "qillum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// CSV output path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// SVG output path (error-curves only).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,

    /// Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Override any config key, e.g. `--set n_b=10`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,

    /// Suppress the run header and per-point log on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Error probabilities and exponents over a grid of mode counts.
    ErrorCurves,
    /// Local and asymptotic exponent ratio at the scenario M.
    ExponentRatio,
    /// Transfer function and selectivity of the pulse gate.
    QpgReport,
    /// Bogoliubov coefficients and mode count of the pair source.
    SourceReport,
    /// Seeded Monte Carlo of the receivers against analytic predictions.
    Montecarlo,
}

fn build_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &cli.config {
        cfg.apply_file(p)?;
    }
    for kv in &cli.sets {
        cfg.apply_assignment(kv)?;
    }
    let flags = [
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
        ("svg", cli.svg.as_ref().map(|p| p.display().to_string())),
        ("seed", cli.seed.map(|s| s.to_string())),
        ("threads", cli.threads.map(|t| t.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v, Origin::Flag)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = build_config(cli)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    }
    let quiet = cli.quiet;
    let log = move |s: &str| {
        if !quiet {
            eprintln!("{s}");
        }
    };
    if !quiet {
        eprint!("{}", cfg.header());
    }
    let out = cfg.outputs.csv_path.as_deref();
    match cli.command {
        Command::ErrorCurves => {
            let curve = commands::error_curves(&cfg, &log)?;
            emit(out, &commands::error_curves_table(&curve).to_csv())?;
            if let Some(svg) = &cfg.outputs.svg_path {
                write_atomic(svg, &commands::error_curves_svg(&curve, &cfg))?;
            }
        }
        Command::ExponentRatio => {
            let e = commands::exponent_ratio(&cfg)?;
            emit(out, &commands::exponent_ratio_table(&e).to_csv())?;
        }
        Command::QpgReport => {
            let r = commands::qpg_report(&cfg)?;
            emit(out, &commands::qpg_table(&r).to_csv())?;
            log(&commands::qpg_summary(&r));
        }
        Command::SourceReport => {
            let r = commands::source_report(&cfg)?;
            emit(out, &commands::source_table(&r).to_csv())?;
        }
        Command::Montecarlo => {
            let rows = commands::montecarlo(&cfg)?;
            emit(out, &commands::montecarlo_table(&cfg, &rows).to_csv())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qillum: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
