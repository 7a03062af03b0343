use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use singlab_cli::report::{merge, merged_table, RunReport};
use singlab_cli::run::{hardy_table, run_roots, run_spectrum, run_sweep};
use singlab_cli::{presets, Artifacts, CliError, ExperimentConfig, Format};

#[derive(Parser)]
#[command(name = "singlab", version, about = "Spectral experiments for operators with inverse-power potentials")]
struct Cli {
    /// Worker threads for per-eps work (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Hardy constants for ranges of dimension and order.
    Hardy {
        /// Dimension range, e.g. 3..10 or 5.
        #[arg(long, default_value = "3..12", value_parser = parse_range)]
        dims: (usize, usize),
        /// Order range.
        #[arg(long, default_value = "1..4", value_parser = parse_range)]
        orders: (usize, usize),
    },
    /// Characteristic roots along a grid of couplings.
    Roots(RunArgs),
    /// Positive spectrum of an operator.
    Spectrum(RunArgs),
    /// Divergence, oscillation, stationary or scaling sweep over eps.
    Sweep(RunArgs),
    /// Merge JSON reports into one file and print a summary table.
    Report {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, env = "SINGLAB_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, env = "SINGLAB_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Both)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Both => Format::Both,
        }
    }
}

/// Writes a line to stdout; a closed pipe is not an error.
fn say(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    match s.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => parse(s).map(|v| (v, v)),
    }
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            ExperimentConfig::parse(&text)
        }
        (None, Some(name)) => presets::load(name),
        (None, None) => Err(CliError::Config("one of --config and --preset is required".into())),
    }
}

fn emit(artifacts: &Artifacts, args: &RunArgs) -> Result<(), CliError> {
    let written = artifacts.write(&args.out_dir, args.format.into())?;
    let r = &artifacts.report;
    say(&format!("{} {}: regime {}", r.command, r.scenario, r.summary.regime));
    if let Some(c) = &r.summary.classification {
        say(&format!("classification: {c}"));
    }
    if let Some(n) = r.summary.positive_count {
        say(&format!("positive eigenvalues: {n}"));
    }
    for (key, value) in &r.summary.constants {
        say(&format!("{key}: {value:e}"));
    }
    for path in written {
        say(&format!("wrote {}", path.display()));
    }
    Ok(())
}

fn merge_reports(paths: &[PathBuf], out_dir: &Path) -> Result<(), CliError> {
    let reports = paths.iter().map(|p| RunReport::read(p)).collect::<Result<Vec<_>, _>>()?;
    let merged = merge(reports)?;
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io { path: out_dir.to_owned(), source })?;
    let path = out_dir.join("merged_report.json");
    let mut text = serde_json::to_string_pretty(&merged)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
    say(merged_table(&merged).trim_end());
    say(&format!("wrote {}", path.display()));
    Ok(())
}

fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Hardy { dims, orders } => {
            say(hardy_table(*dims, *orders)?.to_csv()?.trim_end());
            Ok(())
        }
        Command::Roots(args) => emit(&run_roots(&load(args)?)?, args),
        Command::Spectrum(args) => emit(&run_spectrum(&load(args)?)?, args),
        Command::Sweep(args) => emit(&run_sweep(&load(args)?)?, args),
        Command::Report { paths, out_dir } => merge_reports(paths, out_dir),
        Command::Presets => {
            for name in presets::names() {
                say(name);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
