//! `hyperwave`: evaluate, verify, tabulate and scan Harish-Chandra series and
//! hyperoctahedral wave functions from the command line.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 error.

mod commands;
mod complex;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperwave::{Execution, Family};
use serde::Serialize;

use commands::{CliError, Suite};
use complex::{parse_complex, parse_list, parse_real};
use config::{ComplexEntry, FileConfig, RunConfig};
use report::Report;

#[derive(Parser)]
#[command(name = "hyperwave", version, about = "Harish-Chandra series and hyperoctahedral wave functions")]
struct Cli {
    /// TOML run configuration; flags override its keys.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    /// Worker threads for the parallel loops.
    #[arg(long, global = true, env = "HYPERWAVE_THREADS")]
    threads: Option<usize>,

    /// Also write line-delimited `{name, re, im}` records here (`-` for stdout, replacing the table).
    #[arg(long, global = true)]
    records: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long, global = true)]
    family: Option<Family>,
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Couplings `gS,gM,gL`, e.g. `0.4,0.7+0.1i,0.3`.
    #[arg(long, global = true)]
    g: Option<String>,
    /// Auxiliary couplings `a_1,...,a_n`.
    #[arg(long, global = true)]
    a: Option<String>,
    /// Spectral point, e.g. `0.1+1.3i,-0.05+0.6i`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    xi: Option<String>,
    /// Position, e.g. `4,2`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    x: Option<String>,
    /// Truncation level N.
    #[arg(long = "max-level", short = 'N', global = true)]
    max_level: Option<usize>,
    #[arg(long, global = true)]
    tol_int: Option<f64>,
    #[arg(long, global = true)]
    tol_den: Option<f64>,
    #[arg(long, global = true)]
    tol_x: Option<f64>,
    #[arg(long, global = true)]
    pole_guard: Option<f64>,
    #[arg(long, global = true)]
    pole_radius: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `parallel` or `sequential`.
    #[arg(long, global = true)]
    exec: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// phi, its tail bound, Phi and the c-function of every orbit element.
    Eval,
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Difference-equation orders, e.g. `1,2`.
        #[arg(long, value_delimiter = ',')]
        ell: Option<Vec<usize>>,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Write the coefficient table as line-delimited JSON.
    Table {
        #[arg(long)]
        out: PathBuf,
        /// Multiply by the regularizer so entries stay finite near hyperplanes.
        #[arg(long)]
        regularize: bool,
    },
    /// Confluence errors over a grid of the shift parameter c.
    Scan {
        /// `m` (bc to t), `l` (bc to cs) or `both`.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
}

fn complex_entries(s: &str) -> Result<Vec<ComplexEntry>, String> {
    parse_list(s, parse_complex).map(|v| v.into_iter().map(|z| ComplexEntry::Pair([z.re, z.im])).collect())
}

fn flag_config(cli: &Cli) -> Result<FileConfig, String> {
    let o = &cli.overrides;
    let exec = match o.exec.as_deref() {
        None => None,
        Some("parallel") => Some(Execution::Parallel),
        Some("sequential") => Some(Execution::Sequential),
        Some(other) => return Err(format!("unknown execution mode '{other}'")),
    };
    let mut f = FileConfig {
        family: o.family,
        n: o.n,
        g: o.g.as_deref().map(complex_entries).transpose()?,
        a: o.a.as_deref().map(complex_entries).transpose()?,
        xi: o.xi.as_deref().map(complex_entries).transpose()?,
        x: o.x.as_deref().map(|s| parse_list(s, parse_real)).transpose()?,
        max_level: o.max_level,
        tol_int: o.tol_int,
        tol_den: o.tol_den,
        tol_x: o.tol_x,
        pole_guard: o.pole_guard,
        pole_radius: o.pole_radius,
        seed: o.seed,
        exec,
        threads: cli.threads,
        ..Default::default()
    };
    match &cli.command {
        Command::Verify { suite, ell, kind, grid } => {
            f.suite = suite.map(|s| format!("{s:?}").to_lowercase());
            f.ell = ell.clone();
            f.kind = kind.clone();
            f.grid = grid.clone();
        }
        Command::Scan { kind, grid } => {
            f.kind = kind.clone();
            f.grid = grid.clone();
        }
        Command::Table { regularize: true, .. } => f.regularize = Some(true),
        _ => {}
    }
    Ok(f)
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    RunConfig::resolve(file.overlay(flag_config(cli)?))
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let cfg = load(cli)?;
    if let Some(t) = cfg.threads {
        hyperwave::exec::init_threads(t);
    }
    match &cli.command {
        Command::Eval => commands::eval(&cfg),
        Command::Verify { .. } => {
            let suite = cfg.raw.suite.as_deref().ok_or_else(|| "missing suite (flag --suite or key 'suite')".to_string())?;
            commands::verify(&cfg, Suite::parse(suite)?)
        }
        Command::Table { out, .. } => commands::table(&cfg, out, cfg.raw.regularize.unwrap_or(false)),
        Command::Scan { .. } => commands::scan_cmd(&cfg),
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    record: &'static str,
    kind: &'a str,
    module: &'a str,
    message: &'a str,
}

fn emit(cli: &Cli, report: &Report) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    match cli.records.as_deref() {
        Some(p) if p.as_os_str() == "-" => report.write_records(stdout.lock())?,
        Some(p) => {
            report.write_table(stdout.lock())?;
            let mut f = std::io::BufWriter::new(std::fs::File::create(p)?);
            report.write_records(&mut f)?;
            f.flush()?;
        }
        None => report.write_table(stdout.lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|r| {
        emit(&cli, &r).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(r)
    });
    match result {
        Ok(r) if r.all_pass() => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            let message = e.message();
            let rec = ErrorRecord {
                record: "error",
                kind: e.kind(),
                module: e.module(),
                message: &message,
            };
            eprintln!("{}", serde_json::to_string(&rec).unwrap_or_else(|_| message.clone()));
            ExitCode::from(2)
        }
    }
}
