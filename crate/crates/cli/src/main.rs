use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vicert::certificates::Condition;
use vicert_cli::run::{resolve, run_certify, run_solve, Settings};
use vicert_cli::table;

/// Normal-map solver and existence certificates for box-constrained
/// variational inequalities.
///
/// PROBLEM is a registry id (see `vicert list`) or a path to a problem file.
#[derive(Debug, Parser)]
#[command(name = "vicert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Seed for every sampled check and multistart draw.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Sample points per check (pairs are at least 100).
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Sampling half-width for unbounded coordinates.
    #[arg(long, default_value_t = 10.0)]
    radius: f64,
    /// Record wall-clock time in the report (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve from several seeded starts and print the distinct solutions.
    Solve {
        problem: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        /// Residual tolerance on the normal map.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Include the residual trace of every start.
        #[arg(long)]
        trace: bool,
    },
    /// Run existence-condition checks. Exit 0 all pass, 2 any fail,
    /// 3 inconclusive without failures.
    Certify {
        problem: String,
        #[command(flatten)]
        common: Common,
        /// Comma-separated condition ids; defaults to all applicable ones.
        #[arg(long, value_delimiter = ',')]
        conditions: Vec<Condition>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Merge run reports into one table.
    Report {
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the built-in problems.
    List,
    /// Print a built-in problem as a problem file.
    Export { id: String },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Delimited,
}

fn settings(c: &Common) -> Settings {
    Settings {
        seed: c.seed,
        samples: c.samples,
        radius: c.radius,
        timing: c.timing,
        ..Settings::default()
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Solve {
            problem,
            common,
            starts,
            tol,
            trace,
        } => {
            if starts == 0 || tol.is_nan() || tol <= 0.0 {
                return usage("--starts must be at least 1 and --tol positive");
            }
            let r = match resolve(&problem) {
                Ok(r) => r,
                Err(e) => return usage(e),
            };
            let s = Settings {
                starts,
                tol,
                trace,
                ..settings(&common)
            };
            match run_solve(&r, &s) {
                Ok((report, solved)) => {
                    print!("{}", report.to_toml());
                    ExitCode::from(if solved { 0 } else { 2 })
                }
                Err(e) => usage(e),
            }
        }
        Command::Certify {
            problem,
            common,
            conditions,
            tol,
        } => {
            if tol.is_nan() || tol <= 0.0 {
                return usage("--tol must be positive");
            }
            let r = match resolve(&problem) {
                Ok(r) => r,
                Err(e) => return usage(e),
            };
            let s = Settings {
                tol,
                ..settings(&common)
            };
            match run_certify(&r, &conditions, &s) {
                Ok((report, outcome)) => {
                    for sk in &report.skipped {
                        eprintln!("skipped {}: {}", sk.condition, sk.reason);
                    }
                    print!("{}", report.to_toml());
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => usage(e),
            }
        }
        Command::Report { files, format } => {
            let mut rows = Vec::new();
            for f in &files {
                let name = f.display().to_string();
                match std::fs::read_to_string(f) {
                    Ok(text) => {
                        let (r, warnings) = table::rows_from_text(&name, &text);
                        for w in warnings {
                            eprintln!("warning: {w}");
                        }
                        rows.extend(r);
                    }
                    Err(e) => eprintln!("warning: {name}: {e}"),
                }
            }
            table::sort_rows(&mut rows);
            match format {
                Format::Text => print!("{}", table::render_text(&rows)),
                Format::Delimited => print!("{}", table::render_delimited(&rows)),
            }
            ExitCode::SUCCESS
        }
        Command::List => {
            for e in vicert::registry() {
                println!("{:<16} {}", e.id, e.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Export { id } => match vicert::lookup(&id) {
            Some(e) => {
                print!("{}", e.def.to_toml());
                ExitCode::SUCCESS
            }
            None => usage(format!("unknown problem id '{id}'")),
        },
    }
}
