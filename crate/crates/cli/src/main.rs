use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use exalg_cli::report::Format;
use exalg_cli::{run_job, Overrides};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Md,
}

/// Run one exalg job. Exit codes: 0 success, 2 mathematical negative, 1 error.
#[derive(Debug, Parser)]
#[command(name = "exalg", version)]
struct Args {
    /// Job file (JSON); standard input when omitted or "-".
    #[arg(long)]
    job: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    length_bound: Option<usize>,
    #[arg(long)]
    degree_bound: Option<u32>,
    #[arg(long)]
    budget: Option<usize>,
    /// Record elapsed wall-clock time in the report (makes output run-dependent).
    #[arg(long)]
    wall_clock: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match &args.job {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map(|_| s)
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("exalg: cannot read job: {e}");
            return ExitCode::from(1);
        }
    };
    let overrides = Overrides {
        seed: args.seed,
        length_bound: args.length_bound,
        degree_bound: args.degree_bound,
        budget: args.budget,
    };
    let report = run_job(&text, &overrides, args.wall_clock);
    if let Some(e) = &report.error {
        eprintln!("exalg: {}", e["message"].as_str().unwrap_or("error"));
    }
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Md => Format::Markdown,
    };
    let rendered = report.render(format);
    let written = match &args.out {
        Some(path) => std::fs::write(path, rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("exalg: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(report.exit_code() as u8)
}
