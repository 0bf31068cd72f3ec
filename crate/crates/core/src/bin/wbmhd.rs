use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use wbmhd::driver::{run_with_report, Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    let Command::Run(args) = cli.command;
    let cfg = match args.into_config() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (report, error) = run_with_report(&cfg);
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "case={} steps={} t={:.6e} wall={:.2}s max_div_b={:.3e} max_delta={:.3e} reference_residual={:.3e}",
        report.case,
        report.steps,
        report.final_time,
        report.wall_time.as_secs_f64(),
        report.max_div_b(),
        report.max_delta(),
        report.reference_residual,
    );
    for f in &report.files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
    match error {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
