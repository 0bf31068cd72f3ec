//! Drives a run from a flat `key = value` file, the same format the command
//! line accepts with `--config`.
//!
//!     cargo run --release --example config_file [path]

use wbmhd::driver::{config_from_settings, parse_config_file, run};

const SAMPLE: &str = "\
# quasi-1D shock tube
case = brio-wu
nx = 200
ny = 4
t_final = 0.1
snapshots = 2
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => SAMPLE.to_string(),
    };
    let cfg = config_from_settings(&parse_config_file(&text)?)?;
    let report = run(&cfg)?;
    println!("{}: {} steps to t = {} ({})", report.case, report.steps, report.final_time, report.status);
    Ok(())
}
