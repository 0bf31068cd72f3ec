//! Four-state Riemann problem with the divergence correction switched on.
//! Writes CSV and VTK snapshots to `out/four_state`.
//!
//!     cargo run --release --example four_state [n]

use std::path::PathBuf;

use wbmhd::cases::CaseName;
use wbmhd::driver::{run, Format, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(100);
    let mut cfg = RunConfig::new(CaseName::FourState);
    cfg.case.nx = n;
    cfg.case.ny = n;
    cfg.snapshots = 4;
    cfg.formats = vec![Format::Csv, Format::Vtk];
    cfg.output_dir = Some(PathBuf::from("out/four_state"));
    let report = run(&cfg)?;
    println!(
        "{} steps to t = {}, max|div B| = {:.3e}, {} files in out/four_state",
        report.steps,
        report.final_time,
        report.max_div_b(),
        report.files.len()
    );
    Ok(())
}
