//! Piston-driven waves in a magnetized atmosphere with the divergence
//! correction. Snapshots carry the field-aligned velocity and plasma beta.
//!
//!     cargo run --release --example mhd_wave [nx] [ny] [mu]

use std::path::PathBuf;

use wbmhd::cases::CaseName;
use wbmhd::driver::{run, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let nx = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let ny = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50);
    let mu = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1.0);

    let mut cfg = RunConfig::new(CaseName::MhdAtmosphere);
    cfg.case.nx = nx;
    cfg.case.ny = ny;
    cfg.case.params.mu = mu;
    cfg.snapshots = 3;
    cfg.output_dir = Some(PathBuf::from("out/mhd_wave"));
    let report = run(&cfg)?;
    for row in report.series.iter().step_by((report.series.len() / 10).max(1)) {
        println!("step {:>5}  t = {:.4}  max|div B| = {:.2e}  max|dU| = {:.3e}", row.step, row.t, row.max_div_b, row.max_delta);
    }
    println!("files: {}", report.files.len());
    Ok(())
}
