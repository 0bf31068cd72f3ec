//! Piston-driven waves in an isothermal atmosphere without magnetic field.
//! Prints the vertical velocity column above the piston.
//!
//!     cargo run --release --example hydro_wave [nx] [ny] [c]

use std::path::PathBuf;

use wbmhd::cases::CaseName;
use wbmhd::driver::{run, Axis, RunConfig, SectionRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let nx = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let ny = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50);
    let c = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.3);

    let mut cfg = RunConfig::new(CaseName::HydroAtmosphere);
    cfg.case.nx = nx;
    cfg.case.ny = ny;
    cfg.case.params.c = c;
    cfg.case.sync_boundaries();
    cfg.snapshots = 3;
    cfg.output_dir = Some(PathBuf::from("out/hydro_wave"));
    cfg.sections = vec![SectionRequest { axis: Axis::Y, coord: cfg.case.bc.piston_center, variables: vec!["u2".into()] }];
    let report = run(&cfg)?;
    println!("{} steps to t = {}, max|U - Utilde| = {:.3e}", report.steps, report.final_time, report.max_delta());
    let section = std::fs::read_to_string("out/hydro_wave/section_0.csv")?;
    for line in section.lines().step_by((ny / 20).max(1)) {
        println!("{line}");
    }
    Ok(())
}
