//! Brio-Wu shock tube on a quasi-1D grid. Prints the density and transverse
//! field along the tube and writes the section to `out/brio_wu/section.csv`.
//!
//!     cargo run --release --example brio_wu [nx]

use std::fs;

use wbmhd::cases::{CaseConfig, CaseName};
use wbmhd::driver::{cross_section, Axis, Simulation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nx = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(400);
    let mut case = CaseConfig::new(CaseName::BrioWu);
    case.nx = nx;
    case.ny = 4;
    let mut sim = Simulation::new(&case)?;
    sim.run_until(case.t_final, |_, _, _| Ok(()))?;

    let total = sim.total()?;
    let vars: Vec<String> = ["rho", "u1", "u2", "p", "B2"].iter().map(|s| s.to_string()).collect();
    let sec = cross_section(&total, &sim.scheme.gas, Axis::X, 0.0, &vars)?;
    fs::create_dir_all("out/brio_wu")?;
    fs::write("out/brio_wu/section.csv", sec.to_csv())?;

    println!("t = {} after {} steps on {nx} cells", sim.t, sim.steps);
    let (rho, b2) = (sec.column("rho").unwrap(), sec.column("B2").unwrap());
    for k in (0..nx).step_by((nx / 40).max(1)) {
        println!("x = {:+.3}  rho = {:.4}  B2 = {:+.4}", sec.positions[k], rho[k], b2[k]);
    }
    Ok(())
}
