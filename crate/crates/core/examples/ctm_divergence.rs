//! The same four-state run with and without the divergence correction.
//!
//!     cargo run --release --example ctm_divergence [n]

use wbmhd::cases::{CaseConfig, CaseName};
use wbmhd::ctm::{max_abs_div, CtmMode, MagneticPair};
use wbmhd::driver::Simulation;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(64);
    for mode in [CtmMode::On, CtmMode::Off] {
        let mut case = CaseConfig::new(CaseName::FourState);
        case.nx = n;
        case.ny = n;
        case.ctm = mode;
        let mut sim = Simulation::new(&case)?;
        let mut worst: f64 = 0.0;
        sim.run_until(case.t_final, |s, _, _| {
            worst = worst.max(max_abs_div(&MagneticPair::from_field(&s.total()?))?);
            Ok(())
        })?;
        println!("ctm {mode:>3}: max|div B| over {} steps = {worst:.3e}", sim.steps);
    }
    Ok(())
}
