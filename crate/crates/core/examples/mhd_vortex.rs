//! Magnetized vortex. With the vortex itself as reference state it stays
//! put to rounding; with a uniform reference and background flow it is
//! advected and the error against the exact solution is reported.
//!
//!     cargo run --release --example mhd_vortex [n] [t_final]

use wbmhd::cases::{vortex_state, CaseConfig, CaseName};
use wbmhd::driver::Simulation;
use wbmhd::physics::{primitive_from_conserved, MOM1};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map(|s| s.parse()).transpose()?.unwrap_or(64);
    let t_final: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10.0);

    let mut case = CaseConfig::new(CaseName::Vortex);
    case.nx = n;
    case.ny = n;
    case.t_final = t_final;
    let mut sim = Simulation::new(&case)?;
    let p0 = sim.total()?;
    sim.run_until(t_final, |_, _, _| Ok(()))?;
    let p1 = sim.total()?;
    let gas = sim.scheme.gas;
    let mut dev: f64 = 0.0;
    for c in p0.grid.interior().cells() {
        let (a, b) = (primitive_from_conserved(&p0[c], &gas)?, primitive_from_conserved(&p1[c], &gas)?);
        dev = dev.max((a.p - b.p).abs());
    }
    println!("steady vortex, {n}^2, t = {t_final}: max pressure change {dev:.3e} over {} steps", sim.steps);

    case.params.u0 = 1.0;
    case.params.v0 = 1.0;
    case.t_final = 1.0;
    let mut sim = Simulation::new(&case)?;
    sim.run_until(1.0, |_, _, _| Ok(()))?;
    let total = sim.total()?;
    let g = total.grid;
    let mut err = 0.0;
    for (i, j) in g.interior().cells() {
        let exact = vortex_state(&case.params, g.x(i), g.y(j), 1.0, 1.0);
        err += (total[(i, j)][MOM1] - exact.rho * exact.u[0]).abs() * g.dx * g.dy;
    }
    println!("advected vortex, {n}^2, t = 1: L1 error of rho*u1 = {err:.3e}");
    Ok(())
}
