//! Magnetosonic wave speeds and the CFL time step.

use crate::error::{Error, Result};
use crate::grid::Field2D;
use crate::physics::{dot, primitive_from_conserved, GasModel, Primitive};

/// Default Courant number.
pub const DEFAULT_CFL: f64 = 0.485;
/// Upper bound on the Courant number accepted by the two-stage central update.
pub const MAX_CFL: f64 = 0.5;

/// Characteristic speeds for one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpeeds {
    /// Sound speed.
    pub a: f64,
    /// Alfven-scaled field `B / sqrt(rho)`.
    pub b: [f64; 3],
    pub cf: f64,
    pub cs: f64,
}

fn speeds_along(prim: &Primitive, gas: &GasModel, n: usize) -> Result<WaveSpeeds> {
    if !(prim.rho > 0.0) {
        return Err(Error::NonpositiveDensity { rho: prim.rho, cell: None });
    }
    if !(prim.p > 0.0) {
        return Err(Error::NonpositivePressure { p: prim.p, cell: None });
    }
    let a2 = gas.gamma * prim.p / prim.rho;
    let sq = prim.rho.sqrt();
    let b = prim.b.map(|v| v / sq);
    let b2 = dot(b, b);
    let bn2 = b[n] * b[n];
    let sum = a2 + b2;
    let mut disc = sum * sum - 4.0 * a2 * bn2;
    if disc < 0.0 {
        if -disc < 1e-12 * sum * sum {
            disc = 0.0;
        } else {
            return Err(Error::InvalidState {
                reason: format!("negative magnetosonic discriminant {disc:e}"),
                cell: None,
            });
        }
    }
    let cf2 = 0.5 * (sum + disc.sqrt());
    let cf = cf2.sqrt();
    // cs from the product of the roots, cf^2 cs^2 = a^2 bn^2, which avoids the
    // cancellation in (sum - sqrt(disc)).
    let cs = if cf > 0.0 { (a2.sqrt() * b[n].abs()) / cf } else { 0.0 };
    Ok(WaveSpeeds { a: a2.sqrt(), b, cf, cs })
}

pub fn speeds_x(prim: &Primitive, gas: &GasModel) -> Result<WaveSpeeds> {
    speeds_along(prim, gas, 0)
}

pub fn speeds_y(prim: &Primitive, gas: &GasModel) -> Result<WaveSpeeds> {
    speeds_along(prim, gas, 1)
}

/// Largest characteristic speed magnitude in x and in y.
pub fn max_abs_eigen(prim: &Primitive, gas: &GasModel) -> Result<(f64, f64)> {
    let sx = speeds_x(prim, gas)?;
    let sy = speeds_y(prim, gas)?;
    Ok((prim.u[0].abs() + sx.cf, prim.u[1].abs() + sy.cf))
}

/// Stable time step over the interior cells of `field`.
pub fn cfl_dt(field: &Field2D, gas: &GasModel, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= MAX_CFL) {
        return Err(Error::Config(format!("CFL number {cfl} outside (0, {MAX_CFL}]")));
    }
    let grid = field.grid;
    let interior = grid.interior();
    field.require(&interior, "cfl_dt")?;
    let mut bound = f64::INFINITY;
    for (i, j) in interior.cells() {
        let prim = primitive_from_conserved(&field[(i, j)], gas).map_err(|e| e.at_cell(i, j))?;
        let (lx, ly) = max_abs_eigen(&prim, gas).map_err(|e| e.at_cell(i, j))?;
        bound = bound.min(grid.dx / lx).min(grid.dy / ly);
    }
    Ok(cfl * bound)
}
