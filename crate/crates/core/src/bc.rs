//! Ghost-cell boundary conditions, applied to the total state.
//!
//! The bottom and top sides are filled first over the interior columns, then
//! the left and right sides over every row, so corner ghosts come from the
//! x-side rule.

use crate::error::{Error, Result};
use crate::grid::Field2D;
use crate::physics::{
    conserved_from_primitive, dot, primitive_from_conserved, GasModel, Primitive, B1, B2, ENERGY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    ZeroGradient,
    Periodic,
    /// Ghosts take the reference state.
    SteadyState,
    /// Exponential extrapolation of density, momentum and pressure.
    Hydrostatic,
    /// Hydrostatic extrapolation plus a Gaussian-localized vertical piston.
    PistonHydro,
    /// Hydrostatic extrapolation plus a field-aligned piston in a window.
    PistonMhd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConfig {
    pub left: BoundaryKind,
    pub right: BoundaryKind,
    pub bottom: BoundaryKind,
    pub top: BoundaryKind,
    /// Piston velocity amplitude `c`.
    pub amplitude: f64,
    /// Center of the Gaussian hydrodynamic piston.
    pub piston_center: f64,
    /// Horizontal extent of the magnetic piston window.
    pub piston_window: (f64, f64),
    /// Scale height used by the exponential extrapolation.
    pub scale_height: f64,
}

/// Angular frequency of both pistons, `sin(6 pi t)`.
pub const PISTON_OMEGA: f64 = 6.0 * std::f64::consts::PI;

impl BoundaryConfig {
    pub fn uniform(kind: BoundaryKind) -> Self {
        BoundaryConfig {
            left: kind,
            right: kind,
            bottom: kind,
            top: kind,
            amplitude: 0.0,
            piston_center: 1.9,
            piston_window: (0.95, 1.05),
            scale_height: f64::INFINITY,
        }
    }

    /// x-periodic stratified atmosphere with a piston kind at the bottom.
    pub fn atmosphere(bottom: BoundaryKind, amplitude: f64, scale_height: f64) -> Self {
        BoundaryConfig {
            left: BoundaryKind::Periodic,
            right: BoundaryKind::Periodic,
            bottom,
            top: BoundaryKind::Hydrostatic,
            amplitude,
            scale_height,
            ..Self::uniform(BoundaryKind::Hydrostatic)
        }
    }

    pub fn kind(&self, side: Side) -> BoundaryKind {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
            Side::Bottom => self.bottom,
            Side::Top => self.top,
        }
    }

    pub fn validate(&self) -> Result<()> {
        use BoundaryKind::*;
        for side in [Side::Left, Side::Right, Side::Top] {
            if matches!(self.kind(side), PistonHydro | PistonMhd) {
                return Err(Error::Config(format!("piston boundary only allowed at the bottom, found on {side:?}")));
            }
        }
        if (self.left == Periodic) != (self.right == Periodic) {
            return Err(Error::Config("periodic x boundaries must be paired".into()));
        }
        if (self.bottom == Periodic) != (self.top == Periodic) {
            return Err(Error::Config("periodic y boundaries must be paired".into()));
        }
        let uses_h = [self.bottom, self.top]
            .iter()
            .any(|k| matches!(k, Hydrostatic | PistonHydro | PistonMhd));
        if uses_h && !(self.scale_height > 0.0) {
            return Err(Error::Config(format!("scale height must be positive, got {}", self.scale_height)));
        }
        Ok(())
    }

    /// Fills every ghost cell of the total state `field` at time `t`.
    ///
    /// With `solenoidal` set, the normal field component in the first ghost
    /// layer of every non-periodic side is chosen so the centered divergence
    /// vanishes in the adjacent interior cells.
    pub fn apply(
        &self,
        field: &mut Field2D,
        t: f64,
        gas: &GasModel,
        reference: &Field2D,
        solenoidal: bool,
    ) -> Result<()> {
        field.require(&field.grid.interior(), "boundary conditions")?;
        for side in [Side::Bottom, Side::Top, Side::Left, Side::Right] {
            self.apply_side(field, side, t, gas, reference, self.amplitude)?;
        }
        field.valid = field.grid.full();
        if solenoidal {
            self.solenoidal_ghosts(field)?;
        }
        Ok(())
    }

    /// Fills the ghosts of a reference state: pistons at rest and
    /// steady-state sides left as given.
    pub fn fill_reference(&self, reference: &mut Field2D, gas: &GasModel) -> Result<()> {
        reference.require(&reference.grid.interior(), "reference boundary conditions")?;
        let snapshot = reference.clone();
        for side in [Side::Bottom, Side::Top, Side::Left, Side::Right] {
            if self.kind(side) == BoundaryKind::SteadyState {
                reference.require(&reference.grid.full(), "steady-state reference ghosts")?;
                continue;
            }
            self.apply_side(reference, side, 0.0, gas, &snapshot, 0.0)?;
        }
        reference.valid = reference.grid.full();
        Ok(())
    }

    fn apply_side(
        &self,
        field: &mut Field2D,
        side: Side,
        t: f64,
        gas: &GasModel,
        reference: &Field2D,
        amplitude: f64,
    ) -> Result<()> {
        match self.kind(side) {
            BoundaryKind::ZeroGradient => apply_zero_gradient(field, side),
            BoundaryKind::Periodic => match side {
                Side::Left => apply_periodic_x(field)?,
                Side::Bottom => apply_periodic_y(field)?,
                Side::Right | Side::Top => {}
            },
            BoundaryKind::SteadyState => apply_steady_state(field, reference, side),
            BoundaryKind::Hydrostatic => apply_hydrostatic_y(field, self.scale_height, side, gas)?,
            BoundaryKind::PistonHydro => {
                apply_piston_hydro(field, amplitude, t, self.piston_center, self.scale_height, gas)?
            }
            BoundaryKind::PistonMhd => {
                apply_piston_mhd(field, amplitude, t, self.piston_window, self.scale_height, gas)?
            }
        }
        Ok(())
    }

    /// Resets the first-layer normal field on non-periodic sides, y sides
    /// first. Periodic ghosts are wrapped again after each pass so corner
    /// ghosts stay consistent with the adjusted rows and columns.
    fn solenoidal_ghosts(&self, field: &mut Field2D) -> Result<()> {
        let g = field.grid;
        let (nx, ny) = (g.nx as isize, g.ny as isize);
        let rx = g.dy / g.dx;
        let ry = g.dx / g.dy;
        let set = |field: &mut Field2D, c: (isize, isize), comp: usize, value: f64| {
            let old = field[c][comp];
            if value != old {
                field[c][ENERGY] += 0.5 * (value * value - old * old);
                field[c][comp] = value;
            }
        };
        if self.bottom != BoundaryKind::Periodic {
            for i in 0..nx {
                let v = field[(i, 1)][B2] + rx * (field[(i + 1, 0)][B1] - field[(i - 1, 0)][B1]);
                set(field, (i, -1), B2, v);
            }
            for i in 0..nx {
                let v = field[(i, ny - 2)][B2]
                    - rx * (field[(i + 1, ny - 1)][B1] - field[(i - 1, ny - 1)][B1]);
                set(field, (i, ny), B2, v);
            }
            if self.left == BoundaryKind::Periodic {
                apply_periodic_x(field)?;
            }
        }
        if self.left != BoundaryKind::Periodic {
            for j in 0..ny {
                let v = field[(1, j)][B1] + ry * (field[(0, j + 1)][B2] - field[(0, j - 1)][B2]);
                set(field, (-1, j), B1, v);
            }
            for j in 0..ny {
                let v = field[(nx - 2, j)][B1]
                    - ry * (field[(nx - 1, j + 1)][B2] - field[(nx - 1, j - 1)][B2]);
                set(field, (nx, j), B1, v);
            }
            if self.bottom == BoundaryKind::Periodic {
                apply_periodic_y(field)?;
            }
        }
        Ok(())
    }
}

/// Ghost cells of `side` as `(ghost, layer)` with `layer = 1` adjacent to the
/// interior, paired with the tangential index range.
fn ghost_cell(field: &Field2D, side: Side, t: isize, layer: isize) -> (isize, isize) {
    let (nx, ny) = (field.grid.nx as isize, field.grid.ny as isize);
    match side {
        Side::Left => (-layer, t),
        Side::Right => (nx - 1 + layer, t),
        Side::Bottom => (t, -layer),
        Side::Top => (t, ny - 1 + layer),
    }
}

fn tangential(field: &Field2D, side: Side) -> std::ops::Range<isize> {
    let g = field.grid;
    let ng = g.ng as isize;
    match side {
        Side::Left | Side::Right => -ng..g.ny as isize + ng,
        Side::Bottom | Side::Top => 0..g.nx as isize,
    }
}

pub fn apply_zero_gradient(field: &mut Field2D, side: Side) {
    let ng = field.grid.ng as isize;
    for t in tangential(field, side) {
        let edge = field[ghost_cell(field, side, t, 0)];
        for layer in 1..=ng {
            let c = ghost_cell(field, side, t, layer);
            field[c] = edge;
        }
    }
}

/// Wraps the x ghosts around the interior. Requires `nx >= ng`.
pub fn apply_periodic_x(field: &mut Field2D) -> Result<()> {
    let g = field.grid;
    let (nx, ng) = (g.nx as isize, g.ng as isize);
    if nx < ng {
        return Err(Error::Config(format!("periodic x needs nx >= {ng}, got {nx}")));
    }
    for j in -ng..g.ny as isize + ng {
        for layer in 1..=ng {
            field[(-layer, j)] = field[(nx - layer, j)];
            field[(nx - 1 + layer, j)] = field[(layer - 1, j)];
        }
    }
    Ok(())
}

/// Wraps the y ghosts of every column. Requires `ny >= ng`.
pub fn apply_periodic_y(field: &mut Field2D) -> Result<()> {
    let g = field.grid;
    let (ny, ng) = (g.ny as isize, g.ng as isize);
    if ny < ng {
        return Err(Error::Config(format!("periodic y needs ny >= {ng}, got {ny}")));
    }
    for i in -ng..g.nx as isize + ng {
        for layer in 1..=ng {
            field[(i, -layer)] = field[(i, ny - layer)];
            field[(i, ny - 1 + layer)] = field[(i, layer - 1)];
        }
    }
    Ok(())
}

pub fn apply_steady_state(field: &mut Field2D, reference: &Field2D, side: Side) {
    let ng = field.grid.ng as isize;
    for t in tangential(field, side) {
        for layer in 1..=ng {
            let c = ghost_cell(field, side, t, layer);
            field[c] = reference[c];
        }
    }
}

/// Cascaded exponential extrapolation along y, with the primitive state of
/// each ghost passed through `adjust` before it is stored.
fn extrapolate_y(
    field: &mut Field2D,
    scale_height: f64,
    side: Side,
    gas: &GasModel,
    mut adjust: impl FnMut(isize, f64, &mut Primitive) -> Result<()>,
) -> Result<()> {
    let g = field.grid;
    let factor = match side {
        Side::Bottom => (g.dy / scale_height).exp(),
        Side::Top => (-g.dy / scale_height).exp(),
        _ => return Err(Error::Config("hydrostatic extrapolation applies to y sides only".into())),
    };
    let ng = g.ng as isize;
    for i in 0..g.nx as isize {
        let edge = ghost_cell(field, side, i, 0);
        let mut prim = primitive_from_conserved(&field[edge], gas).map_err(|e| e.at_cell(edge.0, edge.1))?;
        for layer in 1..=ng {
            prim.rho *= factor;
            prim.p *= factor;
            let mut ghost = prim;
            adjust(i, g.x(i), &mut ghost)?;
            let c = ghost_cell(field, side, i, layer);
            field[c] = conserved_from_primitive(&ghost, gas);
        }
    }
    Ok(())
}

/// Exponential extrapolation of density, momentum and pressure with factor
/// `exp(+dy/H)` below the domain and `exp(-dy/H)` above it. Energy is rebuilt
/// from the extrapolated pressure; the field is copied from the edge cell.
pub fn apply_hydrostatic_y(field: &mut Field2D, scale_height: f64, side: Side, gas: &GasModel) -> Result<()> {
    extrapolate_y(field, scale_height, side, gas, |_, _, _| Ok(()))
}

pub fn piston_hydro_velocity(x: f64, amplitude: f64, t: f64, center: f64) -> f64 {
    (-100.0 * (x - center).powi(2)).exp() * amplitude * (PISTON_OMEGA * t).sin()
}

/// Bottom piston `u2 = exp(-100 (x - x_c)^2) c sin(6 pi t)` on top of the
/// hydrostatic extrapolation.
pub fn apply_piston_hydro(
    field: &mut Field2D,
    amplitude: f64,
    t: f64,
    center: f64,
    scale_height: f64,
    gas: &GasModel,
) -> Result<()> {
    extrapolate_y(field, scale_height, Side::Bottom, gas, |_, x, prim| {
        prim.u[1] = piston_hydro_velocity(x, amplitude, t, center);
        Ok(())
    })
}

/// Bottom piston driving the velocity along the local field direction inside
/// the window and holding the ghosts at rest outside it.
pub fn apply_piston_mhd(
    field: &mut Field2D,
    amplitude: f64,
    t: f64,
    window: (f64, f64),
    scale_height: f64,
    gas: &GasModel,
) -> Result<()> {
    let drive = amplitude * (PISTON_OMEGA * t).sin();
    extrapolate_y(field, scale_height, Side::Bottom, gas, |i, x, prim| {
        if drive == 0.0 || x < window.0 || x > window.1 {
            prim.u = [0.0; 3];
            return Ok(());
        }
        let bmag = dot(prim.b, prim.b).sqrt();
        if !(bmag > 0.0) {
            return Err(Error::ZeroFieldInPiston { i });
        }
        prim.u = prim.b.map(|b| b / bmag * drive);
        Ok(())
    })
}
