//! Well-balanced unstaggered central scheme.
//!
//! The solver evolves `delta = U - Utilde` for a fixed reference state
//! `Utilde`. One step projects `delta` onto the staggered dual grid, predicts
//! midpoint values with a Taylor expansion in time, evolves the staggered
//! cell averages and projects back. Every flux appears as a difference
//! `F(delta + Utilde) - F(Utilde)`, so `delta = 0` is reproduced exactly for
//! any valid reference.
//!
//! Valid index ranges shrink through a step: with `g` ghost layers the
//! main-grid state covers `[-g, n + g - 1]`, slopes `[-g + 1, n + g - 2]`,
//! the staggered state `[-g + 1, n + g - 3]` and the staggered slopes one
//! layer less. Back projection needs the staggered nodes `[-1, n - 1]`, so
//! the full step consumes three ghost layers.

use crate::bc::BoundaryConfig;
use crate::ctm::{auto_threshold, average_to_staggered, ctm_correct, max_abs_div, CtmMode, MagneticPair};
use crate::error::{Error, Result};
use crate::grid::{Field2D, Lattice, Region, Stagger};
use crate::limiter::{slopes_x, slopes_y, LimiterConfig};
use crate::physics::{
    flux_x, flux_y, primitive_from_conserved, primitive_unchecked, source, Conserved, GasModel, B1, B2,
};
use crate::wavespeed::{cfl_dt, DEFAULT_CFL};

type FluxFn = fn(&Conserved, &GasModel) -> Result<Conserved>;

/// Directional derivative `J_F(u) v` by a central difference of the flux.
pub fn jvp(flux: FluxFn, u: &Conserved, v: &Conserved, gas: &GasModel) -> Result<Conserved> {
    let vn = v.norm();
    if vn == 0.0 {
        return Ok(Conserved::ZERO);
    }
    let eps = 1e-7 * (1.0 + u.norm()) / (1.0 + vn);
    let fp = flux(&(*u + eps * *v), gas)?;
    let fm = flux(&(*u - eps * *v), gas)?;
    Ok((0.5 / eps) * (fp - fm))
}

fn map_cells(
    proto: &Field2D,
    stagger: Stagger,
    region: Region,
    mut f: impl FnMut(isize, isize) -> Result<Conserved>,
) -> Result<Field2D> {
    Lattice::try_from_region(proto.grid, stagger, region, |i, j| f(i, j).map_err(|e| e.at_cell(i, j)))
}

/// Steady state `Utilde` together with the quantities the scheme reuses
/// every step.
#[derive(Debug, Clone)]
pub struct ReferenceState {
    pub utilde: Field2D,
    pub ftilde: Field2D,
    pub gtilde: Field2D,
    pub slopes_x: Field2D,
    pub slopes_y: Field2D,
    /// `J_F(Utilde)` applied to the limited x-slopes, and the y analogue.
    pub jvp_x: Field2D,
    pub jvp_y: Field2D,
    /// Forward projection of `Utilde` onto the staggered grid.
    pub staggered: Field2D,
}

impl ReferenceState {
    /// `utilde` must be valid on every storage cell, ghosts included.
    pub fn new(utilde: Field2D, gas: &GasModel, limiter: &LimiterConfig) -> Result<Self> {
        let grid = utilde.grid;
        utilde.require(&grid.full(), "reference state")?;
        for (i, j) in grid.full().cells() {
            primitive_from_conserved(&utilde[(i, j)], gas).map_err(|e| e.at_cell(i, j))?;
        }
        let ftilde = map_cells(&utilde, Stagger::Main, utilde.valid, |i, j| flux_x(&utilde[(i, j)], gas))?;
        let gtilde = map_cells(&utilde, Stagger::Main, utilde.valid, |i, j| flux_y(&utilde[(i, j)], gas))?;
        let sx = slopes_x(&utilde, limiter)?;
        let sy = slopes_y(&utilde, limiter)?;
        let region = sx.valid.intersect(&sy.valid);
        let jvp_x = map_cells(&utilde, Stagger::Main, region, |i, j| jvp(flux_x, &utilde[(i, j)], &sx[(i, j)], gas))?;
        let jvp_y = map_cells(&utilde, Stagger::Main, region, |i, j| jvp(flux_y, &utilde[(i, j)], &sy[(i, j)], gas))?;
        let staggered = forward_project(&utilde, limiter)?;
        Ok(ReferenceState { utilde, ftilde, gtilde, slopes_x: sx, slopes_y: sy, jvp_x, jvp_y, staggered })
    }

    pub fn grid(&self) -> crate::grid::Grid {
        self.utilde.grid
    }
}

/// Max-norm of the centered steady-state residual `F_x + G_y - S` over the
/// interior, per component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub per_component: Conserved,
    pub max: f64,
}

impl ResidualReport {
    pub fn within(&self, tol: f64) -> bool {
        self.max <= tol
    }
}

pub fn validate_reference(reference: &ReferenceState, gas: &GasModel) -> ResidualReport {
    let g = reference.grid();
    let (f, gg, u) = (&reference.ftilde, &reference.gtilde, &reference.utilde);
    let mut worst = Conserved::ZERO;
    for (i, j) in g.interior().cells() {
        let r = (0.5 / g.dx) * (f[(i + 1, j)] - f[(i - 1, j)]) + (0.5 / g.dy) * (gg[(i, j + 1)] - gg[(i, j - 1)])
            - source(&u[(i, j)], gas);
        worst = worst.zip(r, |a, b| a.max(b.abs()));
    }
    ResidualReport { per_component: worst, max: worst.max_abs() }
}

/// Projection of main-grid values onto the staggered nodes using limited
/// slopes of the same field.
pub fn forward_project(delta: &Field2D, cfg: &LimiterConfig) -> Result<Field2D> {
    let sx = slopes_x(delta, cfg)?;
    let sy = slopes_y(delta, cfg)?;
    let region = sx.valid.intersect(&sy.valid).shrink(0, 1, 0, 1);
    if region.is_empty() {
        return Err(Error::MissingGhostLayer("forward projection has no valid nodes".into()));
    }
    Ok(Lattice::from_region(delta.grid, Stagger::Staggered, region, |k, l| {
        let d = delta;
        let avg = 0.25 * ((d[(k, l)] + d[(k + 1, l)]) + (d[(k, l + 1)] + d[(k + 1, l + 1)]));
        let jx = (sx[(k + 1, l)] - sx[(k, l)]) + (sx[(k + 1, l + 1)] - sx[(k, l + 1)]);
        let jy = (sy[(k, l + 1)] - sy[(k, l)]) + (sy[(k + 1, l + 1)] - sy[(k + 1, l)]);
        avg - (1.0 / 16.0) * (jx + jy)
    }))
}

/// Midpoint values `delta^{n+1/2}` on main cells.
///
/// The flux derivatives use limited slopes of the total state
/// `delta + Utilde`; the reference contributes the same construction at
/// `Utilde`.
pub fn predict_midpoint(
    delta: &Field2D,
    reference: &ReferenceState,
    gas: &GasModel,
    cfg: &LimiterConfig,
    dt: f64,
) -> Result<Field2D> {
    let g = delta.grid;
    let ut = &reference.utilde;
    let total = Lattice::from_region(g, Stagger::Main, delta.valid, |i, j| delta[(i, j)] + ut[(i, j)]);
    let sx = slopes_x(&total, cfg)?;
    let sy = slopes_y(&total, cfg)?;
    let region = sx
        .valid
        .intersect(&sy.valid)
        .intersect(&reference.jvp_x.valid)
        .intersect(&reference.jvp_y.valid);
    let half = 0.5 * dt;
    map_cells(delta, Stagger::Main, region, |i, j| {
        let u = total[(i, j)];
        let fx = jvp(flux_x, &u, &sx[(i, j)], gas)? - reference.jvp_x[(i, j)];
        let gy = jvp(flux_y, &u, &sy[(i, j)], gas)? - reference.jvp_y[(i, j)];
        let d = delta[(i, j)];
        Ok(d + half * (source(&d, gas) - (1.0 / g.dx) * fx - (1.0 / g.dy) * gy))
    })
}

/// Staggered update from `t^n` to `t^{n+1}` driven by midpoint fluxes.
pub fn evolve_staggered(
    stag_n: &Field2D,
    mid: &Field2D,
    reference: &ReferenceState,
    gas: &GasModel,
    dt: f64,
) -> Result<Field2D> {
    let g = mid.grid;
    let ut = &reference.utilde;
    let fd = map_cells(mid, Stagger::Main, mid.valid, |i, j| {
        Ok(flux_x(&(mid[(i, j)] + ut[(i, j)]), gas)? - reference.ftilde[(i, j)])
    })?;
    let gd = map_cells(mid, Stagger::Main, mid.valid, |i, j| {
        Ok(flux_y(&(mid[(i, j)] + ut[(i, j)]), gas)? - reference.gtilde[(i, j)])
    })?;
    let region = mid.valid.shrink(0, 1, 0, 1).intersect(&stag_n.valid);
    if region.is_empty() {
        return Err(Error::MissingGhostLayer("staggered evolution has no valid nodes".into()));
    }
    let (cx, cy) = (dt / (2.0 * g.dx), dt / (2.0 * g.dy));
    Ok(Lattice::from_region(g, Stagger::Staggered, region, |k, l| {
        let dfx = (fd[(k + 1, l)] - fd[(k, l)]) + (fd[(k + 1, l + 1)] - fd[(k, l + 1)]);
        let dgy = (gd[(k, l + 1)] - gd[(k, l)]) + (gd[(k + 1, l + 1)] - gd[(k + 1, l)]);
        let m = 0.25 * ((mid[(k, l)] + mid[(k + 1, l)]) + (mid[(k, l + 1)] + mid[(k + 1, l + 1)]));
        stag_n[(k, l)] - cx * dfx - cy * dgy + dt * source(&m, gas)
    }))
}

/// Projection of staggered values back onto main cells using limited
/// staggered slopes.
pub fn back_project(stag: &Field2D, cfg: &LimiterConfig) -> Result<Field2D> {
    let tx = slopes_x(stag, cfg)?;
    let ty = slopes_y(stag, cfg)?;
    let region = tx.valid.intersect(&ty.valid).shrink(1, 0, 1, 0);
    let needed = stag.grid.interior();
    if !region.contains(&needed) {
        return Err(Error::MissingGhostLayer(format!(
            "back projection covers {region:?}, interior is {needed:?}"
        )));
    }
    Ok(Lattice::from_region(stag.grid, Stagger::Main, needed, |i, j| {
        let s = stag;
        let avg = 0.25 * ((s[(i - 1, j - 1)] + s[(i, j - 1)]) + (s[(i - 1, j)] + s[(i, j)]));
        let jx = (tx[(i, j - 1)] - tx[(i - 1, j - 1)]) + (tx[(i, j)] - tx[(i - 1, j)]);
        let jy = (ty[(i - 1, j)] - ty[(i - 1, j - 1)]) + (ty[(i, j)] - ty[(i, j - 1)]);
        avg - (1.0 / 16.0) * (jx + jy)
    }))
}

/// Numerical parameters of the time integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scheme {
    pub gas: GasModel,
    pub limiter: LimiterConfig,
    pub cfl: f64,
    pub ctm: CtmMode,
    pub bc: BoundaryConfig,
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub delta: Field2D,
    pub dt: f64,
    pub ctm_applied: bool,
}

impl Scheme {
    pub fn new(gas: GasModel, bc: BoundaryConfig) -> Self {
        Scheme { gas, limiter: LimiterConfig::default(), cfl: DEFAULT_CFL, ctm: CtmMode::Off, bc }
    }

    /// Fills the ghosts of `delta` at time `t` by applying the boundary
    /// conditions to the total state. Returns `(delta, total)`, both valid on
    /// every storage cell. Interior values of `delta` are left untouched.
    pub fn fill_ghosts(&self, delta: &Field2D, reference: &ReferenceState, t: f64) -> Result<(Field2D, Field2D)> {
        let g = delta.grid;
        let interior = g.interior();
        delta.require(&interior, "fill_ghosts")?;
        let ut = &reference.utilde;
        let mut total = Lattice::from_region(g, Stagger::Main, interior, |i, j| delta[(i, j)] + ut[(i, j)]);
        self.bc.apply(&mut total, t, &self.gas, ut, self.ctm != CtmMode::Off)?;
        let mut out = delta.clone();
        for (i, j) in g.full().cells() {
            if !interior.contains_cell(i, j) {
                out[(i, j)] = total[(i, j)] - ut[(i, j)];
            }
        }
        out.valid = g.full();
        Ok((out, total))
    }

    /// Whether the divergence correction runs on a step starting from `total`.
    pub fn wants_ctm(&self, total: &Field2D) -> Result<bool> {
        Ok(match self.ctm {
            CtmMode::On => true,
            CtmMode::Off => false,
            CtmMode::Auto => {
                let b = MagneticPair::from_field(total);
                let interior = total.grid.interior();
                let bmax = interior
                    .cells()
                    .fold(0.0, |m: f64, c| m.max(b.bx[c].abs()).max(b.by[c].abs()));
                bmax > 0.0 && max_abs_div(&b)? > auto_threshold(bmax, &total.grid)
            }
        })
    }

    /// One step with the CFL time step, clipped to `dt_max`.
    pub fn step(&self, delta: &Field2D, reference: &ReferenceState, t: f64, dt_max: f64) -> Result<StepOutput> {
        let (delta, total) = self.fill_ghosts(delta, reference, t)?;
        let dt = cfl_dt(&total, &self.gas, self.cfl)?.min(dt_max);
        self.advance(&delta, &total, reference, dt)
    }

    /// One step of size `dt` from ghost-filled `delta` and its total state.
    pub fn advance(&self, delta: &Field2D, total: &Field2D, reference: &ReferenceState, dt: f64) -> Result<StepOutput> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidState { reason: format!("time step {dt} is not positive"), cell: None });
        }
        let gas = &self.gas;
        let stag_n = forward_project(delta, &self.limiter)?;
        let mid = predict_midpoint(delta, reference, gas, &self.limiter, dt)?;
        let stag_np1 = evolve_staggered(&stag_n, &mid, reference, gas, dt)?;
        let mut next = back_project(&stag_np1, &self.limiter)?;

        let ctm_applied = self.wants_ctm(total)?;
        if ctm_applied {
            let b_main = MagneticPair::from_field(total);
            let b_stag_n = MagneticPair {
                bx: average_to_staggered(&b_main.bx),
                by: average_to_staggered(&b_main.by),
            };
            let prim_n = Lattice::try_from_region(total.grid, Stagger::Main, total.valid, |i, j| {
                primitive_unchecked(&total[(i, j)], gas).map_err(|e| e.at_cell(i, j))
            })?;
            let rs = &reference.staggered;
            let region = stag_np1.valid.intersect(&rs.valid);
            let prim_np1 = Lattice::try_from_region(total.grid, Stagger::Staggered, region, |k, l| {
                primitive_unchecked(&(stag_np1[(k, l)] + rs[(k, l)]), gas).map_err(|e| e.at_cell(k, l))
            })?;
            let update = ctm_correct(&b_stag_n, &prim_n, &prim_np1, dt)?;
            let ut = &reference.utilde;
            for c in total.grid.interior().cells() {
                next[c][B1] = update.main.bx[c] - ut[c][B1];
                next[c][B2] = update.main.by[c] - ut[c][B2];
            }
        }

        let ut = &reference.utilde;
        for (i, j) in next.grid.interior().cells() {
            let u = next[(i, j)] + ut[(i, j)];
            if u.0.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidState { reason: "non-finite state".into(), cell: Some((i, j)) });
            }
            primitive_from_conserved(&u, gas).map_err(|e| e.at_cell(i, j))?;
        }
        Ok(StepOutput { delta: next, dt, ctm_applied })
    }
}
