//! Constrained transport for the in-plane magnetic field on the unstaggered grid.
//!
//! The staggered field at `t^n` is the four-point average of the main-grid
//! field. It is advanced with centered differences of the out-of-plane
//! electric field `Omega = -u1 B2 + u2 B1`, time-centered between the
//! averaged main-grid values at `t^n` and the staggered solution at
//! `t^{n+1}`, and then averaged back to the main grid. The centered
//! divergence of the result is the weighted average of the centered
//! divergence at `t^n`, so a discretely solenoidal field stays solenoidal.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Field2D, Grid, Lattice, Region, Stagger};
use crate::physics::{electric_omega, Primitive, B1, B2};

/// When the correction is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CtmMode {
    On,
    #[default]
    Off,
    /// Applied on steps that start with a divergence above [`auto_threshold`].
    Auto,
}

impl FromStr for CtmMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(CtmMode::On),
            "off" => Ok(CtmMode::Off),
            "auto" => Ok(CtmMode::Auto),
            other => Err(Error::Usage(format!("ctm mode must be on|off|auto, got '{other}'"))),
        }
    }
}

impl std::fmt::Display for CtmMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CtmMode::On => "on",
            CtmMode::Off => "off",
            CtmMode::Auto => "auto",
        })
    }
}

/// Divergence level above which `auto` mode applies the correction.
pub fn auto_threshold(max_abs_b: f64, grid: &Grid) -> f64 {
    1e-10 * max_abs_b / grid.min_spacing()
}

/// In-plane field components on one lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticPair {
    pub bx: Lattice<f64>,
    pub by: Lattice<f64>,
}

impl MagneticPair {
    pub fn from_field(field: &Field2D) -> Self {
        MagneticPair {
            bx: field.map(|u| u[B1]),
            by: field.map(|u| u[B2]),
        }
    }

    pub fn grid(&self) -> Grid {
        self.bx.grid
    }

    pub fn valid(&self) -> Region {
        self.bx.valid.intersect(&self.by.valid)
    }
}

/// Result of a constrained-transport update.
#[derive(Debug, Clone)]
pub struct CtmUpdate {
    pub staggered: MagneticPair,
    pub main: MagneticPair,
}

fn centered_divergence(b: &MagneticPair) -> Result<Lattice<f64>> {
    let region = b.valid().shrink(1, 1, 1, 1);
    if region.is_empty() {
        return Err(Error::MissingGhostLayer(
            "divergence needs one neighbour on every side".into(),
        ));
    }
    let g = b.grid();
    let (bx, by) = (&b.bx, &b.by);
    Ok(Lattice::from_region(g, bx.stagger, region, |i, j| {
        (bx[(i + 1, j)] - bx[(i - 1, j)]) / (2.0 * g.dx)
            + (by[(i, j + 1)] - by[(i, j - 1)]) / (2.0 * g.dy)
    }))
}

/// Centered divergence at main-grid cells.
pub fn divergence_main(b: &MagneticPair) -> Result<Lattice<f64>> {
    centered_divergence(b)
}

/// Centered divergence at staggered nodes, using neighbours at `+-3/2`.
pub fn divergence_staggered(b: &MagneticPair) -> Result<Lattice<f64>> {
    centered_divergence(b)
}

/// Max-norm of the main-grid divergence over the interior cells.
pub fn max_abs_div(b: &MagneticPair) -> Result<f64> {
    let div = divergence_main(b)?;
    let interior = b.grid().interior();
    div.require(&interior, "max_abs_div")?;
    Ok(interior.cells().fold(0.0, |m, c| f64::max(m, div[c].abs())))
}

#[inline]
fn quarter_sum(a: f64, b: f64, c: f64, d: f64) -> f64 {
    0.25 * ((a + b) + (c + d))
}

/// Four-point average of main-grid values onto staggered nodes.
pub fn average_to_staggered(main: &Lattice<f64>) -> Lattice<f64> {
    let region = main.valid.shrink(0, 1, 0, 1);
    Lattice::from_region(main.grid, Stagger::Staggered, region, |k, l| {
        quarter_sum(
            main[(k, l)],
            main[(k + 1, l)],
            main[(k, l + 1)],
            main[(k + 1, l + 1)],
        )
    })
}

/// Four-point average of staggered values onto main-grid cells.
pub fn average_to_main(stag: &Lattice<f64>) -> Lattice<f64> {
    let region = stag.valid.shrink(1, 0, 1, 0);
    Lattice::from_region(stag.grid, Stagger::Main, region, |i, j| {
        quarter_sum(
            stag[(i - 1, j - 1)],
            stag[(i, j - 1)],
            stag[(i - 1, j)],
            stag[(i, j)],
        )
    })
}

/// Constrained-transport update of the in-plane field.
///
/// `b_stag_n` is the staggered field at `t^n`, `prim_n` the main-grid state at
/// `t^n` and `prim_np1_stag` the staggered state at `t^{n+1}`.
pub fn ctm_correct(
    b_stag_n: &MagneticPair,
    prim_n: &Lattice<Primitive>,
    prim_np1_stag: &Lattice<Primitive>,
    dt: f64,
) -> Result<CtmUpdate> {
    let grid = b_stag_n.grid();
    let omega_n = average_to_staggered(&prim_n.map(|p| electric_omega(&p)));
    let omega_np1 = prim_np1_stag.map(|p| electric_omega(&p));
    let half_region = omega_n.valid.intersect(&omega_np1.valid);
    let omega_half = Lattice::from_region(grid, Stagger::Staggered, half_region, |k, l| {
        0.5 * (omega_np1[(k, l)] + omega_n[(k, l)])
    });

    let region = half_region.shrink(1, 1, 1, 1).intersect(&b_stag_n.valid());
    let core = grid.staggered_core();
    if !region.contains(&core) {
        return Err(Error::MissingGhostLayer(format!(
            "ctm_correct: corrected region {region:?} does not cover {core:?}"
        )));
    }
    let cx = dt / (2.0 * grid.dy);
    let cy = dt / (2.0 * grid.dx);
    let bx = Lattice::from_region(grid, Stagger::Staggered, region, |k, l| {
        b_stag_n.bx[(k, l)] - cx * (omega_half[(k, l + 1)] - omega_half[(k, l - 1)])
    });
    let by = Lattice::from_region(grid, Stagger::Staggered, region, |k, l| {
        b_stag_n.by[(k, l)] + cy * (omega_half[(k + 1, l)] - omega_half[(k - 1, l)])
    });
    let main = MagneticPair {
        bx: average_to_main(&bx),
        by: average_to_main(&by),
    };
    Ok(CtmUpdate {
        staggered: MagneticPair { bx, by },
        main,
    })
}
