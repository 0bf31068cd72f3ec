//! MC-theta slope limiting.

use crate::error::{Error, Result};
use crate::grid::Lattice;
use crate::physics::{Conserved, NVAR};

/// Default limiter parameter.
pub const DEFAULT_THETA: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    pub theta: f64,
}

impl LimiterConfig {
    pub fn new(theta: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&theta) {
            return Err(Error::Config(format!("theta must lie in [1, 2], got {theta}")));
        }
        Ok(LimiterConfig { theta })
    }
}

impl Default for LimiterConfig {
    fn default() -> Self {
        LimiterConfig { theta: DEFAULT_THETA }
    }
}

pub fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Undivided limited difference at `center`.
#[inline]
pub fn limited_slope(left: f64, center: f64, right: f64, cfg: &LimiterConfig) -> f64 {
    minmod3(
        cfg.theta * (center - left),
        0.5 * (right - left),
        cfg.theta * (right - center),
    )
}

#[inline]
fn limited_vec(l: &Conserved, c: &Conserved, r: &Conserved, cfg: &LimiterConfig) -> Conserved {
    let mut out = [0.0; NVAR];
    for (k, o) in out.iter_mut().enumerate() {
        *o = limited_slope(l[k], c[k], r[k], cfg);
    }
    Conserved(out)
}

/// Limited undivided x-differences, valid one layer inside `field.valid`.
pub fn slopes_x(field: &Lattice<Conserved>, cfg: &LimiterConfig) -> Result<Lattice<Conserved>> {
    slopes_along(field, cfg, (1, 0))
}

/// Limited undivided y-differences, valid one layer inside `field.valid`.
pub fn slopes_y(field: &Lattice<Conserved>, cfg: &LimiterConfig) -> Result<Lattice<Conserved>> {
    slopes_along(field, cfg, (0, 1))
}

fn slopes_along(
    field: &Lattice<Conserved>,
    cfg: &LimiterConfig,
    (di, dj): (isize, isize),
) -> Result<Lattice<Conserved>> {
    let region = field.valid.shrink(di, di, dj, dj);
    if region.is_empty() {
        return Err(Error::MissingGhostLayer(format!(
            "slopes need a neighbour on each side; valid region {:?}",
            field.valid
        )));
    }
    Ok(Lattice::from_region(field.grid, field.stagger, region, |i, j| {
        limited_vec(
            &field[(i - di, j - dj)],
            &field[(i, j)],
            &field[(i + di, j + dj)],
            cfg,
        )
    }))
}
