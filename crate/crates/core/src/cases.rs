//! Scenario library: initial data, reference states and diagnostics.

use std::fmt;
use std::str::FromStr;

use crate::bc::{BoundaryConfig, BoundaryKind};
use crate::ctm::{divergence_main, CtmMode, MagneticPair};
use crate::error::{Error, Result};
use crate::grid::{Field2D, Grid, Lattice, Stagger};
use crate::limiter::LimiterConfig;
use crate::physics::{conserved_from_primitive, dot, primitive_from_conserved, GasModel, Primitive};
use crate::scheme::{ReferenceState, Scheme};
use crate::wavespeed::{DEFAULT_CFL, MAX_CFL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseName {
    BrioWu,
    FourState,
    Vortex,
    HydroAtmosphere,
    MhdAtmosphere,
}

impl CaseName {
    pub const ALL: [CaseName; 5] = [
        CaseName::BrioWu,
        CaseName::FourState,
        CaseName::Vortex,
        CaseName::HydroAtmosphere,
        CaseName::MhdAtmosphere,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseName::BrioWu => "brio-wu",
            CaseName::FourState => "four-state",
            CaseName::Vortex => "vortex",
            CaseName::HydroAtmosphere => "hydro-atmosphere",
            CaseName::MhdAtmosphere => "mhd-atmosphere",
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseName::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = CaseName::ALL.iter().map(|c| c.as_str()).collect();
            Error::Usage(format!("unknown case '{s}'; valid cases: {}", names.join(", ")))
        })
    }
}

/// Physical parameters shared by the scenarios. Each case reads the ones it
/// needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseParams {
    /// Vertical field strength of the magnetic atmosphere.
    pub mu: f64,
    /// Piston amplitude.
    pub c: f64,
    pub m_p: f64,
    pub kappa_p: f64,
    /// Background velocity of the vortex.
    pub u0: f64,
    pub v0: f64,
    pub p0: f64,
    pub scale_height: f64,
    /// Sign in front of `B2` of the vortex; `-1` reproduces the printed,
    /// non-solenoidal variant.
    pub vortex_b2_sign: f64,
}

impl Default for CaseParams {
    fn default() -> Self {
        CaseParams {
            mu: 1.0,
            c: 0.3,
            m_p: 1.0,
            kappa_p: 1.0,
            u0: 0.0,
            v0: 0.0,
            p0: 1.13,
            scale_height: 0.158,
            vortex_b2_sign: 1.0,
        }
    }
}

/// Field strength substituted for `mu = 0` so the piston direction exists.
pub const MU_FLOOR: f64 = 1e-8;

/// Long vortex run time, `100 * 2 pi / (sqrt(e) kappa)`.
pub fn vortex_period_time(kappa_p: f64) -> f64 {
    100.0 * 2.0 * std::f64::consts::PI / (std::f64::consts::E.sqrt() * kappa_p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseConfig {
    pub name: CaseName,
    pub domain: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    pub t_final: f64,
    pub gamma: f64,
    pub g: f64,
    pub cfl: f64,
    pub theta: f64,
    pub ctm: CtmMode,
    pub bc: BoundaryConfig,
    pub params: CaseParams,
}

impl CaseConfig {
    /// Defaults of the named scenario.
    pub fn new(name: CaseName) -> Self {
        let params = CaseParams::default();
        let zg = BoundaryConfig::uniform(BoundaryKind::ZeroGradient);
        let base = CaseConfig {
            name,
            domain: [-1.0, 1.0, -1.0, 1.0],
            nx: 200,
            ny: 200,
            t_final: 0.25,
            gamma: 5.0 / 3.0,
            g: 0.0,
            cfl: DEFAULT_CFL,
            theta: LimiterConfig::default().theta,
            ctm: CtmMode::Off,
            bc: zg,
            params,
        };
        match name {
            CaseName::BrioWu => CaseConfig { gamma: 2.0, ..base },
            CaseName::FourState => CaseConfig { nx: 400, ny: 400, t_final: 0.8, ctm: CtmMode::On, ..base },
            CaseName::Vortex => CaseConfig {
                domain: [-5.0, 5.0, -5.0, 5.0],
                nx: 64,
                ny: 64,
                t_final: 314.0,
                bc: BoundaryConfig::uniform(BoundaryKind::SteadyState),
                ..base
            },
            CaseName::HydroAtmosphere => CaseConfig {
                domain: [0.0, 4.0, 0.0, 1.0],
                nx: 800,
                ny: 200,
                t_final: 1.8,
                g: 2.74,
                bc: BoundaryConfig::atmosphere(BoundaryKind::PistonHydro, params.c, params.scale_height),
                ..base
            },
            CaseName::MhdAtmosphere => CaseConfig {
                domain: [0.0, 2.0, 0.0, 1.0],
                nx: 400,
                ny: 200,
                t_final: 0.54,
                g: 2.74,
                ctm: CtmMode::On,
                bc: BoundaryConfig::atmosphere(BoundaryKind::PistonMhd, params.c, params.scale_height),
                ..base
            },
        }
    }

    /// Keeps the boundary description in step with `params` after overrides.
    pub fn sync_boundaries(&mut self) {
        if matches!(self.name, CaseName::HydroAtmosphere | CaseName::MhdAtmosphere) {
            self.bc.amplitude = self.params.c;
            self.bc.scale_height = self.params.scale_height;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [x0, x1, y0, y1] = self.domain;
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::Config(format!("degenerate domain {:?}", self.domain)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final must be positive, got {}", self.t_final)));
        }
        if !(self.cfl > 0.0 && self.cfl <= MAX_CFL) {
            return Err(Error::Config(format!("cfl must lie in (0, {MAX_CFL}], got {}", self.cfl)));
        }
        if self.params.mu < 0.0 {
            return Err(Error::Config(format!("mu must be nonnegative, got {}", self.params.mu)));
        }
        LimiterConfig::new(self.theta)?;
        GasModel::new(self.gamma, self.g)?;
        self.bc.validate()
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.nx, self.ny, self.domain)
    }

    pub fn gas(&self) -> Result<GasModel> {
        GasModel::new(self.gamma, self.g)
    }

    pub fn scheme(&self) -> Result<Scheme> {
        self.validate()?;
        Ok(Scheme {
            gas: self.gas()?,
            limiter: LimiterConfig::new(self.theta)?,
            cfl: self.cfl,
            ctm: self.ctm,
            bc: self.bc,
        })
    }

    /// Atmosphere base density `p0 / (g H)`.
    pub fn rho0(&self) -> f64 {
        self.params.p0 / (self.g * self.params.scale_height)
    }
}

/// Initial data and reference state of a configured case.
#[derive(Debug, Clone)]
pub struct CaseSetup {
    pub config: CaseConfig,
    /// Initial total state, valid on every storage cell.
    pub initial: Field2D,
    pub reference: ReferenceState,
}

impl CaseSetup {
    /// `U - Utilde` at `t = 0` on the interior.
    pub fn initial_delta(&self) -> Field2D {
        let ut = &self.reference.utilde;
        let g = self.initial.grid;
        Lattice::from_region(g, Stagger::Main, g.interior(), |i, j| self.initial[(i, j)] - ut[(i, j)])
    }
}

fn sampled(grid: Grid, gas: &GasModel, f: impl Fn(f64, f64) -> Primitive) -> Result<Field2D> {
    Lattice::try_from_region(grid, Stagger::Main, grid.full(), |i, j| {
        let prim = f(grid.x(i), grid.y(j));
        let u = conserved_from_primitive(&prim, gas);
        primitive_from_conserved(&u, gas).map_err(|e| e.at_cell(i, j))?;
        Ok(u)
    })
}

fn finish(config: &CaseConfig, initial: Field2D, mut utilde: Field2D, analytic_ghosts: bool) -> Result<CaseSetup> {
    let gas = config.gas()?;
    if !analytic_ghosts {
        utilde.valid = utilde.grid.interior();
        config.bc.fill_reference(&mut utilde, &gas)?;
    }
    let reference = ReferenceState::new(utilde, &gas, &LimiterConfig::new(config.theta)?)?;
    Ok(CaseSetup { config: *config, initial, reference })
}

pub fn brio_wu_state(x: f64) -> Primitive {
    if x < 0.0 {
        Primitive::new(1.0, [0.0; 3], 1.0, [0.75, 1.0, 0.0])
    } else {
        Primitive::new(0.125, [0.0; 3], 0.1, [0.75, -1.0, 0.0])
    }
}

/// Shock tube along x. The reference is the uniform left state.
pub fn init_brio_wu(config: &CaseConfig) -> Result<CaseSetup> {
    config.validate()?;
    let (grid, gas) = (config.grid()?, config.gas()?);
    let initial = sampled(grid, &gas, |x, _| brio_wu_state(x))?;
    let utilde = sampled(grid, &gas, |_, _| brio_wu_state(-1.0))?;
    finish(config, initial, utilde, false)
}

pub fn four_state(x: f64, y: f64) -> Primitive {
    let (rho, u1, u2) = match (x > 0.0, y > 0.0) {
        (true, true) => (1.0, 0.75, 0.5),
        (false, true) => (2.0, 0.75, 0.5),
        (false, false) => (1.0, -0.75, 0.5),
        (true, false) => (3.0, -0.75, -0.5),
    };
    Primitive::new(rho, [u1, u2, 0.0], 1.0, [2.0, 0.0, 1.0])
}

/// Four-quadrant Riemann problem. The reference is the uniform first-quadrant state.
pub fn init_four_state(config: &CaseConfig) -> Result<CaseSetup> {
    config.validate()?;
    let (grid, gas) = (config.grid()?, config.gas()?);
    let initial = sampled(grid, &gas, four_state)?;
    let utilde = sampled(grid, &gas, |_, _| four_state(1.0, 1.0))?;
    finish(config, initial, utilde, false)
}

/// Magnetized vortex centered at `(xc, yc)` on a background flow.
pub fn vortex_state(params: &CaseParams, x: f64, y: f64, xc: f64, yc: f64) -> Primitive {
    let (dx, dy) = (x - xc, y - yc);
    let r2 = dx * dx + dy * dy;
    let e = (0.5 * (1.0 - r2)).exp();
    let (m, k) = (params.m_p, params.kappa_p);
    Primitive::new(
        1.0,
        [params.u0 - k * e * dy, params.v0 + k * e * dx, 0.0],
        1.0 + (0.5 * m * m * (1.0 - r2) - 0.5 * k * k) * e * e,
        [-m * e * dy, params.vortex_b2_sign * m * e * dx, 0.0],
    )
}

/// Vortex at the origin. Without background flow the reference is the vortex
/// itself; otherwise it is the uniform background state.
pub fn init_vortex(config: &CaseConfig) -> Result<CaseSetup> {
    config.validate()?;
    let (grid, gas) = (config.grid()?, config.gas()?);
    let p = config.params;
    let initial = sampled(grid, &gas, |x, y| vortex_state(&p, x, y, 0.0, 0.0))?;
    let utilde = if p.u0 == 0.0 && p.v0 == 0.0 {
        initial.clone()
    } else {
        sampled(grid, &gas, |_, _| Primitive::new(1.0, [p.u0, p.v0, 0.0], 1.0, [0.0; 3]))?
    };
    finish(config, initial, utilde, true)
}

fn atmosphere(config: &CaseConfig, b: [f64; 3]) -> Result<Field2D> {
    let (grid, gas) = (config.grid()?, config.gas()?);
    let (rho0, p0, h) = (config.rho0(), config.params.p0, config.params.scale_height);
    let mut f = sampled(grid, &gas, |_, y| {
        let e = (-y / h).exp();
        Primitive::new(rho0 * e, [0.0; 3], p0 * e, b)
    })?;
    // Ghosts follow the discrete boundary extrapolation rather than the formula.
    f.valid = grid.interior();
    config.bc.fill_reference(&mut f, &gas)?;
    Ok(f)
}

/// Isothermal atmosphere at rest, perturbed by the bottom piston.
pub fn init_hydro_atmosphere(config: &CaseConfig) -> Result<CaseSetup> {
    config.validate()?;
    let f = atmosphere(config, [0.0; 3])?;
    finish(config, f.clone(), f, true)
}

/// Effective vertical field: `mu`, or [`MU_FLOOR`] when `mu = 0`.
pub fn effective_mu(mu: f64) -> f64 {
    if mu == 0.0 {
        MU_FLOOR
    } else {
        mu
    }
}

/// Atmosphere threaded by the vertical field `(0, mu, 0)`.
pub fn init_mhd_atmosphere(config: &CaseConfig) -> Result<CaseSetup> {
    config.validate()?;
    let f = atmosphere(config, [0.0, effective_mu(config.params.mu), 0.0])?;
    finish(config, f.clone(), f, true)
}

pub fn init_case(config: &CaseConfig) -> Result<CaseSetup> {
    match config.name {
        CaseName::BrioWu => init_brio_wu(config),
        CaseName::FourState => init_four_state(config),
        CaseName::Vortex => init_vortex(config),
        CaseName::HydroAtmosphere => init_hydro_atmosphere(config),
        CaseName::MhdAtmosphere => init_mhd_atmosphere(config),
    }
}

/// Derived output quantities on the interior cells. Cells with `B = 0` hold
/// NaN in the field-relative quantities.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub u_b: Lattice<f64>,
    pub u_perp_b: Lattice<f64>,
    pub beta: Lattice<f64>,
    pub div_b: Lattice<f64>,
}

pub fn field_diagnostics(prim: &Primitive) -> (f64, f64, f64) {
    let b2 = prim.b_squared();
    if !(b2 > 0.0) {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let bmag = b2.sqrt();
    let u_b = dot(prim.u, prim.b) / bmag;
    let u_perp = (-prim.u[0] * prim.b[1] + prim.u[1] * prim.b[0]) / bmag;
    (u_b, u_perp, 2.0 * prim.p / b2)
}

/// Requires `total` to carry one valid ghost layer for the divergence.
pub fn diagnostics(total: &Field2D, gas: &GasModel) -> Result<Diagnostics> {
    let g = total.grid;
    let interior = g.interior();
    let div = divergence_main(&MagneticPair::from_field(total))?;
    div.require(&interior, "diagnostics")?;
    let prims = Lattice::try_from_region(g, Stagger::Main, interior, |i, j| {
        primitive_from_conserved(&total[(i, j)], gas).map_err(|e| e.at_cell(i, j))
    })?;
    let pick = |k: usize| {
        Lattice::from_region(g, Stagger::Main, interior, |i, j| {
            let d = field_diagnostics(&prims[(i, j)]);
            [d.0, d.1, d.2][k]
        })
    };
    Ok(Diagnostics {
        u_b: pick(0),
        u_perp_b: pick(1),
        beta: pick(2),
        div_b: Lattice::from_region(g, Stagger::Main, interior, |i, j| div[(i, j)]),
    })
}
