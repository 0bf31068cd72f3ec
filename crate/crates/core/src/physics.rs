//! State algebra for ideal MHD with a constant vertical gravitational field.
//!
//! Conserved variables are stored as `(rho, rho u1, rho u2, rho u3, E, B1, B2, B3)`
//! in code units where the magnetic pressure is `|B|^2 / 2`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

pub const NVAR: usize = 8;

pub const RHO: usize = 0;
pub const MOM1: usize = 1;
pub const MOM2: usize = 2;
pub const MOM3: usize = 3;
pub const ENERGY: usize = 4;
pub const B1: usize = 5;
pub const B2: usize = 6;
pub const B3: usize = 7;

/// One cell's vector of conserved variables.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved(pub [f64; NVAR]);

impl Conserved {
    pub const ZERO: Conserved = Conserved([0.0; NVAR]);

    pub fn rho(&self) -> f64 {
        self.0[RHO]
    }

    pub fn momentum(&self) -> [f64; 3] {
        [self.0[MOM1], self.0[MOM2], self.0[MOM3]]
    }

    pub fn energy(&self) -> f64 {
        self.0[ENERGY]
    }

    pub fn magnetic(&self) -> [f64; 3] {
        [self.0[B1], self.0[B2], self.0[B3]]
    }

    /// Euclidean norm over all eight components.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Conserved(self.0.map(f))
    }

    /// Componentwise combination of two states.
    pub fn zip(self, other: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = [0.0; NVAR];
        for (k, o) in out.iter_mut().enumerate() {
            *o = f(self.0[k], other.0[k]);
        }
        Conserved(out)
    }
}

impl Index<usize> for Conserved {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl IndexMut<usize> for Conserved {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.0[k]
    }
}

impl Add for Conserved {
    type Output = Conserved;
    fn add(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for Conserved {
    type Output = Conserved;
    fn sub(self, rhs: Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for Conserved {
    type Output = Conserved;
    fn neg(self) -> Self {
        self.map(|a| -a)
    }
}

impl Mul<Conserved> for f64 {
    type Output = Conserved;
    fn mul(self, rhs: Conserved) -> Conserved {
        rhs.map(|a| self * a)
    }
}

impl AddAssign for Conserved {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Conserved {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Primitive {
    pub rho: f64,
    pub u: [f64; 3],
    pub p: f64,
    pub b: [f64; 3],
}

impl Primitive {
    pub fn new(rho: f64, u: [f64; 3], p: f64, b: [f64; 3]) -> Self {
        Primitive { rho, u, p, b }
    }

    pub fn b_squared(&self) -> f64 {
        dot(self.b, self.b)
    }
}

/// Ratio of specific heats and the gravitational acceleration along -y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    pub gamma: f64,
    pub g: f64,
}

impl GasModel {
    pub fn new(gamma: f64, g: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::Config(format!("gamma must exceed 1, got {gamma}")));
        }
        if !(g >= 0.0) {
            return Err(Error::Config(format!("gravity must be nonnegative, got {g}")));
        }
        Ok(GasModel { gamma, g })
    }
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn total_energy(prim: &Primitive, gas: &GasModel) -> f64 {
    prim.p / (gas.gamma - 1.0) + 0.5 * prim.rho * dot(prim.u, prim.u) + 0.5 * prim.b_squared()
}

pub fn conserved_from_primitive(prim: &Primitive, gas: &GasModel) -> Conserved {
    let r = prim.rho;
    Conserved([
        r,
        r * prim.u[0],
        r * prim.u[1],
        r * prim.u[2],
        total_energy(prim, gas),
        prim.b[0],
        prim.b[1],
        prim.b[2],
    ])
}

/// Pressure implied by a conserved state, without a positivity check.
pub(crate) fn raw_pressure(u: &Conserved, gas: &GasModel) -> f64 {
    let m = u.momentum();
    let b = u.magnetic();
    (gas.gamma - 1.0) * (u.energy() - 0.5 * dot(m, m) / u.rho() - 0.5 * dot(b, b))
}

pub fn primitive_from_conserved(u: &Conserved, gas: &GasModel) -> Result<Primitive> {
    let rho = u.rho();
    if !(rho > 0.0) {
        return Err(Error::NonpositiveDensity { rho, cell: None });
    }
    let p = raw_pressure(u, gas);
    if !(p > 0.0) {
        return Err(Error::NonpositivePressure { p, cell: None });
    }
    let m = u.momentum();
    Ok(Primitive {
        rho,
        u: [m[0] / rho, m[1] / rho, m[2] / rho],
        p,
        b: u.magnetic(),
    })
}

/// Primitive variables requiring only positive density. The pressure may
/// have any sign; used where only velocity and field are needed.
pub(crate) fn primitive_unchecked(u: &Conserved, gas: &GasModel) -> Result<Primitive> {
    let rho = u.rho();
    if !(rho > 0.0) {
        return Err(Error::NonpositiveDensity { rho, cell: None });
    }
    let m = u.momentum();
    Ok(Primitive {
        rho,
        u: [m[0] / rho, m[1] / rho, m[2] / rho],
        p: raw_pressure(u, gas),
        b: u.magnetic(),
    })
}

/// Total pressure tensor: isotropic thermal plus magnetic pressure minus the
/// magnetic tension `B_i B_j`.
pub fn pressure_tensor(prim: &Primitive) -> [[f64; 3]; 3] {
    let b = prim.b;
    let pt = prim.p + 0.5 * prim.b_squared();
    let mut pi = [[0.0; 3]; 3];
    for (i, row) in pi.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = -b[i] * b[j];
        }
        row[i] += pt;
    }
    pi
}

/// Velocity, total pressure and field of a state, skipping the pressure sign check.
/// Flux evaluation must tolerate the small perturbations used for directional
/// derivatives, so only the density is required to be positive.
fn flux_parts(u: &Conserved, gas: &GasModel) -> Result<([f64; 3], f64, [f64; 3])> {
    let rho = u.rho();
    if !(rho > 0.0) {
        return Err(Error::NonpositiveDensity { rho, cell: None });
    }
    let m = u.momentum();
    let vel = [m[0] / rho, m[1] / rho, m[2] / rho];
    let b = u.magnetic();
    let p = raw_pressure(u, gas);
    Ok((vel, p, b))
}

fn flux_along(u: &Conserved, gas: &GasModel, n: usize) -> Result<Conserved> {
    let (vel, p, b) = flux_parts(u, gas)?;
    let pt = p + 0.5 * dot(b, b);
    let un = vel[n];
    let bn = b[n];
    let mut f = [0.0; NVAR];
    f[RHO] = u.rho() * un;
    for k in 0..3 {
        let delta = if k == n { pt } else { 0.0 };
        f[MOM1 + k] = u.0[MOM1 + k] * un + delta - bn * b[k];
    }
    f[ENERGY] = (u.energy() + pt) * un - bn * dot(vel, b);
    for k in 0..3 {
        f[B1 + k] = un * b[k] - vel[k] * bn;
    }
    Ok(Conserved(f))
}

/// Flux in the x direction.
pub fn flux_x(u: &Conserved, gas: &GasModel) -> Result<Conserved> {
    flux_along(u, gas, 0)
}

/// Flux in the y direction.
pub fn flux_y(u: &Conserved, gas: &GasModel) -> Result<Conserved> {
    flux_along(u, gas, 1)
}

/// Gravitational source with potential gradient `(0, g)`. Linear in `u`.
pub fn source(u: &Conserved, gas: &GasModel) -> Conserved {
    let mut s = Conserved::ZERO;
    s[MOM2] = -u.rho() * gas.g;
    s[ENERGY] = -u[MOM2] * gas.g;
    s
}

/// Out-of-plane electric field `(-u x B)_z`.
pub fn electric_omega(prim: &Primitive) -> f64 {
    -prim.u[0] * prim.b[1] + prim.u[1] * prim.b[0]
}
