//! With a uniform reference state and no gravity the solver must reduce to
//! the plain unstaggered central scheme. The oracle below is a direct
//! periodic implementation on a torus, without ghosts or subtraction.

use wbmhd::bc::{BoundaryConfig, BoundaryKind};
use wbmhd::grid::{Grid, Lattice, Stagger};
use wbmhd::limiter::LimiterConfig;
use wbmhd::physics::{conserved_from_primitive, flux_x, flux_y, Conserved, GasModel, Primitive, NVAR};
use wbmhd::scheme::{jvp, ReferenceState, Scheme};

struct Torus {
    nx: usize,
    ny: usize,
    data: Vec<Conserved>,
}

impl Torus {
    fn at(&self, i: isize, j: isize) -> Conserved {
        let i = i.rem_euclid(self.nx as isize) as usize;
        let j = j.rem_euclid(self.ny as isize) as usize;
        self.data[j * self.nx + i]
    }

    fn build(nx: usize, ny: usize, f: impl Fn(isize, isize) -> Conserved) -> Torus {
        let mut data = Vec::with_capacity(nx * ny);
        for j in 0..ny as isize {
            for i in 0..nx as isize {
                data.push(f(i, j));
            }
        }
        Torus { nx, ny, data }
    }
}

fn mc(l: f64, c: f64, r: f64, theta: f64) -> f64 {
    let (a, b, d) = (theta * (c - l), 0.5 * (r - l), theta * (r - c));
    if a > 0.0 && b > 0.0 && d > 0.0 {
        a.min(b).min(d)
    } else if a < 0.0 && b < 0.0 && d < 0.0 {
        a.max(b).max(d)
    } else {
        0.0
    }
}

fn slopes(u: &Torus, di: isize, dj: isize, theta: f64) -> Torus {
    Torus::build(u.nx, u.ny, |i, j| {
        let (l, c, r) = (u.at(i - di, j - dj), u.at(i, j), u.at(i + di, j + dj));
        let mut s = Conserved::ZERO;
        for k in 0..NVAR {
            s[k] = mc(l[k], c[k], r[k], theta);
        }
        s
    })
}

/// One plain step. Staggered node `(k, l)` sits between cells `k, k+1` and
/// `l, l+1`.
fn plain_step(u: &Torus, gas: &GasModel, dx: f64, dy: f64, dt: f64, theta: f64) -> Torus {
    let (sx, sy) = (slopes(u, 1, 0, theta), slopes(u, 0, 1, theta));
    let stag = Torus::build(u.nx, u.ny, |k, l| {
        let avg = 0.25 * ((u.at(k, l) + u.at(k + 1, l)) + (u.at(k, l + 1) + u.at(k + 1, l + 1)));
        let jx = (sx.at(k + 1, l) - sx.at(k, l)) + (sx.at(k + 1, l + 1) - sx.at(k, l + 1));
        let jy = (sy.at(k, l + 1) - sy.at(k, l)) + (sy.at(k + 1, l + 1) - sy.at(k + 1, l));
        avg - (1.0 / 16.0) * (jx + jy)
    });
    let mid = Torus::build(u.nx, u.ny, |i, j| {
        let c = u.at(i, j);
        let fx = jvp(flux_x, &c, &sx.at(i, j), gas).unwrap();
        let gy = jvp(flux_y, &c, &sy.at(i, j), gas).unwrap();
        c - (0.5 * dt) * ((1.0 / dx) * fx + (1.0 / dy) * gy)
    });
    let f = Torus::build(u.nx, u.ny, |i, j| flux_x(&mid.at(i, j), gas).unwrap());
    let g = Torus::build(u.nx, u.ny, |i, j| flux_y(&mid.at(i, j), gas).unwrap());
    let next_stag = Torus::build(u.nx, u.ny, |k, l| {
        let dfx = (f.at(k + 1, l) - f.at(k, l)) + (f.at(k + 1, l + 1) - f.at(k, l + 1));
        let dgy = (g.at(k, l + 1) - g.at(k, l)) + (g.at(k + 1, l + 1) - g.at(k + 1, l));
        stag.at(k, l) - (dt / (2.0 * dx)) * dfx - (dt / (2.0 * dy)) * dgy
    });
    let (tx, ty) = (slopes(&next_stag, 1, 0, theta), slopes(&next_stag, 0, 1, theta));
    Torus::build(u.nx, u.ny, |i, j| {
        let s = &next_stag;
        let avg = 0.25 * ((s.at(i - 1, j - 1) + s.at(i, j - 1)) + (s.at(i - 1, j) + s.at(i, j)));
        let jx = (tx.at(i, j - 1) - tx.at(i - 1, j - 1)) + (tx.at(i, j) - tx.at(i - 1, j));
        let jy = (ty.at(i - 1, j) - ty.at(i - 1, j - 1)) + (ty.at(i, j) - ty.at(i, j - 1));
        avg - (1.0 / 16.0) * (jx + jy)
    })
}

fn initial(gas: &GasModel, x: f64, y: f64) -> Conserved {
    use std::f64::consts::PI;
    let (sx, sy) = ((PI * x).sin(), (PI * y).cos());
    let rho = 1.0 + 0.3 * sx * sy + if x > 0.2 { 0.4 } else { 0.0 };
    let prim = Primitive::new(
        rho,
        [0.4 * sy, -0.3 * sx, 0.1 * sx * sy],
        1.0 + 0.2 * (2.0 * PI * (x + y)).sin(),
        [0.6 + 0.2 * sy, 0.3 * sx, 0.5],
    );
    conserved_from_primitive(&prim, gas)
}

/// Rounds to a multiple of 2^-20 so that `(u - c) + c == u` exactly for
/// every quantized `c` of modest size.
fn quantize(u: Conserved) -> Conserved {
    u.map(|v| (v * 1048576.0).round() / 1048576.0)
}

/// Runs both paths for `steps` steps and returns the max difference relative
/// to the max magnitude.
fn compare(steps: usize) -> f64 {
    let gas = GasModel::new(5.0 / 3.0, 0.0).unwrap();
    let grid = Grid::new(24, 20, [-1.0, 1.0, -1.0, 1.0]).unwrap();
    let theta = LimiterConfig::default().theta;
    let background =
        quantize(conserved_from_primitive(&Primitive::new(0.8, [0.1, -0.2, 0.0], 0.7, [0.3, -0.4, 0.2]), &gas));
    let u0 = |i: isize, j: isize| quantize(initial(&gas, grid.x(i), grid.y(j)));

    let utilde = Lattice::from_fn(grid, Stagger::Main, |_, _| background);
    let reference = ReferenceState::new(utilde, &gas, &LimiterConfig::default()).unwrap();
    let scheme = Scheme::new(gas, BoundaryConfig::uniform(BoundaryKind::Periodic));
    let mut delta = Lattice::from_region(grid, Stagger::Main, grid.interior(), |i, j| u0(i, j) - background);
    let mut torus = Torus::build(grid.nx, grid.ny, u0);

    let dt = 0.1 * grid.dx;
    for _ in 0..steps {
        let (filled, total) = scheme.fill_ghosts(&delta, &reference, 0.0).unwrap();
        delta = scheme.advance(&filled, &total, &reference, dt).unwrap().delta;
        torus = plain_step(&torus, &gas, grid.dx, grid.dy, dt, theta);
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (i, j) in grid.interior().cells() {
        let theirs = torus.at(i, j);
        worst = worst.max((delta[(i, j)] + background - theirs).max_abs());
        scale = scale.max(theirs.max_abs());
    }
    worst / scale
}

#[test]
fn uniform_reference_matches_plain_scheme_in_one_step() {
    let rel = compare(1);
    assert!(rel <= 1e-14, "relative difference {rel:e}");
}

// Later steps feed slightly different roundings into the finite-difference
// Jacobian products, whose own rounding noise is about 1e-16 / 1e-7.
#[test]
fn uniform_reference_tracks_plain_scheme_over_steps() {
    let rel = compare(5);
    assert!(rel <= 1e-9, "relative difference {rel:e}");
}

#[test]
fn periodic_sums_conserved_over_100_steps() {
    let gas = GasModel::new(5.0 / 3.0, 0.0).unwrap();
    let grid = Grid::new(32, 32, [-1.0, 1.0, -1.0, 1.0]).unwrap();
    let background = initial(&gas, 0.0, 0.0);
    let utilde = Lattice::from_fn(grid, Stagger::Main, |_, _| background);
    let reference = ReferenceState::new(utilde, &gas, &LimiterConfig::default()).unwrap();
    let scheme = Scheme::new(gas, BoundaryConfig::uniform(BoundaryKind::Periodic));
    let total = |d: &wbmhd::grid::Field2D| {
        let mut sum = Conserved::ZERO;
        let mut abs = Conserved::ZERO;
        for c in grid.interior().cells() {
            let u = d[c] + background;
            sum += u;
            abs += u.map(f64::abs);
        }
        (sum, abs)
    };
    let mut delta = Lattice::from_region(grid, Stagger::Main, grid.interior(), |i, j| {
        initial(&gas, grid.x(i), grid.y(j)) - background
    });
    let (s0, a0) = total(&delta);
    let mut t = 0.0;
    for _ in 0..100 {
        let out = scheme.step(&delta, &reference, t, f64::INFINITY).unwrap();
        t += out.dt;
        delta = out.delta;
    }
    let (s1, _) = total(&delta);
    for k in 0..NVAR {
        assert!((s1[k] - s0[k]).abs() < 1e-11 * a0[k], "component {k}: {} -> {}", s0[k], s1[k]);
    }
}
