//! Cartesian lattices with ghost layers.
//!
//! A main-grid lattice stores cell centers `(x_i, y_j)` for
//! `i in -ng..nx+ng`, `j in -ng..ny+ng`. A staggered lattice has the same
//! storage shape; its index `k` denotes the dual node at `k + 1/2`, so the
//! nodes lying on the physical boundary are `k = -1` and `k = nx - 1`.
//!
//! Every lattice tracks the rectangle of indices that currently hold valid
//! data. Stencil operations shrink that rectangle, which is how missing
//! ghost layers are detected.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::physics::Conserved;

/// Number of ghost layers on every side of the main grid.
pub const GHOSTS: usize = 3;

/// Inclusive index rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub i0: isize,
    pub i1: isize,
    pub j0: isize,
    pub j1: isize,
}

impl Region {
    pub fn new(i0: isize, i1: isize, j0: isize, j1: isize) -> Self {
        Region { i0, i1, j0, j1 }
    }

    pub fn is_empty(&self) -> bool {
        self.i0 > self.i1 || self.j0 > self.j1
    }

    /// Shrinks the rectangle by `lo` on the low side and `hi` on the high side
    /// in x, and likewise `ylo`/`yhi` in y.
    pub fn shrink(&self, lo: isize, hi: isize, ylo: isize, yhi: isize) -> Self {
        Region::new(self.i0 + lo, self.i1 - hi, self.j0 + ylo, self.j1 - yhi)
    }

    pub fn intersect(&self, o: &Region) -> Self {
        Region::new(
            self.i0.max(o.i0),
            self.i1.min(o.i1),
            self.j0.max(o.j0),
            self.j1.min(o.j1),
        )
    }

    pub fn contains(&self, o: &Region) -> bool {
        o.is_empty() || (self.i0 <= o.i0 && self.i1 >= o.i1 && self.j0 <= o.j0 && self.j1 >= o.j1)
    }

    pub fn contains_cell(&self, i: isize, j: isize) -> bool {
        i >= self.i0 && i <= self.i1 && j >= self.j0 && j <= self.j1
    }

    /// Iterates `(i, j)` row by row.
    pub fn cells(&self) -> impl Iterator<Item = (isize, isize)> {
        let r = *self;
        (r.j0..=r.j1).flat_map(move |j| (r.i0..=r.i1).map(move |i| (i, j)))
    }
}

/// Uniform Cartesian mesh geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub ng: usize,
    pub dx: f64,
    pub dy: f64,
    /// Center of the first interior cell.
    pub x0: f64,
    pub y0: f64,
}

impl Grid {
    /// Mesh of `nx * ny` cells covering `[x_min, x_max] x [y_min, y_max]`.
    pub fn new(nx: usize, ny: usize, domain: [f64; 4]) -> Result<Self> {
        let [x_min, x_max, y_min, y_max] = domain;
        if nx == 0 || ny == 0 {
            return Err(Error::Config(format!("grid must be nonempty, got {nx}x{ny}")));
        }
        if !(x_max > x_min && y_max > y_min) {
            return Err(Error::Config(format!("degenerate domain {domain:?}")));
        }
        let dx = (x_max - x_min) / nx as f64;
        let dy = (y_max - y_min) / ny as f64;
        Ok(Grid {
            nx,
            ny,
            ng: GHOSTS,
            dx,
            dy,
            x0: x_min + 0.5 * dx,
            y0: y_min + 0.5 * dy,
        })
    }

    pub fn domain(&self) -> [f64; 4] {
        [
            self.x0 - 0.5 * self.dx,
            self.x0 + (self.nx as f64 - 0.5) * self.dx,
            self.y0 - 0.5 * self.dy,
            self.y0 + (self.ny as f64 - 0.5) * self.dy,
        ]
    }

    pub fn x(&self, i: isize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn y(&self, j: isize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    pub fn interior(&self) -> Region {
        Region::new(0, self.nx as isize - 1, 0, self.ny as isize - 1)
    }

    /// Entire storage rectangle including ghosts.
    pub fn full(&self) -> Region {
        let g = self.ng as isize;
        Region::new(-g, self.nx as isize - 1 + g, -g, self.ny as isize - 1 + g)
    }

    /// Staggered nodes that lie inside or on the boundary of the domain.
    pub fn staggered_core(&self) -> Region {
        Region::new(-1, self.nx as isize - 1, -1, self.ny as isize - 1)
    }

    pub fn min_spacing(&self) -> f64 {
        self.dx.min(self.dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stagger {
    Main,
    Staggered,
}

/// A lattice of values on a main or staggered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<T> {
    pub grid: Grid,
    pub stagger: Stagger,
    pub valid: Region,
    data: Vec<T>,
}

/// Conserved-variable lattice on the main grid.
pub type Field2D = Lattice<Conserved>;

impl<T: Copy + Default> Lattice<T> {
    /// Main-grid lattice filled with `T::default()`; nothing is marked valid.
    pub fn new(grid: Grid, stagger: Stagger) -> Self {
        let n = (grid.nx + 2 * grid.ng) * (grid.ny + 2 * grid.ng);
        Lattice {
            grid,
            stagger,
            valid: Region::new(0, -1, 0, -1),
            data: vec![T::default(); n],
        }
    }

    /// Lattice whose every storage cell holds `f(i, j)`.
    pub fn from_fn(grid: Grid, stagger: Stagger, mut f: impl FnMut(isize, isize) -> T) -> Self {
        let mut out = Self::new(grid, stagger);
        let full = grid.full();
        for (i, j) in full.cells() {
            out[(i, j)] = f(i, j);
        }
        out.valid = full;
        out
    }

    /// Lattice computed by `f` over `region`; fails on the first error.
    pub fn try_from_region<E>(
        grid: Grid,
        stagger: Stagger,
        region: Region,
        mut f: impl FnMut(isize, isize) -> Result<T, E>,
    ) -> Result<Self, E> {
        let mut out = Self::new(grid, stagger);
        for (i, j) in region.cells() {
            out[(i, j)] = f(i, j)?;
        }
        out.valid = region;
        Ok(out)
    }

    pub fn from_region(
        grid: Grid,
        stagger: Stagger,
        region: Region,
        mut f: impl FnMut(isize, isize) -> T,
    ) -> Self {
        Self::try_from_region::<std::convert::Infallible>(grid, stagger, region, |i, j| Ok(f(i, j)))
            .unwrap_or_else(|e| match e {})
    }

    /// Pointwise map over the valid region.
    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U) -> Lattice<U> {
        Lattice::from_region(self.grid, self.stagger, self.valid, |i, j| f(self[(i, j)]))
    }

    /// Errors unless `needed` is covered by valid data.
    pub fn require(&self, needed: &Region, what: &str) -> Result<()> {
        if self.valid.contains(needed) {
            Ok(())
        } else {
            Err(Error::MissingGhostLayer(format!(
                "{what}: valid region {:?} does not cover {:?}",
                self.valid, needed
            )))
        }
    }

    #[inline]
    fn offset(&self, i: isize, j: isize) -> usize {
        let g = self.grid.ng as isize;
        let w = self.grid.nx as isize + 2 * g;
        debug_assert!(self.grid.full().contains_cell(i, j), "index ({i}, {j}) out of storage");
        ((j + g) * w + (i + g)) as usize
    }

    /// Physical coordinates of lattice point `(i, j)`.
    pub fn position(&self, i: isize, j: isize) -> (f64, f64) {
        let shift = match self.stagger {
            Stagger::Main => 0.0,
            Stagger::Staggered => 0.5,
        };
        (
            self.grid.x0 + (i as f64 + shift) * self.grid.dx,
            self.grid.y0 + (j as f64 + shift) * self.grid.dy,
        )
    }
}

impl<T: Copy + Default> Index<(isize, isize)> for Lattice<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (isize, isize)) -> &T {
        &self.data[self.offset(i, j)]
    }
}

impl<T: Copy + Default> IndexMut<(isize, isize)> for Lattice<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (isize, isize)) -> &mut T {
        let o = self.offset(i, j);
        &mut self.data[o]
    }
}

impl Lattice<Conserved> {
    /// Componentwise sum over the interior cells.
    pub fn interior_sum(&self) -> Conserved {
        self.grid
            .interior()
            .cells()
            .fold(Conserved::ZERO, |acc, c| acc + self[c])
    }

    /// Largest absolute component over the interior.
    pub fn interior_max_abs(&self) -> f64 {
        self.grid
            .interior()
            .cells()
            .fold(0.0, |m, c| f64::max(m, self[c].max_abs()))
    }
}
