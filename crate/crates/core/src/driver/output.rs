//! Field snapshots, cross sections and the run report on disk.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::cases::Diagnostics;
use crate::error::{Error, Result};
use crate::grid::Field2D;
use crate::physics::{primitive_from_conserved, Conserved, GasModel, Primitive};

use super::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Vtk,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Vtk => "vtk",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "vtk" => Ok(Format::Vtk),
            other => Err(Error::Usage(format!("output format must be csv or vtk, got '{other}'"))),
        }
    }
}

/// Column names of a field snapshot, in file order.
pub fn field_columns(with_diagnostics: bool) -> Vec<&'static str> {
    let mut cols = vec!["x", "y", "rho", "u1", "u2", "u3", "p", "E", "B1", "B2", "B3", "divB"];
    if with_diagnostics {
        cols.extend(["uB", "uperpB", "beta"]);
    }
    cols
}

fn cell_values(u: &Conserved, prim: &Primitive) -> [f64; 9] {
    [prim.rho, prim.u[0], prim.u[1], prim.u[2], prim.p, u.energy(), prim.b[0], prim.b[1], prim.b[2]]
}

/// Writes the interior of `total` row by row (`x` fastest).
///
/// `diagnostics` always supplies the divergence column; the field-relative
/// quantities are written when `with_diagnostics` is set.
pub fn write_field(
    total: &Field2D,
    gas: &GasModel,
    diagnostics: &Diagnostics,
    with_diagnostics: bool,
    format: Format,
    path: &Path,
    title: &str,
) -> Result<()> {
    let g = total.grid;
    let cols = field_columns(with_diagnostics);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(g.nx * g.ny);
    for (i, j) in g.interior().cells() {
        let u = total[(i, j)];
        let prim = primitive_from_conserved(&u, gas).map_err(|e| e.at_cell(i, j))?;
        let mut row = vec![g.x(i), g.y(j)];
        row.extend(cell_values(&u, &prim));
        row.push(diagnostics.div_b[(i, j)]);
        if with_diagnostics {
            row.extend([diagnostics.u_b[(i, j)], diagnostics.u_perp_b[(i, j)], diagnostics.beta[(i, j)]]);
        }
        rows.push(row);
    }
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&cols.join(","));
            out.push('\n');
            for row in &rows {
                let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
        Format::Vtk => {
            let n = g.nx * g.ny;
            let _ = writeln!(out, "# vtk DataFile Version 3.0");
            let _ = writeln!(out, "{}", title.replace('\n', " "));
            let _ = writeln!(out, "ASCII");
            let _ = writeln!(out, "DATASET STRUCTURED_POINTS");
            let _ = writeln!(out, "DIMENSIONS {} {} 1", g.nx, g.ny);
            let _ = writeln!(out, "ORIGIN {:.16e} {:.16e} 0", g.x0, g.y0);
            let _ = writeln!(out, "SPACING {:.16e} {:.16e} 1", g.dx, g.dy);
            let _ = writeln!(out, "POINT_DATA {n}");
            for (c, name) in cols.iter().enumerate().skip(2) {
                let _ = writeln!(out, "SCALARS {name} double 1");
                let _ = writeln!(out, "LOOKUP_TABLE default");
                for row in &rows {
                    let _ = writeln!(out, "{:.16e}", row[c]);
                }
            }
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A line of cells through the domain: along `x` at fixed `y`, or along `y`
/// at fixed `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionRequest {
    pub axis: Axis,
    pub coord: f64,
    pub variables: Vec<String>,
}

impl FromStr for SectionRequest {
    type Err = Error;
    /// `x@0.0:rho,B2` is the section along x at `y = 0`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("section must look like 'x@0.0:rho,B2', got '{s}'"));
        let (head, vars) = s.split_once(':').ok_or_else(bad)?;
        let (axis, coord) = head.split_once('@').ok_or_else(bad)?;
        let axis = match axis {
            "x" => Axis::X,
            "y" => Axis::Y,
            _ => return Err(bad()),
        };
        let coord = coord.parse().map_err(|_| bad())?;
        let variables: Vec<String> = vars.split(',').map(|v| v.trim().to_string()).collect();
        for v in &variables {
            section_value(&Conserved::ZERO, &Primitive::default(), v)?;
        }
        Ok(SectionRequest { axis, coord, variables })
    }
}

fn section_value(u: &Conserved, prim: &Primitive, name: &str) -> Result<f64> {
    let names = ["rho", "u1", "u2", "u3", "p", "E", "B1", "B2", "B3"];
    match names.iter().position(|n| *n == name) {
        Some(k) => Ok(cell_values(u, prim)[k]),
        None => Err(Error::Usage(format!("unknown section variable '{name}'; valid: {}", names.join(",")))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    pub axis: Axis,
    /// Center of the selected row or column.
    pub coord: f64,
    pub positions: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl CrossSection {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(match self.axis {
            Axis::X => "x",
            Axis::Y => "y",
        });
        for (n, _) in &self.columns {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (k, pos) in self.positions.iter().enumerate() {
            out.push_str(&format!("{pos:.16e}"));
            for (_, v) in &self.columns {
                out.push_str(&format!(",{:.16e}", v[k]));
            }
            out.push('\n');
        }
        out
    }
}

/// Values of the nearest row (`Axis::X`) or column (`Axis::Y`) of cells to
/// `coord`. No interpolation.
pub fn cross_section(total: &Field2D, gas: &GasModel, axis: Axis, coord: f64, variables: &[String]) -> Result<CrossSection> {
    let g = total.grid;
    let [x0, x1, y0, y1] = g.domain();
    let (lo, hi, first, step, n) = match axis {
        Axis::X => (y0, y1, g.y0, g.dy, g.ny),
        Axis::Y => (x0, x1, g.x0, g.dx, g.nx),
    };
    if !(coord >= lo && coord <= hi) {
        return Err(Error::OutOfDomain { coord, lo, hi });
    }
    let idx = (((coord - first) / step).round() as isize).clamp(0, n as isize - 1);
    let cells: Vec<(isize, isize)> = match axis {
        Axis::X => (0..g.nx as isize).map(|i| (i, idx)).collect(),
        Axis::Y => (0..g.ny as isize).map(|j| (idx, j)).collect(),
    };
    let positions = cells
        .iter()
        .map(|&(i, j)| match axis {
            Axis::X => g.x(i),
            Axis::Y => g.y(j),
        })
        .collect();
    let mut columns = Vec::new();
    for name in variables {
        let mut col = Vec::with_capacity(cells.len());
        for &(i, j) in &cells {
            let u = total[(i, j)];
            let prim = primitive_from_conserved(&u, gas).map_err(|e| e.at_cell(i, j))?;
            col.push(section_value(&u, &prim, name)?);
        }
        columns.push((name.clone(), col));
    }
    Ok(CrossSection { axis, coord: first + idx as f64 * step, positions, columns })
}

/// Writes the time series of a report as CSV.
pub fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# steps={} final_time={:.16e} wall_seconds={:.3} status={}", report.steps, report.final_time, report.wall_time.as_secs_f64(), report.status);
    out.push_str("step,t,dt,max_div_b,mass,energy,max_delta,ctm\n");
    for r in &report.series {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.step, r.t, r.dt, r.max_div_b, r.mass, r.energy, r.max_delta, r.ctm_applied as u8
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
