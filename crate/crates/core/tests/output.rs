use std::fs;

use wbmhd::cases::{diagnostics, init_case, CaseConfig, CaseName};
use wbmhd::driver::{cross_section, field_columns, write_field, Axis, Format, SectionRequest};
use wbmhd::grid::Field2D;
use wbmhd::physics::{primitive_from_conserved, GasModel};
use wbmhd::Error;

fn four_state(n: usize) -> (Field2D, GasModel) {
    let mut case = CaseConfig::new(CaseName::FourState);
    case.nx = n;
    case.ny = n;
    let setup = init_case(&case).unwrap();
    (setup.initial, case.gas().unwrap())
}

fn read_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn csv_round_trip_is_exact() {
    let (total, gas) = four_state(6);
    let diag = diagnostics(&total, &gas).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    write_field(&total, &gas, &diag, true, Format::Csv, &path, "t").unwrap();
    let (header, rows) = read_csv(&fs::read_to_string(&path).unwrap());
    assert_eq!(header, field_columns(true));
    assert_eq!(rows.len(), 36);
    let g = total.grid;
    let mut k = 0;
    for j in 0..g.ny as isize {
        for i in 0..g.nx as isize {
            let row = &rows[k];
            let p = primitive_from_conserved(&total[(i, j)], &gas).unwrap();
            assert_eq!(row[0], g.x(i));
            assert_eq!(row[1], g.y(j));
            assert_eq!(&row[2..11], &[p.rho, p.u[0], p.u[1], p.u[2], p.p, total[(i, j)].energy(), p.b[0], p.b[1], p.b[2]]);
            assert_eq!(row[11], diag.div_b[(i, j)]);
            assert_eq!(row[14].to_bits(), diag.beta[(i, j)].to_bits());
            k += 1;
        }
    }
}

#[test]
fn two_by_two_field_has_four_rows() {
    let (total, gas) = four_state(2);
    let diag = diagnostics(&total, &gas).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    write_field(&total, &gas, &diag, false, Format::Csv, &path, "t").unwrap();
    let (header, rows) = read_csv(&fs::read_to_string(&path).unwrap());
    assert_eq!(header.len(), 12);
    assert_eq!(rows.len(), 4);
}

#[test]
fn vtk_structured_points_layout() {
    let (total, gas) = four_state(8);
    let diag = diagnostics(&total, &gas).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.vtk");
    write_field(&total, &gas, &diag, true, Format::Vtk, &path, "four\nstate").unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# vtk DataFile Version 3.0");
    assert_eq!(lines[1], "four state");
    assert_eq!(lines[2], "ASCII");
    assert_eq!(lines[3], "DATASET STRUCTURED_POINTS");
    assert_eq!(lines[4], "DIMENSIONS 8 8 1");
    assert!(lines[5].starts_with("ORIGIN "));
    assert!(lines[6].starts_with("SPACING "));
    assert_eq!(lines[7], "POINT_DATA 64");
    let scalars: Vec<&str> = lines.iter().filter(|l| l.starts_with("SCALARS ")).copied().collect();
    assert_eq!(scalars.len(), field_columns(true).len() - 2);
    assert_eq!(scalars[0], "SCALARS rho double 1");
    // Header, then per scalar: two header lines and one value per point.
    assert_eq!(lines.len(), 8 + scalars.len() * (2 + 64));
}

#[test]
fn sections_pick_nearest_row() {
    let (total, gas) = four_state(16);
    let vars = vec!["rho".to_string(), "u2".to_string()];
    let sec = cross_section(&total, &gas, Axis::X, 0.45, &vars).unwrap();
    assert_eq!(sec.positions.len(), 16);
    assert!((sec.coord - total.grid.y(11)).abs() < 1e-15);
    let rho = sec.column("rho").unwrap();
    assert_eq!(rho[0], 2.0);
    assert_eq!(rho[15], 1.0);
    let other = cross_section(&total, &gas, Axis::X, 0.9, &vars).unwrap();
    assert_eq!(sec.columns, other.columns);
    let col = cross_section(&total, &gas, Axis::Y, -0.3, &vars).unwrap();
    assert_eq!(col.column("u2").unwrap()[0], 0.5);
    assert_eq!(col.column("rho").unwrap()[15], 2.0);
    let csv = sec.to_csv();
    assert_eq!(csv.lines().next(), Some("x,rho,u2"));
    assert_eq!(csv.lines().count(), 17);
}

#[test]
fn section_errors() {
    let (total, gas) = four_state(4);
    let err = cross_section(&total, &gas, Axis::Y, 1.5, &["rho".to_string()]).unwrap_err();
    assert!(matches!(err, Error::OutOfDomain { .. }));
    assert_eq!(err.exit_code(), 2);
    assert!("x@0.0:rho,B2".parse::<SectionRequest>().is_ok());
    for bad in ["z@0:rho", "x0:rho", "x@a:rho", "x@0:temperature"] {
        assert!(bad.parse::<SectionRequest>().is_err(), "{bad}");
    }
}
