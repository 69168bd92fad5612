use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{ErrorRecord, StepDiagnostics};
use crate::error::{Error, Result};
use crate::fem::Discretization;
use crate::scheme::SchemeState;

pub const DIAGNOSTICS_SCHEMA: &str = "# vdflow diagnostics schema 1";
pub const ERRORS_SCHEMA: &str = "# vdflow errors schema 1";

pub const DIAGNOSTICS_COLUMNS: [&str; 10] = [
    "step",
    "t",
    "mass",
    "energy",
    "min_density",
    "gamma",
    "lambda",
    "energy_residual",
    "grad_norm",
    "boundary_work",
];

pub const ERRORS_COLUMNS: [&str; 8] = [
    "tau", "h", "err_u", "err_rho", "err_p", "order_u", "order_rho", "order_p",
];

/// Scientific notation with 15 significant digits.
pub fn sci(v: f64) -> String {
    format!("{v:.14e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Resource(format!("csv output: {e}"))
}

fn open_csv(path: &Path, schema: &str, columns: &[&str]) -> Result<csv::Writer<BufWriter<File>>> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "{schema}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(columns).map_err(csv_err)?;
    Ok(w)
}

/// Streams one row per step to `diagnostics.csv`.
pub struct DiagnosticsWriter {
    inner: csv::Writer<BufWriter<File>>,
}

impl DiagnosticsWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self {
            inner: open_csv(path, DIAGNOSTICS_SCHEMA, &DIAGNOSTICS_COLUMNS)?,
        })
    }

    pub fn write(&mut self, d: &StepDiagnostics) -> Result<()> {
        let row = [
            d.step.to_string(),
            sci(d.t),
            sci(d.mass),
            sci(d.energy),
            sci(d.min_density),
            sci(d.gamma),
            sci(d.lambda),
            sci(d.energy_residual),
            sci(d.grad_norm),
            sci(d.boundary_work),
        ];
        self.inner.write_record(&row).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// `errors.csv`; order columns are empty on the first row.
pub fn write_errors_csv(path: &Path, records: &[ErrorRecord], orders: &[[f64; 3]]) -> Result<()> {
    let mut w = open_csv(path, ERRORS_SCHEMA, &ERRORS_COLUMNS)?;
    for (i, r) in records.iter().enumerate() {
        let mut row = vec![sci(r.tau), sci(r.h), sci(r.err_u), sci(r.err_rho), sci(r.err_p)];
        match i.checked_sub(1).and_then(|k| orders.get(k)) {
            Some(o) => row.extend(o.iter().map(|&v| sci(v))),
            None => row.extend(std::iter::repeat_n(String::new(), 3)),
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Legacy ASCII VTK snapshot. P2 fields are written at the vertices, or at
/// every P2 node with each triangle split into four when `subdivide` is set.
/// `rho` is the nodal interpolant of `λσ²`; the header records the minimum
/// of the composite density itself.
pub fn write_vtk(
    path: &Path,
    disc: &Discretization,
    state: &SchemeState,
    composite_min: f64,
    subdivide: bool,
) -> Result<()> {
    let mesh = disc.mesh();
    let nv = mesh.vertex_count();
    let npts = if subdivide { disc.p2().node_count() } else { nv };
    let coords = &disc.p2().node_coords()[..npts];
    let sigma = state.sigma().coeffs();
    let rho = state.density.nodal();
    let u = state.velocity.coeffs();
    let p1 = state.pressure.coeffs();
    let pressure: Vec<f64> = (0..npts)
        .map(|n| {
            if n < nv {
                p1[n]
            } else {
                let [a, b] = mesh.edges()[n - nv];
                0.5 * (p1[a] + p1[b])
            }
        })
        .collect();

    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "# vtk DataFile Version 3.0")?;
    writeln!(
        f,
        "vdflow step {} t {} composite_min_density {}",
        state.step,
        sci(state.time),
        sci(composite_min)
    )?;
    writeln!(f, "ASCII")?;
    writeln!(f, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(f, "POINTS {npts} double")?;
    for x in coords {
        writeln!(f, "{} {} 0", sci(x[0]), sci(x[1]))?;
    }
    let mut cells: Vec<[usize; 3]> = Vec::new();
    for t in 0..mesh.element_count() {
        let n = disc.p2().element_nodes(t);
        if subdivide {
            // edge nodes 3, 4, 5 sit on edges 01, 12, 20
            let (a, b, c) = (n[0], n[1], n[2]);
            let (ab, bc, ca) = (n[3], n[4], n[5]);
            cells.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        } else {
            cells.push([n[0], n[1], n[2]]);
        }
    }
    writeln!(f, "CELLS {} {}", cells.len(), 4 * cells.len())?;
    for c in &cells {
        writeln!(f, "3 {} {} {}", c[0], c[1], c[2])?;
    }
    writeln!(f, "CELL_TYPES {}", cells.len())?;
    for _ in &cells {
        writeln!(f, "5")?;
    }
    writeln!(f, "POINT_DATA {npts}")?;
    for (name, values) in [("sigma", sigma), ("rho", &rho[..]), ("p", &pressure[..])] {
        writeln!(f, "SCALARS {name} double 1")?;
        writeln!(f, "LOOKUP_TABLE default")?;
        for v in &values[..npts] {
            writeln!(f, "{}", sci(*v))?;
        }
    }
    writeln!(f, "VECTORS u double")?;
    for n in 0..npts {
        writeln!(f, "{} {} 0", sci(u[2 * n]), sci(u[2 * n + 1]))?;
    }
    f.flush()?;
    Ok(())
}
