//! Benchmark problem definitions.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{generate_disk_mesh, generate_rectangle_mesh, import_gmsh, Mesh, Point, RectangleTags};

pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
pub type TensorField = Arc<dyn Fn(Point) -> [[f64; 2]; 2] + Send + Sync>;
pub type ScalarTimeField = Arc<dyn Fn(f64, Point) -> f64 + Send + Sync>;
pub type VectorTimeField = Arc<dyn Fn(f64, Point) -> [f64; 2] + Send + Sync>;

/// Environment variable overriding the bundled mesh directory.
pub const DATA_DIR_ENV: &str = "VDFLOW_DATA_DIR";

pub fn default_data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"))
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Rectangle {
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
        nx: usize,
        ny: usize,
        tag: i32,
    },
    Disk {
        radius: f64,
        rings: usize,
        sectors: usize,
    },
    File(PathBuf),
}

impl MeshSource {
    pub fn build(&self) -> Result<Mesh> {
        match self {
            &MeshSource::Rectangle {
                x0,
                y0,
                x1,
                y1,
                nx,
                ny,
                tag,
            } => generate_rectangle_mesh(x0, y0, x1, y1, nx, ny, &RectangleTags::uniform(tag, "wall")),
            &MeshSource::Disk {
                radius,
                rings,
                sectors,
            } => generate_disk_mesh(radius, rings, sectors),
            MeshSource::File(path) => import_gmsh(path),
        }
    }
}

#[derive(Clone)]
pub enum BoundaryCondition {
    /// Prescribed velocity `g(t, x)`.
    Velocity(VectorTimeField),
    /// Prescribed velocity plus a fixed density root on inflow.
    Inflow { velocity: VectorTimeField, sigma: f64 },
    /// Natural outflow: no boundary terms.
    DoNothing,
}

impl BoundaryCondition {
    pub fn velocity(&self) -> Option<&VectorTimeField> {
        match self {
            BoundaryCondition::Velocity(g) | BoundaryCondition::Inflow { velocity: g, .. } => Some(g),
            BoundaryCondition::DoNothing => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BoundaryCondition::Velocity(_) => "velocity",
            BoundaryCondition::Inflow { .. } => "inflow",
            BoundaryCondition::DoNothing => "do-nothing",
        }
    }
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone)]
pub struct ExactSolution {
    pub rho: ScalarTimeField,
    pub u: VectorTimeField,
    pub p: ScalarTimeField,
}

/// Everything needed to initialize and run one simulation.
#[derive(Clone)]
pub struct CaseSetup {
    pub name: String,
    pub description: String,
    pub mesh: MeshSource,
    /// Applied in order; where tags share a dof the later entry wins.
    pub boundary: Vec<(i32, BoundaryCondition)>,
    pub rho0: ScalarField,
    pub u0: VectorField,
    pub grad_u0: TensorField,
    pub p0: ScalarField,
    pub forcing: VectorTimeField,
    pub viscosity: f64,
    pub tau: f64,
    pub final_time: f64,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for CaseSetup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CaseSetup")
            .field("name", &self.name)
            .field("mesh", &self.mesh)
            .field("boundary", &self.boundary)
            .field("viscosity", &self.viscosity)
            .field("tau", &self.tau)
            .field("final_time", &self.final_time)
            .finish_non_exhaustive()
    }
}

impl CaseSetup {
    /// True when some boundary is left open; the pressure is then fixed by
    /// the outflow condition rather than a mean-zero constraint.
    pub fn has_open_boundary(&self) -> bool {
        self.boundary
            .iter()
            .any(|(_, bc)| matches!(bc, BoundaryCondition::DoNothing))
    }

    pub fn condition(&self, tag: i32) -> Option<&BoundaryCondition> {
        self.boundary.iter().rev().find(|(t, _)| *t == tag).map(|(_, bc)| bc)
    }

    /// Checks the boundary table against the mesh and samples the data.
    pub fn self_check(&self, mesh: &Mesh) -> Result<()> {
        for tag in mesh.tags() {
            let n = self.boundary.iter().filter(|(t, _)| *t == tag.id).count();
            if n != 1 {
                return Err(Error::input(format!(
                    "case {}: boundary tag {} ({}) has {n} conditions, expected 1",
                    self.name, tag.id, tag.name
                )));
            }
        }
        for (t, _) in &self.boundary {
            if !mesh.tags().iter().any(|tag| tag.id == *t) {
                return Err(Error::input(format!(
                    "case {}: condition for tag {t}, which the mesh does not declare",
                    self.name
                )));
            }
        }
        for (k, x) in sample_points(mesh, 1000).into_iter().enumerate() {
            let r = (self.rho0)(x);
            if !(r > 0.0) {
                return Err(Error::input(format!(
                    "case {}: initial density {r} at ({}, {}) is not positive",
                    self.name, x[0], x[1]
                )));
            }
            let t = self.final_time * (k as f64 + 0.5) / 1000.0;
            let f = (self.forcing)(t, x);
            if !(f[0].is_finite() && f[1].is_finite()) {
                return Err(Error::input(format!(
                    "case {}: forcing is not finite at t = {t}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Deterministic interior sample: elements cycled, barycentric coordinates
/// from a two-dimensional additive recurrence folded into the triangle.
pub fn sample_points(mesh: &Mesh, n: usize) -> Vec<Point> {
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_3;
    (0..n)
        .map(|k| {
            let (mut s, mut t) = ((0.5 + A1 * k as f64).fract(), (0.5 + A2 * k as f64).fract());
            if s + t > 1.0 {
                s = 1.0 - s;
                t = 1.0 - t;
            }
            let c = mesh.corners(k % mesh.element_count());
            [
                c[0][0] + s * (c[1][0] - c[0][0]) + t * (c[2][0] - c[0][0]),
                c[0][1] + s * (c[1][1] - c[0][1]) + t * (c[2][1] - c[0][1]),
            ]
        })
        .collect()
}

fn zero_vector() -> VectorField {
    Arc::new(|_| [0.0; 2])
}

fn zero_tensor() -> TensorField {
    Arc::new(|_| [[0.0; 2]; 2])
}

fn zero_forcing() -> VectorTimeField {
    Arc::new(|_, _| [0.0; 2])
}

pub mod manufactured {
    //! Smooth rotating-flow solution on the unit disk.
    use crate::mesh::Point;

    pub const VISCOSITY: f64 = 0.1;

    pub fn rho(t: f64, x: Point) -> f64 {
        let s = t.sin();
        2.0 + x[0] * s.cos() + x[1] * s.sin()
    }

    pub fn u(t: f64, x: Point) -> [f64; 2] {
        [-x[1] * t.cos(), x[0] * t.cos()]
    }

    pub fn grad_u(t: f64) -> [[f64; 2]; 2] {
        [[0.0, -t.cos()], [t.cos(), 0.0]]
    }

    pub fn p(t: f64, x: Point) -> f64 {
        x[0].sin() * x[1].sin() * t.sin()
    }

    /// `ρ(u_t + (u·∇)u) + ∇p − μΔu`, with `Δu = 0`.
    pub fn forcing(t: f64, x: Point) -> [f64; 2] {
        let r = rho(t, x);
        let (c, s) = (t.cos(), t.sin());
        let ut = [x[1] * s, -x[0] * s];
        let conv = [-x[0] * c * c, -x[1] * c * c];
        let gp = [x[0].cos() * x[1].sin() * s, x[0].sin() * x[1].cos() * s];
        [r * (ut[0] + conv[0]) + gp[0], r * (ut[1] + conv[1]) + gp[1]]
    }
}

/// Time step of a manufactured-solution level: `2^-(3+level)`.
pub fn manufactured_tau(level: usize) -> f64 {
    0.5f64.powi(3 + level as i32)
}

/// Smallest disk mesh (six sectors per ring) whose largest circumdiameter
/// does not exceed `target`.
pub fn disk_rings_for(target: f64) -> Result<usize> {
    for rings in 1..=400 {
        if generate_disk_mesh(1.0, rings, 6 * rings)?.h() <= target {
            return Ok(rings);
        }
    }
    Err(Error::input(format!("no disk mesh reaches h <= {target}")))
}

pub fn case_manufactured_disk(level: usize) -> Result<CaseSetup> {
    let tau = manufactured_tau(level);
    let rings = disk_rings_for(tau.sqrt())?;
    Ok(CaseSetup {
        name: "manufactured-disk".into(),
        description: "exact rotating solution with variable density on the unit disk".into(),
        mesh: MeshSource::Disk {
            radius: 1.0,
            rings,
            sectors: 6 * rings,
        },
        boundary: vec![(1, BoundaryCondition::Velocity(Arc::new(manufactured::u)))],
        rho0: Arc::new(|x| manufactured::rho(0.0, x)),
        u0: Arc::new(|x| manufactured::u(0.0, x)),
        grad_u0: Arc::new(|_| manufactured::grad_u(0.0)),
        p0: Arc::new(|x| manufactured::p(0.0, x)),
        forcing: Arc::new(manufactured::forcing),
        viscosity: manufactured::VISCOSITY,
        tau,
        final_time: 1.0,
        exact: Some(ExactSolution {
            rho: Arc::new(manufactured::rho),
            u: Arc::new(manufactured::u),
            p: Arc::new(manufactured::p),
        }),
    })
}

pub const TAYLOR_GREEN_CELLS: usize = 64;

pub fn case_taylor_green_square(viscosity: f64) -> Result<CaseSetup> {
    case_taylor_green_with_cells(viscosity, TAYLOR_GREEN_CELLS)
}

pub fn case_taylor_green_with_cells(viscosity: f64, cells: usize) -> Result<CaseSetup> {
    use std::f64::consts::PI;
    if !(viscosity > 0.0) {
        return Err(Error::input(format!("viscosity must be positive, got {viscosity}")));
    }
    Ok(CaseSetup {
        name: "taylor-green".into(),
        description: "decaying vortex array in (-1,1)^2, walls at rest".into(),
        mesh: MeshSource::Rectangle {
            x0: -1.0,
            y0: -1.0,
            x1: 1.0,
            y1: 1.0,
            nx: cells,
            ny: cells,
            tag: 1,
        },
        boundary: vec![(1, BoundaryCondition::Velocity(Arc::new(|_, _| [0.0; 2])))],
        rho0: Arc::new(|_| 1.0),
        u0: Arc::new(|x| {
            [
                (PI * x[0]).sin() * (PI * x[1]).cos(),
                -(PI * x[0]).cos() * (PI * x[1]).sin(),
            ]
        }),
        grad_u0: Arc::new(|x| {
            let (sx, cx, sy, cy) = ((PI * x[0]).sin(), (PI * x[0]).cos(), (PI * x[1]).sin(), (PI * x[1]).cos());
            [[PI * cx * cy, -PI * sx * sy], [PI * sx * sy, -PI * cx * cy]]
        }),
        p0: Arc::new(|x| 3.0 / 16.0 * (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).cos()),
        forcing: zero_forcing(),
        viscosity,
        tau: 0.01,
        final_time: 10.0,
        exact: None,
    })
}

pub fn case_backstep() -> Result<CaseSetup> {
    case_backstep_in(&default_data_dir())
}

pub fn case_backstep_in(data_dir: &Path) -> Result<CaseSetup> {
    let path = data_dir.join("backstep.msh");
    if !path.is_file() {
        return Err(Error::Resource(format!("mesh file {} not found", path.display())));
    }
    let inflow: VectorTimeField = Arc::new(|_, x| [24.0 * (x[1] - 0.5) * (1.0 - x[1]), 0.0]);
    Ok(CaseSetup {
        name: "backstep".into(),
        description: "channel (0,8)x(0,1) behind a step of height 0.5 and length 1".into(),
        mesh: MeshSource::File(path),
        boundary: vec![
            (1, BoundaryCondition::Inflow { velocity: inflow, sigma: 1.0 }),
            (3, BoundaryCondition::DoNothing),
            (2, BoundaryCondition::Velocity(Arc::new(|_, _| [0.0; 2]))),
        ],
        rho0: Arc::new(|_| 1.0),
        u0: zero_vector(),
        grad_u0: zero_tensor(),
        p0: Arc::new(|_| 0.0),
        forcing: zero_forcing(),
        viscosity: 0.01,
        tau: 0.01,
        final_time: 7.0,
        exact: None,
    })
}

pub fn case_cylinder() -> Result<CaseSetup> {
    case_cylinder_in(&default_data_dir())
}

pub fn case_cylinder_in(data_dir: &Path) -> Result<CaseSetup> {
    let path = data_dir.join("cylinder.msh");
    if !path.is_file() {
        return Err(Error::Resource(format!("mesh file {} not found", path.display())));
    }
    let inflow: VectorTimeField = Arc::new(|_, x| [6.0 * x[1] * (1.0 - x[1]), 0.0]);
    let wall: VectorTimeField = Arc::new(|_, _| [0.0; 2]);
    Ok(CaseSetup {
        name: "cylinder".into(),
        description: "channel (0,6)x(0,1) past a cylinder of radius 0.15 at (1,0.5)".into(),
        mesh: MeshSource::File(path),
        boundary: vec![
            (1, BoundaryCondition::Inflow { velocity: inflow, sigma: 1.0 }),
            (3, BoundaryCondition::DoNothing),
            (4, BoundaryCondition::Velocity(wall.clone())),
            (2, BoundaryCondition::Velocity(wall)),
        ],
        rho0: Arc::new(|_| 1.0),
        u0: zero_vector(),
        grad_u0: zero_tensor(),
        p0: Arc::new(|_| 0.0),
        forcing: zero_forcing(),
        viscosity: 1.0 / 300.0,
        tau: 0.01,
        final_time: 7.0,
        exact: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub viscosity: String,
    pub tau: String,
    pub final_time: f64,
}

pub fn list_cases() -> Vec<CaseInfo> {
    vec![
        CaseInfo {
            name: "manufactured-disk",
            description: "convergence study: exact rotating solution on the unit disk",
            viscosity: "0.1".into(),
            tau: "2^-(3+level)".into(),
            final_time: 1.0,
        },
        CaseInfo {
            name: "taylor-green",
            description: "property preservation: vortex decay in (-1,1)^2",
            viscosity: "0.1 | 0.05 | 0.01 | 0.005".into(),
            tau: "0.01".into(),
            final_time: 10.0,
        },
        CaseInfo {
            name: "backstep",
            description: "backward-facing step flow with parabolic inflow",
            viscosity: "0.01".into(),
            tau: "0.01".into(),
            final_time: 7.0,
        },
        CaseInfo {
            name: "cylinder",
            description: "channel flow around a circular cylinder",
            viscosity: "1/300".into(),
            tau: "0.01".into(),
            final_time: 7.0,
        },
    ]
}

/// Looks a case up by name. `level` applies to the manufactured case and
/// `viscosity` to Taylor–Green.
pub fn case_by_name(name: &str, level: usize, viscosity: Option<f64>, data_dir: &Path) -> Result<CaseSetup> {
    match name {
        "manufactured-disk" => case_manufactured_disk(level),
        "taylor-green" => case_taylor_green_square(viscosity.unwrap_or(0.01)),
        "backstep" => case_backstep_in(data_dir),
        "cylinder" => case_cylinder_in(data_dir),
        other => Err(Error::Config(format!(
            "unknown case '{other}' (available: {})",
            list_cases().iter().map(|c| c.name).collect::<Vec<_>>().join(", ")
        ))),
    }
}
