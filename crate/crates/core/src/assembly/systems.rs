use super::dirichlet::{apply_dirichlet, DirichletData};
use super::forms::{
    assemble_divergence, assemble_mass, mass_flux, scalar_load, scatter_p2, stiffness_block,
    transport_block, vector_load, MassWeight,
};
use crate::error::{Error, Result};
use crate::fem::{Discretization, FeFunction, SpaceKind};
use crate::mesh::Point;
use crate::sparsela::{
    augment_mean_zero, csr_from_triplets, CsrMatrix, DirectSolver, SolveReport, TripletBuffer,
};

/// Mesh-dependent operators shared by every saddle-point system.
#[derive(Debug, Clone)]
pub struct StokesOperators {
    divergence: CsrMatrix,
    gradient: CsrMatrix,
    pressure_weights: Vec<f64>,
}

impl StokesOperators {
    pub fn new(disc: &Discretization) -> Self {
        let divergence = assemble_divergence(disc);
        let gradient = divergence.transpose().scaled(-1.0);
        Self {
            divergence,
            gradient,
            pressure_weights: disc.p1_integrals(),
        }
    }

    /// `B`, with `(Bu)_k = (∇·u, ψ_k)`.
    pub fn divergence(&self) -> &CsrMatrix {
        &self.divergence
    }

    /// `−Bᵀ`.
    pub fn gradient(&self) -> &CsrMatrix {
        &self.gradient
    }

    /// `∫ψ_k` for the pressure basis.
    pub fn pressure_weights(&self) -> &[f64] {
        &self.pressure_weights
    }
}

#[derive(Debug, Clone)]
pub struct DensitySystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub constrained: DirichletData,
}

impl DensitySystem {
    pub fn solve(&self, solver: &mut DirectSolver) -> Result<(Vec<f64>, SolveReport)> {
        let red = apply_dirichlet(&self.matrix, &self.rhs, &self.constrained)?;
        let (x, report) = solver.solve(&red.matrix, &red.rhs)?;
        Ok((red.expand(&x), report))
    }
}

/// `(M/τ + C(u)) σ = M σ_prev / τ`, with `inflow` values eliminated.
pub fn assemble_density_step(
    disc: &Discretization,
    sigma_prev: &FeFunction,
    u: &FeFunction,
    tau: f64,
    inflow: DirichletData,
) -> Result<DensitySystem> {
    if !(tau > 0.0) {
        return Err(Error::input(format!("time step must be positive, got {tau}")));
    }
    let flux = disc.vector_values(u);
    let div: Vec<f64> = disc.vector_grads(u).iter().map(|g| g[0][0] + g[1][1]).collect();
    let sp = disc.scalar_values(sigma_prev);
    let n = disc.p2().dof_count();
    let nq = disc.nq();
    let inv = 1.0 / tau;

    let mut t = TripletBuffer::with_capacity(n, n, 36 * disc.element_count());
    scatter_p2(disc, false, &mut t, |e, block| {
        for q in 0..nq {
            let c = disc.jxw(e, q) * inv;
            let phi = disc.phi2(q);
            for i in 0..6 {
                for j in 0..6 {
                    block[i][j] += c * phi[i] * phi[j];
                }
            }
        }
        transport_block(disc, e, &flux, &div, block);
    });
    let mut rhs = vec![0.0; n];
    let scaled: Vec<f64> = sp.iter().map(|s| s * inv).collect();
    scalar_load(disc, &scaled, &mut rhs);

    Ok(DensitySystem {
        matrix: csr_from_triplets(&t)?,
        rhs,
        constrained: inflow,
    })
}

/// Fields entering one momentum solve.
#[derive(Clone, Copy)]
pub struct MomentumInputs<'a> {
    pub sigma_next: &'a FeFunction,
    pub sigma_prev: &'a FeFunction,
    pub lambda_prev: f64,
    pub velocity_prev: &'a FeFunction,
    pub velocity_tilde_prev: &'a FeFunction,
    pub viscosity: f64,
    pub tau: f64,
    /// Body force at the new time level, sampled at quadrature points.
    pub forcing: &'a [[f64; 2]],
}

/// Velocity–pressure system, unknowns ordered velocity, pressure, then the
/// mean-zero multiplier when present.
#[derive(Debug, Clone)]
pub struct MomentumSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dirichlet: DirichletData,
    velocity_dofs: usize,
    pressure_dofs: usize,
    bordered: bool,
}

impl MomentumSystem {
    pub fn velocity_dofs(&self) -> usize {
        self.velocity_dofs
    }

    pub fn pressure_dofs(&self) -> usize {
        self.pressure_dofs
    }

    pub fn is_bordered(&self) -> bool {
        self.bordered
    }

    /// Returns velocity and pressure coefficients.
    pub fn solve(&self, solver: &mut DirectSolver) -> Result<(Vec<f64>, Vec<f64>, SolveReport)> {
        let red = apply_dirichlet(&self.matrix, &self.rhs, &self.dirichlet)?;
        let (x, report) = solver.solve(&red.matrix, &red.rhs)?;
        let full = red.expand(&x);
        let nv = self.velocity_dofs;
        let p = full[nv..nv + self.pressure_dofs].to_vec();
        let mut u = full;
        u.truncate(nv);
        Ok((u, p, report))
    }
}

fn saddle_matrix(
    ops: &StokesOperators,
    mut t: TripletBuffer,
    nv: usize,
    np: usize,
) -> Result<CsrMatrix> {
    t.grow(nv + np, nv + np);
    for r in 0..nv {
        for (c, v) in ops.gradient.row(r) {
            t.push(r, nv + c, v);
        }
    }
    for r in 0..np {
        for (c, v) in ops.divergence.row(r) {
            t.push(nv + r, c, v);
        }
    }
    csr_from_triplets(&t)
}

fn border(
    ops: &StokesOperators,
    a: CsrMatrix,
    rhs: Vec<f64>,
    nv: usize,
    mean: f64,
) -> Result<(CsrMatrix, Vec<f64>)> {
    let dofs: Vec<usize> = (nv..nv + ops.pressure_weights.len()).collect();
    let (m, mut b) = augment_mean_zero(&a, &rhs, &dofs, &ops.pressure_weights)?;
    *b.last_mut().unwrap() = mean;
    Ok((m, b))
}

pub fn assemble_momentum_step(
    disc: &Discretization,
    ops: &StokesOperators,
    inputs: &MomentumInputs<'_>,
    dirichlet: DirichletData,
    bordered: bool,
) -> Result<MomentumSystem> {
    let MomentumInputs {
        sigma_next,
        sigma_prev,
        lambda_prev,
        velocity_prev,
        velocity_tilde_prev,
        viscosity,
        tau,
        forcing,
    } = *inputs;
    if !(tau > 0.0) {
        return Err(Error::input(format!("time step must be positive, got {tau}")));
    }
    if !(viscosity > 0.0) {
        return Err(Error::input(format!("viscosity must be positive, got {viscosity}")));
    }
    let nv = disc.p2v().dof_count();
    let np = disc.p1().dof_count();
    let nq = disc.nq();
    let inv = 1.0 / tau;

    let s1 = disc.scalar_values(sigma_next);
    let s0 = disc.scalar_values(sigma_prev);
    let (_, flux, div) = mass_flux(disc, lambda_prev, sigma_prev, velocity_prev);

    let mut t = TripletBuffer::with_capacity(nv, nv, 72 * disc.element_count());
    scatter_p2(disc, true, &mut t, |e, block| {
        for q in 0..nq {
            let c = disc.jxw(e, q) * inv * s1[e * nq + q] * s1[e * nq + q];
            let phi = disc.phi2(q);
            for i in 0..6 {
                for j in 0..6 {
                    block[i][j] += c * phi[i] * phi[j];
                }
            }
        }
        stiffness_block(disc, e, viscosity, block);
        transport_block(disc, e, &flux, &div, block);
    });

    let mut rhs = vec![0.0; nv + np];
    let ut = disc.vector_values(velocity_tilde_prev);
    let inertia: Vec<[f64; 2]> = (0..ut.len())
        .map(|k| {
            let c = inv * s1[k] * s0[k];
            [c * ut[k][0] + forcing[k][0], c * ut[k][1] + forcing[k][1]]
        })
        .collect();
    vector_load(disc, &inertia, &mut rhs[..nv]);

    let a = saddle_matrix(ops, t, nv, np)?;
    let (matrix, rhs) = if bordered {
        border(ops, a, rhs, nv, 0.0)?
    } else {
        (a, rhs)
    };
    Ok(MomentumSystem {
        matrix,
        rhs,
        dirichlet,
        velocity_dofs: nv,
        pressure_dofs: np,
        bordered,
    })
}

/// Solves `M x = (f, φ)` on the P1 or scalar P2 space.
pub fn l2_project(
    disc: &Discretization,
    field: &dyn Fn(Point) -> f64,
    kind: SpaceKind,
    solver: &mut DirectSolver,
) -> Result<FeFunction> {
    let dm = match kind {
        SpaceKind::P1 => disc.p1().clone(),
        SpaceKind::P2 => disc.p2().clone(),
        SpaceKind::P2Vec => return Err(Error::input("vector projection is not supported")),
    };
    let m = assemble_mass(disc, kind, MassWeight::Unit);
    let values = disc.sample_scalar(field);
    let mut rhs = vec![0.0; dm.dof_count()];
    let nq = disc.nq();
    for e in 0..disc.element_count() {
        let nodes = dm.element_nodes(e);
        for q in 0..nq {
            let w = disc.jxw(e, q) * values[e * nq + q];
            match kind {
                SpaceKind::P1 => {
                    for i in 0..3 {
                        rhs[nodes[i]] += w * disc.phi1(q)[i];
                    }
                }
                _ => {
                    for i in 0..6 {
                        rhs[nodes[i]] += w * disc.phi2(q)[i];
                    }
                }
            }
        }
    }
    let (x, _) = solver.solve(&m, &rhs)?;
    FeFunction::new(dm, x)
}

/// Continuous data for a Stokes projection.
pub struct StokesData<'a> {
    pub grad_u: &'a dyn Fn(Point) -> [[f64; 2]; 2],
    pub p: &'a dyn Fn(Point) -> f64,
}

/// Discrete Stokes projection `(R_h u, Q_h p)`: `(∇R_h u, ∇v) − (∇·v, Q_h p)
/// = (∇u, ∇v) − (∇·v, p)` and `(∇·R_h u, q) = (∇·u, q)`, with the boundary
/// values of `R_h u` taken from `dirichlet`. With `bordered`, `∫Q_h p = ∫p`.
pub fn stokes_project(
    disc: &Discretization,
    ops: &StokesOperators,
    data: &StokesData<'_>,
    dirichlet: DirichletData,
    bordered: bool,
    solver: &mut DirectSolver,
) -> Result<(FeFunction, FeFunction)> {
    let nv = disc.p2v().dof_count();
    let np = disc.p1().dof_count();
    let nq = disc.nq();
    let mut t = TripletBuffer::with_capacity(nv, nv, 72 * disc.element_count());
    scatter_p2(disc, true, &mut t, |e, block| stiffness_block(disc, e, 1.0, block));

    let grads: Vec<[[f64; 2]; 2]> = disc.quadrature_points().iter().map(|&x| (data.grad_u)(x)).collect();
    let pv = disc.sample_scalar(data.p);
    let mut rhs = vec![0.0; nv + np];
    for e in 0..disc.element_count() {
        let vn = disc.p2().element_nodes(e);
        let pn = disc.p1().element_nodes(e);
        for q in 0..nq {
            let k = e * nq + q;
            let w = disc.jxw(e, q);
            let g = disc.p2_grads(e, q);
            let gu = grads[k];
            for i in 0..6 {
                for c in 0..2 {
                    // (∇u_c, ∇φ_i) − p ∂_c φ_i
                    let v = gu[c][0] * g[i][0] + gu[c][1] * g[i][1] - pv[k] * g[i][c];
                    rhs[2 * vn[i] + c] += w * v;
                }
            }
            let du = gu[0][0] + gu[1][1];
            for (kk, &pk) in pn.iter().enumerate() {
                rhs[nv + pk] += w * du * disc.phi1(q)[kk];
            }
        }
    }

    let a = saddle_matrix(ops, t, nv, np)?;
    let (matrix, rhs) = if bordered {
        let mean = disc.integrate(&pv);
        border(ops, a, rhs, nv, mean)?
    } else {
        (a, rhs)
    };
    let sys = MomentumSystem {
        matrix,
        rhs,
        dirichlet,
        velocity_dofs: nv,
        pressure_dofs: np,
        bordered,
    };
    let (u, p, _) = sys.solve(solver)?;
    Ok((
        FeFunction::new(disc.p2v().clone(), u)?,
        FeFunction::new(disc.p1().clone(), p)?,
    ))
}

/// Values of `g` at the listed vector dofs.
pub fn vector_trace(
    disc: &Discretization,
    dofs: impl IntoIterator<Item = usize>,
    g: &dyn Fn(Point) -> [f64; 2],
) -> Vec<(usize, f64)> {
    let coords = disc.p2v().node_coords();
    dofs.into_iter()
        .map(|d| {
            let (node, c) = (d / 2, d % 2);
            (d, g(coords[node])[c])
        })
        .collect()
}
