//! The four-step time integrator: density transport, momentum solve, and
//! the velocity and density recovery factors.

use std::sync::Arc;

use crate::assembly::{
    assemble_density_step, assemble_momentum_step, l2_project, stokes_project, vector_trace,
    DirichletData, MomentumInputs, StokesData, StokesOperators,
};
use crate::cases::{BoundaryCondition, CaseSetup};
use crate::diagnostics::{self, StepDiagnostics};
use crate::error::{Error, Result};
use crate::fem::{Discretization, FeFunction, SpaceKind, ASSEMBLY_DEGREE};
use crate::mesh::Mesh;
use crate::sparsela::{DirectSolver, SolveReport, DEFAULT_RESIDUAL_BOUND};

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub viscosity: f64,
    pub tau: f64,
    pub final_time: f64,
    pub quadrature_degree: usize,
    pub residual_bound: f64,
    /// Relative threshold for the zero branch of the velocity recovery,
    /// in units of squared initial mass.
    pub gamma_threshold: f64,
    pub snapshot_stride: usize,
    /// Added to every computed `γ`. Only for exercising property checks.
    pub gamma_offset: f64,
}

impl SchemeConfig {
    pub fn for_case(case: &CaseSetup) -> Self {
        Self {
            viscosity: case.viscosity,
            tau: case.tau,
            final_time: case.final_time,
            quadrature_degree: ASSEMBLY_DEGREE,
            residual_bound: DEFAULT_RESIDUAL_BOUND,
            gamma_threshold: 1e-28,
            snapshot_stride: 0,
            gamma_offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("viscosity", self.viscosity),
            ("tau", self.tau),
            ("final_time", self.final_time),
            ("residual_bound", self.residual_bound),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.tau > self.final_time * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "tau = {} exceeds final_time = {}",
                self.tau, self.final_time
            )));
        }
        if !(self.gamma_threshold >= 0.0) {
            return Err(Error::Config("gamma_threshold must be nonnegative".into()));
        }
        Ok(())
    }

    /// Number of steps `round(T/τ)`, and whether that changes `T`.
    pub fn step_count(&self) -> (usize, bool) {
        let n = (self.final_time / self.tau).round().max(1.0);
        let adjusted = (n * self.tau - self.final_time).abs() > 1e-12 * self.final_time;
        (n as usize, adjusted)
    }
}

/// Density stored as `ρ = λσ²`.
#[derive(Debug, Clone)]
pub struct CompositeDensity {
    pub lambda: f64,
    pub sigma: FeFunction,
}

impl CompositeDensity {
    /// `λσ²` at every quadrature point.
    pub fn values(&self, disc: &Discretization) -> Vec<f64> {
        disc.scalar_values(&self.sigma)
            .into_iter()
            .map(|s| self.lambda * s * s)
            .collect()
    }

    /// P2 nodal interpolant of `λσ²`, for export only.
    pub fn nodal(&self) -> Vec<f64> {
        self.sigma.coeffs().iter().map(|s| self.lambda * s * s).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SchemeState {
    pub step: usize,
    pub time: f64,
    pub density: CompositeDensity,
    /// Velocity before recovery.
    pub velocity_tilde: FeFunction,
    pub velocity: FeFunction,
    pub pressure: FeFunction,
    pub gamma: f64,
}

impl SchemeState {
    pub fn sigma(&self) -> &FeFunction {
        &self.density.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.density.lambda
    }
}

/// Result of the momentum step.
#[derive(Debug, Clone)]
pub struct MomentumStep {
    pub velocity_tilde: FeFunction,
    pub pressure: FeFunction,
    /// `Σ ũ_i R_i` over constrained rows minus `ũᵀNũ`: the work done through
    /// the boundary, which the discrete energy balance picks up when the
    /// velocity trace is nonzero.
    pub boundary_work: f64,
    pub report: SolveReport,
}

/// `γ` from the four squared norms `‖a−b‖², ‖b‖², ‖c‖², ‖a‖²` with
/// `a = σ^{n+1}ũ^{n+1}`, `b = σⁿũⁿ`, `c = σⁿuⁿ`. Returns 1 when `‖a‖² ≤ eps`.
pub fn gamma_from_norms(diff: f64, prev_tilde: f64, prev: f64, next: f64, eps: f64) -> f64 {
    if next <= eps {
        1.0
    } else {
        1.0 + (diff - prev_tilde + prev) / next
    }
}

/// `λ_{n+1} = λ_n ∫σ_n² / ∫σ_{n+1}²`.
pub fn lambda_from_integrals(lambda_prev: f64, prev: f64, next: f64) -> Result<f64> {
    if !(next > 0.0) || !next.is_finite() {
        return Err(Error::DegenerateDensity(format!(
            "integral of the new squared density root is {next}"
        )));
    }
    Ok(lambda_prev * prev / next)
}

/// Receives every state of a run, starting with the initial one.
pub trait RunSink {
    fn observe(&mut self, sim: &Simulation, state: &SchemeState, diag: &StepDiagnostics) -> Result<()>;
}

impl<F> RunSink for F
where
    F: FnMut(&Simulation, &SchemeState, &StepDiagnostics) -> Result<()>,
{
    fn observe(&mut self, sim: &Simulation, state: &SchemeState, diag: &StepDiagnostics) -> Result<()> {
        self(sim, state, diag)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: SchemeState,
    pub diagnostics: Vec<StepDiagnostics>,
}

/// A case bound to its discretization, operators and solvers.
pub struct Simulation {
    case: CaseSetup,
    cfg: SchemeConfig,
    disc: Discretization,
    ops: StokesOperators,
    velocity_tags: Vec<(Vec<usize>, crate::cases::VectorTimeField)>,
    sigma_inflow: DirichletData,
    bordered: bool,
    density_solver: DirectSolver,
    momentum_solver: DirectSolver,
    initial_mass: Option<f64>,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("case", &self.case.name)
            .field("cfg", &self.cfg)
            .field("elements", &self.disc.element_count())
            .finish_non_exhaustive()
    }
}

impl Simulation {
    pub fn new(case: CaseSetup, cfg: SchemeConfig) -> Result<Self> {
        let mesh = case.mesh.build()?;
        Self::with_mesh(case, cfg, mesh)
    }

    pub fn with_mesh(case: CaseSetup, cfg: SchemeConfig, mesh: Mesh) -> Result<Self> {
        cfg.validate()?;
        case.self_check(&mesh)?;
        let disc = Discretization::with_degree(Arc::new(mesh), cfg.quadrature_degree)?;
        let ops = StokesOperators::new(&disc);

        let mut velocity_tags = Vec::new();
        let mut sigma_pairs = Vec::new();
        for (tag, bc) in &case.boundary {
            if let Some(g) = bc.velocity() {
                velocity_tags.push((disc.p2v().boundary_dofs_for(*tag).to_vec(), g.clone()));
            }
            if let BoundaryCondition::Inflow { sigma, .. } = bc {
                sigma_pairs.extend(disc.p2().boundary_dofs_for(*tag).iter().map(|&d| (d, *sigma)));
            }
        }
        let bordered = !case.has_open_boundary();
        Ok(Self {
            velocity_tags,
            sigma_inflow: DirichletData::from_pairs(sigma_pairs),
            bordered,
            density_solver: DirectSolver::new(cfg.residual_bound),
            momentum_solver: DirectSolver::new(cfg.residual_bound),
            initial_mass: None,
            case,
            cfg,
            disc,
            ops,
        })
    }

    pub fn case(&self) -> &CaseSetup {
        &self.case
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.disc.mesh()
    }

    pub fn is_bordered(&self) -> bool {
        self.bordered
    }

    /// Velocity boundary values at time `t`. Where tags share a dof the
    /// later table entry wins.
    pub fn velocity_dirichlet(&self, t: f64) -> DirichletData {
        let mut pairs = Vec::new();
        for (dofs, g) in &self.velocity_tags {
            pairs.extend(vector_trace(&self.disc, dofs.iter().copied(), &|x| g(t, x)));
        }
        DirichletData::from_pairs(pairs)
    }

    /// Projects the initial data: `σ⁰ = Π_h√ρ⁰`, `(u⁰, p⁰)` by the Stokes
    /// projection, `λ⁰ = ∫Π_hρ⁰ / ∫(σ⁰)²`, `ũ⁰ = u⁰`, `γ⁰ = 1`.
    pub fn init_state(&mut self) -> Result<SchemeState> {
        let disc = &self.disc;
        let rho0 = self.case.rho0.clone();
        for (k, r) in disc.sample_scalar(|x| rho0(x)).into_iter().enumerate() {
            if !(r > 0.0) {
                let x = disc.quadrature_points()[k];
                return Err(Error::input(format!(
                    "initial density {r} at ({}, {}) is not positive",
                    x[0], x[1]
                )));
            }
        }
        let mut solver = DirectSolver::new(self.cfg.residual_bound);
        let sigma = l2_project(disc, &|x| rho0(x).sqrt(), SpaceKind::P2, &mut solver)?;
        let rho_h = l2_project(disc, &|x| rho0(x), SpaceKind::P2, &mut solver)?;
        let target = disc.integrate(&disc.scalar_values(&rho_h));
        let s = disc.scalar_values(&sigma);
        let lambda = lambda_from_integrals(1.0, target, disc.inner_scalar(&s, &s))?;

        let grad_u0 = self.case.grad_u0.clone();
        let p0 = self.case.p0.clone();
        let data = StokesData {
            grad_u: &|x| grad_u0(x),
            p: &|x| p0(x),
        };
        let (u, p) = stokes_project(
            disc,
            &self.ops,
            &data,
            self.velocity_dirichlet(0.0),
            self.bordered,
            &mut solver,
        )?;
        let state = SchemeState {
            step: 0,
            time: 0.0,
            density: CompositeDensity { lambda, sigma },
            velocity_tilde: u.clone(),
            velocity: u,
            pressure: p,
            gamma: 1.0,
        };
        self.initial_mass = Some(diagnostics::total_mass(disc, &state.density));
        Ok(state)
    }

    fn gamma_eps(&self) -> f64 {
        let m = self.initial_mass.unwrap_or(1.0);
        self.cfg.gamma_threshold * m * m
    }

    /// Step 1: transports `σ` with the recovered velocity.
    pub fn step_density(&mut self, state: &SchemeState) -> Result<FeFunction> {
        let sys = assemble_density_step(
            &self.disc,
            state.sigma(),
            &state.velocity,
            self.cfg.tau,
            self.sigma_inflow.clone(),
        )?;
        let (x, report) = sys.solve(&mut self.density_solver)?;
        log::trace!("density solve: {report}");
        FeFunction::new(self.disc.p2().clone(), x)
    }

    /// Step 2: the saddle-point solve for `(ũ^{n+1}, p^{n+1})`.
    pub fn step_momentum(&mut self, state: &SchemeState, sigma_next: &FeFunction) -> Result<MomentumStep> {
        let t = state.time + self.cfg.tau;
        let f = self.case.forcing.clone();
        let forcing = self.disc.sample_vector(|x| f(t, x));
        let inputs = MomentumInputs {
            sigma_next,
            sigma_prev: state.sigma(),
            lambda_prev: state.lambda(),
            velocity_prev: &state.velocity,
            velocity_tilde_prev: &state.velocity_tilde,
            viscosity: self.cfg.viscosity,
            tau: self.cfg.tau,
            forcing: &forcing,
        };
        let sys = assemble_momentum_step(
            &self.disc,
            &self.ops,
            &inputs,
            self.velocity_dirichlet(t),
            self.bordered,
        )?;
        let (u, p, report) = sys.solve(&mut self.momentum_solver)?;
        log::trace!("momentum solve: {report}");

        let nv = sys.velocity_dofs();
        let np = sys.pressure_dofs();
        let mut reaction = 0.0;
        for &d in sys.dirichlet.dofs() {
            let mut r = -sys.rhs[d];
            for (c, v) in sys.matrix.row(d) {
                if c < nv {
                    r += v * u[c];
                } else if c < nv + np {
                    r += v * p[c - nv];
                }
            }
            reaction += u[d] * r;
        }
        let velocity_tilde = FeFunction::new(self.disc.p2v().clone(), u)?;
        let convective = convective_work(&self.disc, state, &velocity_tilde);
        Ok(MomentumStep {
            boundary_work: reaction - convective,
            velocity_tilde,
            pressure: FeFunction::new(self.disc.p1().clone(), p)?,
            report,
        })
    }

    /// Step 3: `γ` and `u^{n+1} = √γ ũ^{n+1}`.
    pub fn recover_velocity(
        &self,
        state: &SchemeState,
        sigma_next: &FeFunction,
        velocity_tilde: &FeFunction,
    ) -> Result<(f64, FeFunction)> {
        let d = &self.disc;
        let s1 = d.scalar_values(sigma_next);
        let s0 = d.scalar_values(state.sigma());
        let ut1 = d.vector_values(velocity_tilde);
        let ut0 = d.vector_values(&state.velocity_tilde);
        let u0 = d.vector_values(&state.velocity);
        let scale = |s: &[f64], u: &[[f64; 2]]| -> Vec<[f64; 2]> {
            s.iter().zip(u).map(|(s, u)| [s * u[0], s * u[1]]).collect()
        };
        let a = scale(&s1, &ut1);
        let b = scale(&s0, &ut0);
        let c = scale(&s0, &u0);
        let diff: Vec<[f64; 2]> = a.iter().zip(&b).map(|(a, b)| [a[0] - b[0], a[1] - b[1]]).collect();
        let gamma = gamma_from_norms(
            d.inner_vector(&diff, &diff),
            d.inner_vector(&b, &b),
            d.inner_vector(&c, &c),
            d.inner_vector(&a, &a),
            self.gamma_eps(),
        ) + self.cfg.gamma_offset;
        if !(gamma > 0.0) {
            return Err(Error::PropertyViolation(format!(
                "velocity recovery factor gamma = {gamma} is not positive"
            )));
        }
        Ok((gamma, velocity_tilde.scaled(gamma.sqrt())))
    }

    /// Step 4: `λ^{n+1}` restoring the total mass.
    pub fn recover_density(&self, state: &SchemeState, sigma_next: &FeFunction) -> Result<f64> {
        let d = &self.disc;
        let s0 = d.scalar_values(state.sigma());
        let s1 = d.scalar_values(sigma_next);
        lambda_from_integrals(state.lambda(), d.inner_scalar(&s0, &s0), d.inner_scalar(&s1, &s1))
    }

    /// One full step.
    pub fn advance(&mut self, state: &SchemeState) -> Result<(SchemeState, StepDiagnostics)> {
        self.advance_inner(state).map_err(|e| e.at_step(state.step + 1))
    }

    fn advance_inner(&mut self, state: &SchemeState) -> Result<(SchemeState, StepDiagnostics)> {
        if self.initial_mass.is_none() {
            self.initial_mass = Some(diagnostics::total_mass(&self.disc, &state.density));
        }
        let sigma = self.step_density(state)?;
        let mom = self.step_momentum(state, &sigma)?;
        let (gamma, velocity) = self.recover_velocity(state, &sigma, &mom.velocity_tilde)?;
        let lambda = self.recover_density(state, &sigma)?;
        let next = SchemeState {
            step: state.step + 1,
            time: state.time + self.cfg.tau,
            density: CompositeDensity { lambda, sigma },
            velocity_tilde: mom.velocity_tilde,
            velocity,
            pressure: mom.pressure,
            gamma,
        };
        let f = self.case.forcing.clone();
        let forcing = self.disc.sample_vector(|x| f(next.time, x));
        let mut diag = diagnostics::step_diagnostics(&self.disc, &next);
        diag.energy_residual = diagnostics::energy_identity_residual(
            &self.disc,
            state,
            &next,
            &forcing,
            self.cfg.viscosity,
            self.cfg.tau,
        );
        diag.boundary_work = mom.boundary_work;
        Ok((next, diag))
    }

    /// Initializes and advances to the final time.
    pub fn run(&mut self, sink: &mut dyn RunSink) -> Result<RunOutput> {
        let (n, adjusted) = self.cfg.step_count();
        if adjusted {
            log::warn!(
                "final time {} is not a multiple of tau = {}; running {n} steps to t = {}",
                self.cfg.final_time,
                self.cfg.tau,
                n as f64 * self.cfg.tau
            );
        }
        let mut state = self.init_state()?;
        let first = diagnostics::step_diagnostics(&self.disc, &state);
        sink.observe(self, &state, &first)?;
        let mut series = Vec::with_capacity(n + 1);
        series.push(first);
        for _ in 0..n {
            let (next, diag) = self.advance(&state)?;
            sink.observe(self, &next, &diag).map_err(|e| e.at_step(next.step))?;
            series.push(diag);
            state = next;
        }
        Ok(RunOutput {
            state,
            diagnostics: series,
        })
    }
}

/// `ũᵀNũ = ∫ρ(u·∇)ũ·ũ + ½|ũ|²∇·(ρu)` with `ρ = λσ²` and `u` from `state`.
fn convective_work(disc: &Discretization, state: &SchemeState, ut: &FeFunction) -> f64 {
    let lambda = state.lambda();
    let s = disc.scalar_values(state.sigma());
    let gs = disc.scalar_grads(state.sigma());
    let u = disc.vector_values(&state.velocity);
    let gu = disc.vector_grads(&state.velocity);
    let v = disc.vector_values(ut);
    let gv = disc.vector_grads(ut);
    let mut vals = Vec::with_capacity(s.len());
    for k in 0..s.len() {
        let r = lambda * s[k] * s[k];
        let flux = [r * u[k][0], r * u[k][1]];
        let div = 2.0 * lambda * s[k] * (gs[k][0] * u[k][0] + gs[k][1] * u[k][1])
            + r * (gu[k][0][0] + gu[k][1][1]);
        let mut val = 0.5 * div * (v[k][0] * v[k][0] + v[k][1] * v[k][1]);
        for c in 0..2 {
            val += (flux[0] * gv[k][c][0] + flux[1] * gv[k][c][1]) * v[k][c];
        }
        vals.push(val);
    }
    disc.integrate(&vals)
}
