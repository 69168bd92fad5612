//! Conserved quantities, the discrete energy balance, and error measurement.

use crate::cases::ExactSolution;
use crate::error::{Error, Result};
use crate::fem::{Discretization, FeFunction};
use crate::scheme::{CompositeDensity, SchemeState};

/// Per-step record. Every field is computed with the assembly quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub mass: f64,
    /// `½‖σu‖²`.
    pub energy: f64,
    pub min_density: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// `(E^{n+1} − Eⁿ)/τ + μ‖∇ũ^{n+1}‖² − (f^{n+1}, ũ^{n+1})`.
    pub energy_residual: f64,
    /// `‖∇ũ‖²`.
    pub grad_norm: f64,
    /// Energy supplied through Dirichlet boundaries during the step.
    pub boundary_work: f64,
}

/// Diagnostics of a single state; the balance fields are left at zero.
pub fn step_diagnostics(disc: &Discretization, state: &SchemeState) -> StepDiagnostics {
    StepDiagnostics {
        step: state.step,
        t: state.time,
        mass: total_mass(disc, &state.density),
        energy: kinetic_energy(disc, state.sigma(), &state.velocity),
        min_density: min_density_sample(disc, &state.density),
        gamma: state.gamma,
        lambda: state.lambda(),
        energy_residual: 0.0,
        grad_norm: grad_norm_sq(disc, &state.velocity_tilde),
        boundary_work: 0.0,
    }
}

pub fn total_mass(disc: &Discretization, rho: &CompositeDensity) -> f64 {
    let s = disc.scalar_values(&rho.sigma);
    rho.lambda * disc.inner_scalar(&s, &s)
}

pub fn kinetic_energy(disc: &Discretization, sigma: &FeFunction, u: &FeFunction) -> f64 {
    let s = disc.scalar_values(sigma);
    let v = disc.vector_values(u);
    let su: Vec<[f64; 2]> = s.iter().zip(&v).map(|(s, v)| [s * v[0], s * v[1]]).collect();
    0.5 * disc.inner_vector(&su, &su)
}

pub fn grad_norm_sq(disc: &Discretization, u: &FeFunction) -> f64 {
    let g: Vec<f64> = disc
        .vector_grads(u)
        .iter()
        .map(|g| g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1])
        .collect();
    disc.integrate(&g)
}

/// `forcing` holds `f^{n+1}` at the quadrature points.
pub fn energy_identity_residual(
    disc: &Discretization,
    prev: &SchemeState,
    next: &SchemeState,
    forcing: &[[f64; 2]],
    viscosity: f64,
    tau: f64,
) -> f64 {
    let e0 = kinetic_energy(disc, prev.sigma(), &prev.velocity);
    let e1 = kinetic_energy(disc, next.sigma(), &next.velocity);
    let ut = disc.vector_values(&next.velocity_tilde);
    (e1 - e0) / tau + viscosity * grad_norm_sq(disc, &next.velocity_tilde) - disc.inner_vector(forcing, &ut)
}

/// Minimum of `λσ²` over quadrature points and P2 nodes.
pub fn min_density_sample(disc: &Discretization, rho: &CompositeDensity) -> f64 {
    rho.values(disc)
        .into_iter()
        .chain(rho.nodal())
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub tau: f64,
    pub h: f64,
    pub err_u: f64,
    pub err_rho: f64,
    pub err_p: f64,
}

/// L² errors at time `t`; the pressure error is taken modulo constants.
pub fn error_norms(
    disc: &Discretization,
    state: &SchemeState,
    exact: &ExactSolution,
    t: f64,
    tau: f64,
) -> ErrorRecord {
    let u = disc.vector_values(&state.velocity);
    let du: Vec<[f64; 2]> = disc
        .quadrature_points()
        .iter()
        .zip(&u)
        .map(|(&x, v)| {
            let e = (exact.u)(t, x);
            [e[0] - v[0], e[1] - v[1]]
        })
        .collect();
    let rho = state.density.values(disc);
    let dr: Vec<f64> = disc
        .quadrature_points()
        .iter()
        .zip(&rho)
        .map(|(&x, r)| (exact.rho)(t, x) - r)
        .collect();
    let p = disc.scalar_values(&state.pressure);
    let mut dp: Vec<f64> = disc
        .quadrature_points()
        .iter()
        .zip(&p)
        .map(|(&x, p)| (exact.p)(t, x) - p)
        .collect();
    let area = disc.integrate(&vec![1.0; dp.len()]);
    let mean = disc.integrate(&dp) / area;
    dp.iter_mut().for_each(|v| *v -= mean);
    ErrorRecord {
        tau,
        h: disc.mesh().h(),
        err_u: disc.inner_vector(&du, &du).sqrt(),
        err_rho: disc.inner_scalar(&dr, &dr).sqrt(),
        err_p: disc.inner_scalar(&dp, &dp).sqrt(),
    }
}

/// `log2(e_i / e_{i+1})` for u, ρ, p between consecutive records, which must
/// halve `τ`.
pub fn convergence_orders(records: &[ErrorRecord]) -> Result<Vec<[f64; 3]>> {
    if records.len() < 2 {
        return Err(Error::input("convergence orders need at least two records"));
    }
    records
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            if ((a.tau / b.tau) - 2.0).abs() > 1e-9 {
                return Err(Error::input(format!(
                    "time steps {} and {} are not a halving sequence",
                    a.tau, b.tau
                )));
            }
            Ok([
                (a.err_u / b.err_u).log2(),
                (a.err_rho / b.err_rho).log2(),
                (a.err_p / b.err_p).log2(),
            ])
        })
        .collect()
}

/// Bounds enforced in strict mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyTolerances {
    pub mass: f64,
    pub gamma: f64,
    pub energy: f64,
}

impl Default for PropertyTolerances {
    fn default() -> Self {
        Self {
            mass: 1e-10,
            gamma: 1e-10,
            energy: 1e-8,
        }
    }
}

/// Checks one step against the initial record. The energy balance is
/// checked after crediting the boundary work, so it applies to every case.
pub fn check_properties(
    diag: &StepDiagnostics,
    initial: &StepDiagnostics,
    tau: f64,
    tol: &PropertyTolerances,
) -> Vec<String> {
    let mut out = Vec::new();
    let drift = (diag.mass - initial.mass).abs() / initial.mass.abs();
    if !(drift <= tol.mass) {
        out.push(format!("relative mass drift {drift:e} exceeds {:e}", tol.mass));
    }
    if !(diag.min_density >= 0.0) {
        out.push(format!("minimum density {:e} is negative", diag.min_density));
    }
    if !(diag.gamma >= 1.0 - tol.gamma) {
        out.push(format!("gamma = {} is below 1 - {:e}", diag.gamma, tol.gamma));
    }
    let bound = tol.energy * (initial.energy / tau).max(1.0);
    let defect = diag.energy_residual - diag.boundary_work;
    if !(defect.abs() <= bound) {
        out.push(format!("energy balance defect {defect:e} exceeds {bound:e}"));
    }
    out
}
