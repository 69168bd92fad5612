use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use proptest::prelude::*;
use vdflow::assembly::{stokes_project, DirichletData, StokesData, StokesOperators};
use vdflow::cases::{case_manufactured_disk, case_taylor_green_square, case_taylor_green_with_cells, manufactured, CaseSetup};
use vdflow::diagnostics::{
    check_properties, convergence_orders, energy_identity_residual, kinetic_energy, total_mass, ErrorRecord,
    PropertyTolerances,
};
use vdflow::fem::{Discretization, FeFunction};
use vdflow::scheme::{SchemeConfig, SchemeState, Simulation};
use vdflow::sparsela::DirectSolver;

fn simulation(case: CaseSetup, tau: f64) -> Simulation {
    let mut cfg = SchemeConfig::for_case(&case);
    cfg.tau = tau;
    Simulation::new(case, cfg).unwrap()
}

/// Taylor–Green flow carrying a nonuniform density.
fn stratified_taylor_green(cells: usize, amplitude: f64) -> CaseSetup {
    let mut case = case_taylor_green_with_cells(0.05, cells).unwrap();
    case.rho0 = Arc::new(move |x| 1.0 + amplitude * (PI * x[0] / 2.0).cos() * (PI * x[1]).sin());
    case
}

fn l2(disc: &Discretization, f: &FeFunction) -> f64 {
    let v = disc.scalar_values(f);
    disc.inner_scalar(&v, &v).sqrt()
}

fn l2_diff(disc: &Discretization, a: &FeFunction, b: &FeFunction) -> f64 {
    let d: Vec<f64> = a.coeffs().iter().zip(b.coeffs()).map(|(a, b)| a - b).collect();
    l2(disc, &FeFunction::new(a.dof_map().clone(), d).unwrap())
}

#[test]
fn sigma_norm_does_not_grow_under_wall_bounded_transport() {
    let mut sim = simulation(stratified_taylor_green(12, 0.5), 0.02);
    let mut state = sim.init_state().unwrap();
    for _ in 0..10 {
        let next = sim.step_density(&state).unwrap();
        let (a, b) = (l2(sim.discretization(), state.sigma()), l2(sim.discretization(), &next));
        assert!(b <= a * (1.0 + 1e-12), "{b} > {a}");
        state = sim.advance(&state).unwrap().0;
    }
}

#[test]
fn density_step_halving_shows_first_order_consistency() {
    let case = stratified_taylor_green(12, 0.5);
    let mut reference = simulation(case.clone(), 0.04);
    let state = reference.init_state().unwrap();
    let disc = reference.discretization().clone();

    let mut defects = Vec::new();
    for tau in [0.04, 0.02, 0.01] {
        let mut full = simulation(case.clone(), tau);
        let mut half = simulation(case.clone(), tau / 2.0);
        let one = full.step_density(&state).unwrap();
        let mut mid = state.clone();
        mid.density.sigma = half.step_density(&state).unwrap();
        let two = half.step_density(&mid).unwrap();
        defects.push(l2_diff(&disc, &one, &two));
    }
    for w in defects.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..=5.0).contains(&ratio), "defects {defects:?}");
    }
}

#[test]
fn manufactured_single_step_error_is_small() {
    let mut errors = Vec::new();
    for level in 0..2 {
        let case = case_manufactured_disk(level).unwrap();
        let tau = case.tau;
        let mut sim = simulation(case, tau);
        let state = sim.init_state().unwrap();
        let (next, _) = sim.advance(&state).unwrap();
        let disc = sim.discretization();
        let ut = disc.vector_values(&next.velocity_tilde);
        let diff: Vec<[f64; 2]> = disc
            .quadrature_points()
            .iter()
            .zip(&ut)
            .map(|(&x, v)| {
                let e = manufactured::u(tau, x);
                [v[0] - e[0], v[1] - e[1]]
            })
            .collect();
        errors.push(disc.inner_vector(&diff, &diff).sqrt());
    }
    // First row of the published table at τ = 1/8 after a full run.
    assert!(errors[0] <= 2.7128e-2, "{errors:?}");
    assert!(errors[1] < errors[0], "{errors:?}");
}

#[test]
fn manufactured_initial_velocity_is_reproduced() {
    for level in 0..2 {
        let case = case_manufactured_disk(level).unwrap();
        let tau = case.tau;
        let mut sim = simulation(case, tau);
        let state = sim.init_state().unwrap();
        let disc = sim.discretization();
        let u = disc.vector_values(&state.velocity);
        let diff: Vec<[f64; 2]> = disc
            .quadrature_points()
            .iter()
            .zip(&u)
            .map(|(&x, v)| {
                let e = manufactured::u(0.0, x);
                [v[0] - e[0], v[1] - e[1]]
            })
            .collect();
        let err = disc.inner_vector(&diff, &diff).sqrt();
        let h = disc.mesh().h();
        assert!(err <= 1e-6 * h.powi(3), "level {level}: {err}");
    }
}

#[test]
fn manufactured_coarse_run_is_fast() {
    let case = case_manufactured_disk(0).unwrap();
    let cfg = SchemeConfig::for_case(&case);
    let start = Instant::now();
    let out = Simulation::new(case, cfg).unwrap().run(&mut |_: &Simulation, _: &SchemeState, _: &_| Ok(())).unwrap();
    assert_eq!(out.diagnostics.len(), 9);
    assert!(start.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn momentum_solution_is_discretely_divergence_free() {
    let mut sim = simulation(case_manufactured_disk(1).unwrap(), 1.0 / 16.0);
    let state = sim.init_state().unwrap();
    let sigma = sim.step_density(&state).unwrap();
    let step = sim.step_momentum(&state, &sigma).unwrap();
    let disc = sim.discretization();
    let ops = StokesOperators::new(disc);
    let bu = ops.divergence().mul_vec(step.velocity_tilde.coeffs());
    let v = disc.vector_values(&step.velocity_tilde);
    let h1 = (disc.inner_vector(&v, &v) + vdflow::diagnostics::grad_norm_sq(disc, &step.velocity_tilde)).sqrt();
    let worst = bu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(worst <= 1e-10 * h1, "{worst} vs {h1}");
}

#[test]
fn pressure_shift_leaves_stokes_velocity_unchanged() {
    let case = case_taylor_green_with_cells(0.1, 8).unwrap();
    let sim = simulation(case.clone(), 0.01);
    let disc = sim.discretization();
    let ops = StokesOperators::new(disc);
    let bc = sim.velocity_dirichlet(0.0);
    let grad = case.grad_u0.clone();
    let project = |c: f64| {
        let p0 = case.p0.clone();
        let data = StokesData {
            grad_u: &|x| grad(x),
            p: &move |x| p0(x) + c,
        };
        let mut solver = DirectSolver::new(1e-12);
        stokes_project(disc, &ops, &data, DirichletData::clone(&bc), true, &mut solver).unwrap()
    };
    let (u0, p0) = project(0.0);
    let (u1, p1) = project(2.5);
    let du = u0.coeffs().iter().zip(u1.coeffs()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(du <= 1e-11, "{du}");
    for (a, b) in p0.coeffs().iter().zip(p1.coeffs()) {
        assert!((b - a - 2.5).abs() <= 1e-10);
    }
}

#[test]
fn taylor_green_initial_mass_and_energy() {
    let mut sim = simulation(case_taylor_green_square(0.01).unwrap(), 0.01);
    let state = sim.init_state().unwrap();
    let disc = sim.discretization();
    assert!((total_mass(disc, &state.density) - 4.0).abs() <= 1e-12);

    let u0 = sim.case().u0.clone();
    let u = FeFunction::interpolate_vector(disc.p2v().clone(), |x| u0(x));
    let one = FeFunction::interpolate_scalar(disc.p2().clone(), |_| 1.0);
    let e = kinetic_energy(disc, &one, &u);
    assert!((e - 1.0).abs() <= 0.02, "{e}");
}

#[test]
fn energy_residual_is_sensitive_to_perturbation() {
    let case = case_taylor_green_with_cells(0.01, 16).unwrap();
    let mut sim = simulation(case, 0.01);
    let state = sim.init_state().unwrap();
    let (next, diag) = sim.advance(&state).unwrap();
    let bound = 1e-8 * (kinetic_energy(sim.discretization(), state.sigma(), &state.velocity) / 0.01).max(1.0);
    assert!(diag.energy_residual.abs() <= bound);

    let mut bumped = next.clone();
    for u in [&mut bumped.velocity, &mut bumped.velocity_tilde] {
        for (k, c) in u.coeffs_mut().iter_mut().enumerate() {
            *c += 1e-3 * ((k * 7919) % 13) as f64 / 13.0;
        }
    }
    let forcing = vec![[0.0; 2]; sim.discretization().quadrature_points().len()];
    let r = energy_identity_residual(sim.discretization(), &state, &bumped, &forcing, 0.01, 0.01);
    assert!(r.abs() > 1e-5 && r.abs() < 10.0, "{r}");
}

#[test]
fn published_velocity_orders_are_recomputed() {
    let taus = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
    let err_u = [2.7128e-2, 1.2816e-2, 6.0949e-3, 2.9476e-3, 1.4403e-3];
    let records: Vec<ErrorRecord> = taus
        .iter()
        .zip(err_u)
        .map(|(&tau, e)| ErrorRecord {
            tau,
            h: tau.sqrt(),
            err_u: e,
            err_rho: e,
            err_p: e,
        })
        .collect();
    let orders = convergence_orders(&records).unwrap();
    for (o, expected) in orders.iter().zip([1.0819, 1.0723, 1.0481, 1.0331]) {
        assert!((o[0] - expected).abs() < 5e-4, "{} vs {expected}", o[0]);
    }
}

#[test]
fn late_energy_level_is_first_order_in_tau() {
    let late_energy = |tau: f64| {
        let case = case_taylor_green_with_cells(0.1, 8).unwrap();
        let mut cfg = SchemeConfig::for_case(&case);
        cfg.tau = tau;
        cfg.final_time = 2.0;
        let out = Simulation::new(case, cfg).unwrap().run(&mut |_: &Simulation, _: &SchemeState, _: &_| Ok(())).unwrap();
        out.diagnostics.last().unwrap().energy
    };
    let ratio = late_energy(0.02) / late_energy(0.01);
    assert!((1.8..=2.2).contains(&ratio), "{ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn short_runs_keep_the_scheme_invariants(
        amplitude in 0.0f64..0.9,
        viscosity in 0.005f64..0.2,
        tau in 0.005f64..0.05,
    ) {
        let mut case = stratified_taylor_green(6, amplitude);
        case.viscosity = viscosity;
        let mut sim = simulation(case, tau);
        let state = sim.init_state().unwrap();
        let mut initial = vdflow::diagnostics::step_diagnostics(sim.discretization(), &state);
        initial.energy = kinetic_energy(sim.discretization(), state.sigma(), &state.velocity);
        let mut state = state;
        for _ in 0..3 {
            let (next, diag) = sim.advance(&state).unwrap();
            let found = check_properties(&diag, &initial, tau, &PropertyTolerances::default());
            prop_assert!(found.is_empty(), "{found:?}");
            prop_assert!(diag.min_density >= 0.0);
            prop_assert!((diag.mass - initial.mass).abs() <= 1e-12 * initial.mass);
            prop_assert!(diag.energy <= initial.energy * (1.0 + 1e-12));
            state = next;
        }
    }
}
