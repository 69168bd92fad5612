//! L² and Stokes projections: third-order convergence of the velocity.

use std::f64::consts::PI;
use std::sync::Arc;

use vdflow::assembly::{l2_project, stokes_project, vector_trace, DirichletData, StokesData, StokesOperators};
use vdflow::fem::{Discretization, SpaceKind};
use vdflow::mesh::{generate_rectangle_mesh, RectangleTags};
use vdflow::sparsela::DirectSolver;

fn main() -> vdflow::Result<()> {
    let u = |x: [f64; 2]| [(PI * x[0]).sin() * (PI * x[1]).cos(), -(PI * x[0]).cos() * (PI * x[1]).sin()];
    let grad = |x: [f64; 2]| {
        let (sx, cx, sy, cy) = ((PI * x[0]).sin(), (PI * x[0]).cos(), (PI * x[1]).sin(), (PI * x[1]).cos());
        [[PI * cx * cy, -PI * sx * sy], [PI * sx * sy, -PI * cx * cy]]
    };
    let p = |x: [f64; 2]| (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).cos();
    let g = |x: [f64; 2]| (x[0] * x[1]).exp();

    let mut prev: Option<(f64, f64)> = None;
    for n in [4, 8, 16, 32] {
        let m = generate_rectangle_mesh(0.0, 0.0, 1.0, 1.0, n, n, &RectangleTags::uniform(1, "wall"))?;
        let d = Discretization::new(Arc::new(m))?;
        let mut solver = DirectSolver::new(1e-12);

        let gh = l2_project(&d, &g, SpaceKind::P2, &mut solver)?;
        let diff: Vec<f64> = d.scalar_values(&gh).iter().zip(d.sample_scalar(g)).map(|(a, b)| a - b).collect();
        let e_l2 = d.inner_scalar(&diff, &diff).sqrt();

        let ops = StokesOperators::new(&d);
        let boundary: Vec<usize> = d.p2v().boundary_dofs().values().flatten().copied().collect();
        let bc = DirichletData::from_pairs(vector_trace(&d, boundary, &u));
        let (uh, _) = stokes_project(&d, &ops, &StokesData { grad_u: &grad, p: &p }, bc, true, &mut solver)?;
        let diff: Vec<[f64; 2]> = d
            .vector_values(&uh)
            .iter()
            .zip(d.sample_vector(u))
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1]])
            .collect();
        let e_stokes = d.inner_vector(&diff, &diff).sqrt();

        let rates = prev
            .map(|(a, b)| format!("rates {:.2} {:.2}", (a / e_l2).log2(), (b / e_stokes).log2()))
            .unwrap_or_default();
        println!("n = {n:>2}  |g - P g| = {e_l2:.3e}  |u - R u| = {e_stokes:.3e}  {rates}");
        prev = Some((e_l2, e_stokes));
    }
    Ok(())
}
