//! Direct sparse solve of a P2 Poisson problem with Dirichlet elimination.

use std::sync::Arc;

use vdflow::assembly::{apply_dirichlet, assemble_mass, assemble_stiffness, DirichletData, MassWeight};
use vdflow::fem::{Discretization, FeFunction, SpaceKind};
use vdflow::mesh::generate_disk_mesh;
use vdflow::sparsela::DirectSolver;

fn main() -> vdflow::Result<()> {
    // −Δu = 4 on the unit disk, u = 0 on the circle; exact u = 1 − r².
    let mesh = generate_disk_mesh(1.0, 24, 144)?;
    let d = Discretization::new(Arc::new(mesh))?;
    let k = assemble_stiffness(&d, SpaceKind::P2);
    let m = assemble_mass(&d, SpaceKind::P2, MassWeight::Unit);
    let rhs: Vec<f64> = m.mul_vec(&vec![4.0; d.p2().dof_count()]);
    let boundary = d.p2().boundary_dofs().values().flatten().copied();
    let bc = DirichletData::homogeneous(boundary);

    let reduced = apply_dirichlet(&k, &rhs, &bc)?;
    let mut solver = DirectSolver::new(1e-12);
    let (x, report) = solver.solve(&reduced.matrix, &reduced.rhs)?;
    println!("{report}");

    let uh = FeFunction::new(d.p2().clone(), reduced.expand(&x))?;
    let err: Vec<f64> = d
        .scalar_values(&uh)
        .iter()
        .zip(d.quadrature_points())
        .map(|(v, x)| v - (1.0 - x[0] * x[0] - x[1] * x[1]))
        .collect();
    println!("{} unknowns, L2 error {:.3e}", reduced.matrix.nrows(), d.inner_scalar(&err, &err).sqrt());
    Ok(())
}
