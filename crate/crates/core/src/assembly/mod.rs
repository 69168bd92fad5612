//! Discrete systems for the density and momentum steps, projections of
//! initial data, and Dirichlet elimination.
//!
//! Vector unknowns are interleaved (`2·node + component`). All forms share
//! the quadrature tabulated by [`Discretization`](crate::fem::Discretization).

mod dirichlet;
mod forms;
mod systems;

pub use dirichlet::{apply_dirichlet, DirichletData, ReducedSystem};
pub use forms::{
    assemble_divergence, assemble_mass, assemble_momentum_convection, assemble_stiffness,
    assemble_transport, MassWeight,
};
pub use systems::{
    assemble_density_step, assemble_momentum_step, l2_project, stokes_project, vector_trace,
    DensitySystem, MomentumInputs, MomentumSystem, StokesData, StokesOperators,
};
