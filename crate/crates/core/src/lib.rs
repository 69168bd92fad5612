//! Finite element solver for the incompressible Navier–Stokes equations with
//! variable density.
//!
//! Density is carried through its square root `σ` (with `ρ = λσ²`), and two
//! scalar recovery factors restore energy and mass balance after each step.
//! Velocity and pressure use Taylor–Hood P2/P1 elements on triangles.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod assembly;
pub mod cases;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fem;
pub mod mesh;
pub mod scheme;
pub mod sparsela;

pub use error::{Error, Result};
