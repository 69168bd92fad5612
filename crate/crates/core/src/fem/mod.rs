//! Lagrange P1/P2 elements on triangles, quadrature, degree-of-freedom maps
//! and discrete fields.

mod dofmap;
mod element;
mod function;
mod quadrature;
mod space;

pub use dofmap::{build_dof_map, DofMap, SpaceKind};
pub use element::{
    eval_basis, eval_basis_grad, reference_gradients, ElementGeometry, ReferenceElement,
    LOCAL_EDGES,
};
pub use function::{
    discrete_l2_inner, fe_eval, h1_seminorm_sq, l2_norm, FeFunction, Field, FieldValue,
};
pub use quadrature::{quadrature_rule, QuadratureRule, ASSEMBLY_DEGREE, MAX_DEGREE};
pub use space::{compensated_sum, Discretization};
