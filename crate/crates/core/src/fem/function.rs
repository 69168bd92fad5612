use std::sync::Arc;

use super::dofmap::{DofMap, SpaceKind};
use super::element::{p2_reference_gradients, p2_values, ElementGeometry, ReferenceElement};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};

/// Coefficient vector bound to a [`DofMap`].
#[derive(Debug, Clone)]
pub struct FeFunction {
    dofs: Arc<DofMap>,
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldValue {
    Scalar(f64),
    Vector([f64; 2]),
}

impl FeFunction {
    pub fn new(dofs: Arc<DofMap>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != dofs.dof_count() {
            return Err(Error::input(format!(
                "coefficient length {} does not match dof count {}",
                coeffs.len(),
                dofs.dof_count()
            )));
        }
        Ok(Self { dofs, coeffs })
    }

    pub fn zeros(dofs: Arc<DofMap>) -> Self {
        let n = dofs.dof_count();
        Self {
            dofs,
            coeffs: vec![0.0; n],
        }
    }

    /// Nodal interpolant of a scalar field.
    pub fn interpolate_scalar(dofs: Arc<DofMap>, f: impl Fn(Point) -> f64) -> Self {
        assert_eq!(dofs.kind().components(), 1, "scalar interpolation into a vector space");
        let coeffs = dofs.node_coords().iter().map(|&p| f(p)).collect();
        Self { dofs, coeffs }
    }

    /// Nodal interpolant of a two-component field.
    pub fn interpolate_vector(dofs: Arc<DofMap>, f: impl Fn(Point) -> [f64; 2]) -> Self {
        assert_eq!(dofs.kind(), SpaceKind::P2Vec, "vector interpolation into a scalar space");
        let coeffs = dofs
            .node_coords()
            .iter()
            .flat_map(|&p| f(p))
            .collect();
        Self { dofs, coeffs }
    }

    pub fn dof_map(&self) -> &Arc<DofMap> {
        &self.dofs
    }

    pub fn kind(&self) -> SpaceKind {
        self.dofs.kind()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dofs: Arc::clone(&self.dofs),
            coeffs: self.coeffs.iter().map(|c| s * c).collect(),
        }
    }

    fn local_basis(&self, l: [f64; 3]) -> ([f64; 6], usize) {
        match self.kind().element() {
            ReferenceElement::P1 => ([l[0], l[1], l[2], 0.0, 0.0, 0.0], 3),
            ReferenceElement::P2 => (p2_values(l), 6),
        }
    }

    pub fn eval_scalar(&self, t: usize, l: [f64; 3]) -> f64 {
        debug_assert_eq!(self.kind().components(), 1);
        let (phi, n) = self.local_basis(l);
        let nodes = self.dofs.element_nodes(t);
        (0..n).map(|i| self.coeffs[nodes[i]] * phi[i]).sum()
    }

    pub fn eval_vector(&self, t: usize, l: [f64; 3]) -> [f64; 2] {
        debug_assert_eq!(self.kind(), SpaceKind::P2Vec);
        let phi = p2_values(l);
        let nodes = self.dofs.element_nodes(t);
        let mut v = [0.0; 2];
        for i in 0..6 {
            v[0] += self.coeffs[2 * nodes[i]] * phi[i];
            v[1] += self.coeffs[2 * nodes[i] + 1] * phi[i];
        }
        v
    }

    /// Gradient of a scalar field.
    pub fn eval_grad_scalar(&self, t: usize, l: [f64; 3], geom: &ElementGeometry) -> [f64; 2] {
        let nodes = self.dofs.element_nodes(t);
        let mut g = [0.0; 2];
        match self.kind().element() {
            ReferenceElement::P1 => {
                for (i, r) in [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]].into_iter().enumerate() {
                    let p = geom.push_gradient(r);
                    g[0] += self.coeffs[nodes[i]] * p[0];
                    g[1] += self.coeffs[nodes[i]] * p[1];
                }
            }
            ReferenceElement::P2 => {
                for (i, r) in p2_reference_gradients(l).into_iter().enumerate() {
                    let p = geom.push_gradient(r);
                    g[0] += self.coeffs[nodes[i]] * p[0];
                    g[1] += self.coeffs[nodes[i]] * p[1];
                }
            }
        }
        g
    }

    /// Jacobian `g[c][d] = ∂u_c/∂x_d` of a vector field.
    pub fn eval_grad_vector(&self, t: usize, l: [f64; 3], geom: &ElementGeometry) -> [[f64; 2]; 2] {
        let nodes = self.dofs.element_nodes(t);
        let mut g = [[0.0; 2]; 2];
        for (i, r) in p2_reference_gradients(l).into_iter().enumerate() {
            let p = geom.push_gradient(r);
            for c in 0..2 {
                let a = self.coeffs[2 * nodes[i] + c];
                g[c][0] += a * p[0];
                g[c][1] += a * p[1];
            }
        }
        g
    }
}

pub fn fe_eval(f: &FeFunction, t: usize, l: [f64; 3]) -> FieldValue {
    match f.kind() {
        SpaceKind::P2Vec => FieldValue::Vector(f.eval_vector(t, l)),
        _ => FieldValue::Scalar(f.eval_scalar(t, l)),
    }
}

/// Either a discrete field or a pointwise callable.
#[derive(Clone, Copy)]
pub enum Field<'a> {
    Fe(&'a FeFunction),
    Scalar(&'a dyn Fn(Point) -> f64),
    Vector(&'a dyn Fn(Point) -> [f64; 2]),
}

impl Field<'_> {
    fn components(&self) -> usize {
        match self {
            Field::Fe(f) => f.kind().components(),
            Field::Scalar(_) => 1,
            Field::Vector(_) => 2,
        }
    }

    fn mesh(&self) -> Option<&Arc<Mesh>> {
        match self {
            Field::Fe(f) => Some(f.dof_map().mesh()),
            _ => None,
        }
    }

    fn value(&self, t: usize, l: [f64; 3], x: Point) -> [f64; 2] {
        match self {
            Field::Fe(f) => match fe_eval(f, t, l) {
                FieldValue::Scalar(s) => [s, 0.0],
                FieldValue::Vector(v) => v,
            },
            Field::Scalar(g) => [g(x), 0.0],
            Field::Vector(g) => g(x),
        }
    }
}

/// `Σ_elements Σ_qp w·|J|·f·g` over `mesh` (dot product for vector fields).
pub fn discrete_l2_inner(mesh: &Mesh, f: Field<'_>, g: Field<'_>, rule: &QuadratureRule) -> Result<f64> {
    if f.components() != g.components() {
        return Err(Error::input("inner product of scalar and vector fields"));
    }
    for m in [f.mesh(), g.mesh()].into_iter().flatten() {
        if !std::ptr::eq(m.as_ref(), mesh) {
            return Err(Error::input("fields live on different meshes"));
        }
    }
    let mut sum = 0.0;
    for t in 0..mesh.element_count() {
        let geom = ElementGeometry::new(&mesh.corners(t), t)?;
        for (l, w) in rule.points().iter().zip(rule.weights()) {
            let x = geom.map(*l);
            let (a, b) = (f.value(t, *l, x), g.value(t, *l, x));
            sum += w * geom.det * (a[0] * b[0] + a[1] * b[1]);
        }
    }
    Ok(sum)
}

pub fn l2_norm(mesh: &Mesh, f: Field<'_>, rule: &QuadratureRule) -> Result<f64> {
    Ok(discrete_l2_inner(mesh, f, f, rule)?.max(0.0).sqrt())
}

/// `‖∇f‖²` by the given rule.
pub fn h1_seminorm_sq(f: &FeFunction, rule: &QuadratureRule) -> Result<f64> {
    let mesh = f.dof_map().mesh();
    let mut sum = 0.0;
    for t in 0..mesh.element_count() {
        let geom = ElementGeometry::new(&mesh.corners(t), t)?;
        for (l, w) in rule.points().iter().zip(rule.weights()) {
            let s = match f.kind() {
                SpaceKind::P2Vec => {
                    let g = f.eval_grad_vector(t, *l, &geom);
                    g.iter().flatten().map(|v| v * v).sum::<f64>()
                }
                _ => {
                    let g = f.eval_grad_scalar(t, *l, &geom);
                    g[0] * g[0] + g[1] * g[1]
                }
            };
            sum += w * geom.det * s;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{build_dof_map, quadrature_rule};
    use crate::mesh::{generate_rectangle_mesh, RectangleTags};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_square(n: usize) -> Arc<Mesh> {
        Arc::new(
            generate_rectangle_mesh(0.0, 0.0, 1.0, 1.0, n, n, &RectangleTags::uniform(1, "w"))
                .unwrap(),
        )
    }

    fn random_bary(rng: &mut impl Rng) -> [f64; 3] {
        let (mut a, mut b): (f64, f64) = (rng.gen(), rng.gen());
        if a + b > 1.0 {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        [1.0 - a - b, a, b]
    }

    #[test]
    fn interpolant_of_constant() {
        let m = unit_square(3);
        let f = FeFunction::interpolate_scalar(Arc::new(build_dof_map(&m, SpaceKind::P2)), |_| 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for t in 0..m.element_count() {
            let v = f.eval_scalar(t, random_bary(&mut rng));
            assert!((v - 3.0).abs() < 1e-14);
        }
        let z = FeFunction::zeros(Arc::new(build_dof_map(&m, SpaceKind::P2)));
        assert_eq!(fe_eval(&z, 0, [0.2, 0.3, 0.5]), FieldValue::Scalar(0.0));
    }

    #[test]
    fn p2_reproduces_quadratics() {
        let m = Arc::new(
            generate_rectangle_mesh(-1.0, -0.5, 2.0, 1.0, 5, 4, &RectangleTags::uniform(1, "w"))
                .unwrap(),
        );
        let quad = |p: Point| 0.3 - 1.2 * p[0] + 0.7 * p[1] + 2.0 * p[0] * p[0] - 0.4 * p[0] * p[1] + 1.5 * p[1] * p[1];
        let f = FeFunction::interpolate_scalar(Arc::new(build_dof_map(&m, SpaceKind::P2)), quad);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in 0..m.element_count() {
            let geom = ElementGeometry::new(&m.corners(t), t).unwrap();
            let l = random_bary(&mut rng);
            let x = geom.map(l);
            assert!((f.eval_scalar(t, l) - quad(x)).abs() < 1e-12);
        }
        let sq = FeFunction::interpolate_scalar(Arc::new(build_dof_map(&m, SpaceKind::P2)), |p| p[0] * p[0]);
        for t in 0..m.element_count() {
            let geom = ElementGeometry::new(&m.corners(t), t).unwrap();
            let l = random_bary(&mut rng);
            let x = geom.map(l);
            assert!((sq.eval_scalar(t, l) - x[0] * x[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn l2_norms() {
        let m = unit_square(4);
        let rule = quadrature_rule(9).unwrap();
        let one: &dyn Fn(Point) -> f64 = &|_| 1.0;
        assert!((discrete_l2_inner(&m, Field::Scalar(one), Field::Scalar(one), &rule).unwrap() - 1.0).abs() < 1e-14);
        let x = FeFunction::interpolate_scalar(Arc::new(build_dof_map(&m, SpaceKind::P2)), |p| p[0]);
        let n2 = discrete_l2_inner(&m, Field::Fe(&x), Field::Fe(&x), &rule).unwrap();
        assert!((n2 - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn inner_product_is_symmetric() {
        let m = unit_square(3);
        let d = Arc::new(build_dof_map(&m, SpaceKind::P2));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = FeFunction::new(d.clone(), (0..d.dof_count()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let b = FeFunction::new(d.clone(), (0..d.dof_count()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let rule = quadrature_rule(9).unwrap();
        let ab = discrete_l2_inner(&m, Field::Fe(&a), Field::Fe(&b), &rule).unwrap();
        let ba = discrete_l2_inner(&m, Field::Fe(&b), Field::Fe(&a), &rule).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn h1_seminorm_of_linear_field() {
        let m = unit_square(3);
        let f = FeFunction::interpolate_scalar(Arc::new(build_dof_map(&m, SpaceKind::P2)), |p| 2.0 * p[0] - p[1]);
        let s = h1_seminorm_sq(&f, &quadrature_rule(4).unwrap()).unwrap();
        assert!((s - 5.0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_length_is_checked() {
        let m = unit_square(1);
        let d = Arc::new(build_dof_map(&m, SpaceKind::P1));
        assert!(FeFunction::new(d, vec![0.0; 3]).is_err());
    }
}
