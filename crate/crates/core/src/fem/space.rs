use std::sync::Arc;

use super::dofmap::{build_dof_map, DofMap, SpaceKind};
use super::element::{p2_reference_gradients, p2_values, ElementGeometry};
use super::function::FeFunction;
use super::quadrature::{quadrature_rule, QuadratureRule, ASSEMBLY_DEGREE};
use crate::error::Result;
use crate::mesh::{Mesh, Point};

/// A mesh with its Taylor–Hood spaces and a quadrature tabulation shared by
/// every assembled form and every discrete norm.
///
/// Quadrature-point arrays are laid out element-major: entry `t * nq + q`.
#[derive(Debug, Clone)]
pub struct Discretization {
    mesh: Arc<Mesh>,
    p1: Arc<DofMap>,
    p2: Arc<DofMap>,
    p2v: Arc<DofMap>,
    rule: QuadratureRule,
    geometry: Vec<ElementGeometry>,
    phi2: Vec<[f64; 6]>,
    dphi2_ref: Vec<[[f64; 2]; 6]>,
    phi1: Vec<[f64; 3]>,
    jxw: Vec<f64>,
    xq: Vec<Point>,
}

impl Discretization {
    pub fn new(mesh: Arc<Mesh>) -> Result<Self> {
        Self::with_degree(mesh, ASSEMBLY_DEGREE)
    }

    pub fn with_degree(mesh: Arc<Mesh>, degree: usize) -> Result<Self> {
        let rule = quadrature_rule(degree)?;
        let geometry = (0..mesh.element_count())
            .map(|t| ElementGeometry::new(&mesh.corners(t), t))
            .collect::<Result<Vec<_>>>()?;
        let phi2 = rule.points().iter().map(|&l| p2_values(l)).collect();
        let dphi2_ref = rule.points().iter().map(|&l| p2_reference_gradients(l)).collect();
        let phi1 = rule.points().to_vec();
        let mut jxw = Vec::with_capacity(geometry.len() * rule.len());
        let mut xq = Vec::with_capacity(geometry.len() * rule.len());
        for g in &geometry {
            for (l, w) in rule.points().iter().zip(rule.weights()) {
                jxw.push(w * g.det);
                xq.push(g.map(*l));
            }
        }
        Ok(Self {
            p1: Arc::new(build_dof_map(&mesh, SpaceKind::P1)),
            p2: Arc::new(build_dof_map(&mesh, SpaceKind::P2)),
            p2v: Arc::new(build_dof_map(&mesh, SpaceKind::P2Vec)),
            mesh,
            rule,
            geometry,
            phi2,
            dphi2_ref,
            phi1,
            jxw,
            xq,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    /// Pressure space (P1).
    pub fn p1(&self) -> &Arc<DofMap> {
        &self.p1
    }

    /// Density-root space (scalar P2).
    pub fn p2(&self) -> &Arc<DofMap> {
        &self.p2
    }

    /// Velocity space (vector P2).
    pub fn p2v(&self) -> &Arc<DofMap> {
        &self.p2v
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn nq(&self) -> usize {
        self.rule.len()
    }

    pub fn element_count(&self) -> usize {
        self.geometry.len()
    }

    pub fn geometry(&self, t: usize) -> &ElementGeometry {
        &self.geometry[t]
    }

    #[inline]
    pub fn jxw(&self, t: usize, q: usize) -> f64 {
        self.jxw[t * self.nq() + q]
    }

    #[inline]
    pub fn xq(&self, t: usize, q: usize) -> Point {
        self.xq[t * self.nq() + q]
    }

    pub fn quadrature_points(&self) -> &[Point] {
        &self.xq
    }

    #[inline]
    pub fn phi2(&self, q: usize) -> &[f64; 6] {
        &self.phi2[q]
    }

    #[inline]
    pub fn phi1(&self, q: usize) -> &[f64; 3] {
        &self.phi1[q]
    }

    #[inline]
    pub fn p2_grads(&self, t: usize, q: usize) -> [[f64; 2]; 6] {
        let g = &self.geometry[t];
        self.dphi2_ref[q].map(|r| g.push_gradient(r))
    }

    #[inline]
    pub fn p1_grads(&self, t: usize) -> [[f64; 2]; 3] {
        let g = &self.geometry[t];
        [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]].map(|r| g.push_gradient(r))
    }

    /// Values of a scalar P1 or P2 field at all quadrature points.
    pub fn scalar_values(&self, f: &FeFunction) -> Vec<f64> {
        let nq = self.nq();
        let c = f.coeffs();
        let dm = f.dof_map();
        let mut out = Vec::with_capacity(self.element_count() * nq);
        for t in 0..self.element_count() {
            let nodes = dm.element_nodes(t);
            for q in 0..nq {
                let v = match f.kind() {
                    SpaceKind::P1 => (0..3).map(|i| c[nodes[i]] * self.phi1[q][i]).sum(),
                    _ => (0..6).map(|i| c[nodes[i]] * self.phi2[q][i]).sum(),
                };
                out.push(v);
            }
        }
        out
    }

    /// Gradients of a scalar P2 field at all quadrature points.
    pub fn scalar_grads(&self, f: &FeFunction) -> Vec<[f64; 2]> {
        debug_assert_eq!(f.kind(), SpaceKind::P2);
        let nq = self.nq();
        let c = f.coeffs();
        let mut out = Vec::with_capacity(self.element_count() * nq);
        for t in 0..self.element_count() {
            let nodes = f.dof_map().element_nodes(t);
            for q in 0..nq {
                let g = self.p2_grads(t, q);
                let mut s = [0.0; 2];
                for i in 0..6 {
                    s[0] += c[nodes[i]] * g[i][0];
                    s[1] += c[nodes[i]] * g[i][1];
                }
                out.push(s);
            }
        }
        out
    }

    pub fn vector_values(&self, u: &FeFunction) -> Vec<[f64; 2]> {
        debug_assert_eq!(u.kind(), SpaceKind::P2Vec);
        let nq = self.nq();
        let c = u.coeffs();
        let mut out = Vec::with_capacity(self.element_count() * nq);
        for t in 0..self.element_count() {
            let nodes = u.dof_map().element_nodes(t);
            for q in 0..nq {
                let phi = &self.phi2[q];
                let mut v = [0.0; 2];
                for i in 0..6 {
                    v[0] += c[2 * nodes[i]] * phi[i];
                    v[1] += c[2 * nodes[i] + 1] * phi[i];
                }
                out.push(v);
            }
        }
        out
    }

    /// Jacobians `g[c][d] = ∂u_c/∂x_d` at all quadrature points.
    pub fn vector_grads(&self, u: &FeFunction) -> Vec<[[f64; 2]; 2]> {
        debug_assert_eq!(u.kind(), SpaceKind::P2Vec);
        let nq = self.nq();
        let c = u.coeffs();
        let mut out = Vec::with_capacity(self.element_count() * nq);
        for t in 0..self.element_count() {
            let nodes = u.dof_map().element_nodes(t);
            for q in 0..nq {
                let g = self.p2_grads(t, q);
                let mut j = [[0.0; 2]; 2];
                for i in 0..6 {
                    for k in 0..2 {
                        let a = c[2 * nodes[i] + k];
                        j[k][0] += a * g[i][0];
                        j[k][1] += a * g[i][1];
                    }
                }
                out.push(j);
            }
        }
        out
    }

    pub fn sample_scalar(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.xq.iter().map(|&x| f(x)).collect()
    }

    pub fn sample_vector(&self, f: impl Fn(Point) -> [f64; 2]) -> Vec<[f64; 2]> {
        self.xq.iter().map(|&x| f(x)).collect()
    }

    /// `Σ w·|J|·v` over quadrature-point values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.jxw.len());
        compensated_sum(self.jxw.iter().zip(values).map(|(w, v)| w * v))
    }

    pub fn inner_scalar(&self, a: &[f64], b: &[f64]) -> f64 {
        compensated_sum(self.jxw.iter().zip(a.iter().zip(b)).map(|(w, (x, y))| w * x * y))
    }

    pub fn inner_vector(&self, a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
        compensated_sum(
            self.jxw
                .iter()
                .zip(a.iter().zip(b))
                .map(|(w, (x, y))| w * (x[0] * y[0] + x[1] * y[1])),
        )
    }

    /// `∫ψ_k` for each pressure basis function.
    pub fn p1_integrals(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.p1.dof_count()];
        for t in 0..self.element_count() {
            let nodes = self.p1.element_nodes(t);
            for q in 0..self.nq() {
                let w = self.jxw(t, q);
                for i in 0..3 {
                    out[nodes[i]] += w * self.phi1[q][i];
                }
            }
        }
        out
    }

    /// Evaluation points for sampling fields: every quadrature point plus
    /// every P2 node, as `(element, barycentric)` pairs.
    pub fn sample_sites(&self) -> impl Iterator<Item = (usize, [f64; 3])> + '_ {
        let nodes = super::element::ReferenceElement::P2.node_positions();
        (0..self.element_count()).flat_map(move |t| {
            self.rule
                .points()
                .iter()
                .copied()
                .chain(nodes.clone())
                .map(move |l| (t, l))
        })
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}
