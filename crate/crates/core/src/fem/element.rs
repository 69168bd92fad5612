//! Lagrange P1/P2 reference elements and the affine element map.
//!
//! Local node order: vertices 0, 1, 2, then the midpoints of edges
//! (0,1), (1,2), (2,0). Points are given in barycentric coordinates
//! `(λ0, λ1, λ2)` with reference coordinates `x̂ = λ1`, `ŷ = λ2`.

use crate::error::{Error, Result};
use crate::mesh::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceElement {
    P1,
    P2,
}

/// Reference gradients of the barycentric coordinates.
const BARY_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// Endpoints of the local edges, in midpoint-node order.
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

impl ReferenceElement {
    pub fn node_count(self) -> usize {
        match self {
            ReferenceElement::P1 => 3,
            ReferenceElement::P2 => 6,
        }
    }

    pub fn node_positions(self) -> Vec<[f64; 3]> {
        let mut out = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        if self == ReferenceElement::P2 {
            out.extend([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]);
        }
        out
    }
}

pub fn eval_basis(elem: ReferenceElement, l: [f64; 3]) -> Vec<f64> {
    match elem {
        ReferenceElement::P1 => l.to_vec(),
        ReferenceElement::P2 => p2_values(l).to_vec(),
    }
}

#[inline]
pub(crate) fn p2_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

/// Gradients with respect to the reference coordinates `(x̂, ŷ)`.
pub fn reference_gradients(elem: ReferenceElement, l: [f64; 3]) -> Vec<[f64; 2]> {
    match elem {
        ReferenceElement::P1 => BARY_GRAD.to_vec(),
        ReferenceElement::P2 => p2_reference_gradients(l).to_vec(),
    }
}

#[inline]
pub(crate) fn p2_reference_gradients(l: [f64; 3]) -> [[f64; 2]; 6] {
    let g = BARY_GRAD;
    let mut out = [[0.0; 2]; 6];
    for i in 0..3 {
        let s = 4.0 * l[i] - 1.0;
        out[i] = [s * g[i][0], s * g[i][1]];
    }
    for (k, [i, j]) in LOCAL_EDGES.into_iter().enumerate() {
        out[3 + k] = [
            4.0 * (l[i] * g[j][0] + l[j] * g[i][0]),
            4.0 * (l[i] * g[j][1] + l[j] * g[i][1]),
        ];
    }
    out
}

/// Affine map from the reference triangle onto a physical element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub origin: Point,
    /// Columns are the edge vectors `p1 - p0` and `p2 - p0`.
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
    /// Inverse transpose of the Jacobian.
    pub inv_t: [[f64; 2]; 2],
}

impl ElementGeometry {
    /// `element` is only used to label the error.
    pub fn new(corners: &[Point; 3], element: usize) -> Result<Self> {
        let [p0, p1, p2] = *corners;
        let j = [[p1[0] - p0[0], p2[0] - p0[0]], [p1[1] - p0[1], p2[1] - p0[1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let scale = j.iter().flatten().map(|v| v * v).sum::<f64>();
        if !(det > 1e-14 * scale) || !det.is_finite() {
            return Err(Error::Geometry { element, det });
        }
        let inv_t = [
            [j[1][1] / det, -j[1][0] / det],
            [-j[0][1] / det, j[0][0] / det],
        ];
        Ok(Self {
            origin: p0,
            jacobian: j,
            det,
            inv_t,
        })
    }

    #[inline]
    pub fn map(&self, l: [f64; 3]) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * l[1] + j[0][1] * l[2],
            self.origin[1] + j[1][0] * l[1] + j[1][1] * l[2],
        ]
    }

    #[inline]
    pub fn push_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }
}

/// Physical gradients of the basis functions at a barycentric point.
pub fn eval_basis_grad(
    elem: ReferenceElement,
    l: [f64; 3],
    geometry: &ElementGeometry,
) -> Vec<[f64; 2]> {
    reference_gradients(elem, l)
        .into_iter()
        .map(|g| geometry.push_gradient(g))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bary(rng: &mut impl Rng) -> [f64; 3] {
        let (mut a, mut b): (f64, f64) = (rng.gen(), rng.gen());
        if a + b > 1.0 {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        [1.0 - a - b, a, b]
    }

    fn random_geometry(rng: &mut impl Rng) -> ElementGeometry {
        loop {
            let c: [Point; 3] = std::array::from_fn(|_| [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
            if let Ok(g) = ElementGeometry::new(&c, 0) {
                if g.det > 0.1 {
                    return g;
                }
            }
        }
    }

    #[test]
    fn kronecker_property() {
        for elem in [ReferenceElement::P1, ReferenceElement::P2] {
            for (i, node) in elem.node_positions().into_iter().enumerate() {
                let v = eval_basis(elem, node);
                for (j, &x) in v.iter().enumerate() {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((x - e).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for elem in [ReferenceElement::P1, ReferenceElement::P2] {
            for _ in 0..100 {
                let s: f64 = eval_basis(elem, random_bary(&mut rng)).iter().sum();
                assert!((s - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn p2_vertex_function_vanishes_on_opposite_edge() {
        let v = eval_basis(ReferenceElement::P2, [0.5, 0.0, 0.5]);
        assert_eq!(v[1], 0.0);
    }

    #[test]
    fn p1_gradient_on_reference_triangle() {
        let g = ElementGeometry::new(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], 0).unwrap();
        let grads = eval_basis_grad(ReferenceElement::P1, [1.0 / 3.0; 3], &g);
        assert_eq!(grads[0], [-1.0, -1.0]);
        assert_eq!(grads[1], [1.0, 0.0]);
        assert_eq!(grads[2], [0.0, 1.0]);
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-6;
        for _ in 0..20 {
            let geom = random_geometry(&mut rng);
            let l = random_bary(&mut rng);
            let x = geom.map(l);
            let corners = [geom.map([1.0, 0.0, 0.0]), geom.map([0.0, 1.0, 0.0]), geom.map([0.0, 0.0, 1.0])];
            let values_at = |p: Point| eval_basis(ReferenceElement::P2, crate::mesh::barycentric(&corners, p));
            let grads = eval_basis_grad(ReferenceElement::P2, l, &geom);
            for d in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[d] += h;
                xm[d] -= h;
                let (vp, vm) = (values_at(xp), values_at(xm));
                for i in 0..6 {
                    let fd = (vp[i] - vm[i]) / (2.0 * h);
                    let scale = grads[i][d].abs().max(1.0);
                    assert!((fd - grads[i][d]).abs() <= 1e-6 * scale, "{fd} vs {}", grads[i][d]);
                }
            }
        }
    }

    #[test]
    fn gradients_of_constant_sum_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let geom = random_geometry(&mut rng);
        for elem in [ReferenceElement::P1, ReferenceElement::P2] {
            let grads = eval_basis_grad(elem, random_bary(&mut rng), &geom);
            let s = grads.iter().fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
            assert!(s[0].abs() < 1e-12 && s[1].abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_element_is_rejected() {
        let err = ElementGeometry::new(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], 5).unwrap_err();
        assert!(matches!(err, Error::Geometry { element: 5, .. }));
    }
}
