use crate::fem::{Discretization, FeFunction, SpaceKind};
use crate::mesh::Point;
use crate::sparsela::{csr_from_triplets, CsrMatrix, TripletBuffer};

/// Pointwise weight for a mass form.
#[derive(Clone, Copy)]
pub enum MassWeight<'a> {
    Unit,
    Callable(&'a dyn Fn(Point) -> f64),
    /// `c·f²` for a scalar field `f`.
    Squared(&'a FeFunction, f64),
    /// Values at the quadrature points, element-major.
    Samples(&'a [f64]),
}

impl MassWeight<'_> {
    fn samples(&self, disc: &Discretization) -> Option<Vec<f64>> {
        match *self {
            MassWeight::Unit => None,
            MassWeight::Callable(f) => Some(disc.sample_scalar(f)),
            MassWeight::Squared(f, c) => Some(
                disc.scalar_values(f)
                    .into_iter()
                    .map(|v| c * v * v)
                    .collect(),
            ),
            MassWeight::Samples(s) => Some(s.to_vec()),
        }
    }
}

/// Interleaves a scalar operator into both velocity components.
pub(crate) fn push_vector(t: &mut TripletBuffer, i: usize, j: usize, v: f64) {
    t.push(2 * i, 2 * j, v);
    t.push(2 * i + 1, 2 * j + 1, v);
}

/// Runs `local` per element on scalar P2 nodes and scatters the 6×6 blocks.
pub(crate) fn scatter_p2<F>(disc: &Discretization, vector: bool, t: &mut TripletBuffer, mut local: F)
where
    F: FnMut(usize, &mut [[f64; 6]; 6]),
{
    let dm = disc.p2();
    for e in 0..disc.element_count() {
        let mut block = [[0.0; 6]; 6];
        local(e, &mut block);
        let nodes = dm.element_nodes(e);
        for i in 0..6 {
            for j in 0..6 {
                if vector {
                    push_vector(t, nodes[i], nodes[j], block[i][j]);
                } else {
                    t.push(nodes[i], nodes[j], block[i][j]);
                }
            }
        }
    }
}

pub fn assemble_mass(disc: &Discretization, kind: SpaceKind, weight: MassWeight<'_>) -> CsrMatrix {
    let w = weight.samples(disc);
    let nq = disc.nq();
    let weight_at = |e: usize, q: usize| w.as_ref().map_or(1.0, |w| w[e * nq + q]);
    match kind {
        SpaceKind::P1 => {
            let n = disc.p1().dof_count();
            let mut t = TripletBuffer::with_capacity(n, n, 9 * disc.element_count());
            for e in 0..disc.element_count() {
                let mut block = [[0.0; 3]; 3];
                for q in 0..nq {
                    let c = disc.jxw(e, q) * weight_at(e, q);
                    let phi = disc.phi1(q);
                    for i in 0..3 {
                        for j in 0..3 {
                            block[i][j] += c * phi[i] * phi[j];
                        }
                    }
                }
                let nodes = disc.p1().element_nodes(e);
                for i in 0..3 {
                    for j in 0..3 {
                        t.push(nodes[i], nodes[j], block[i][j]);
                    }
                }
            }
            csr_from_triplets(&t).expect("indices from the dof map")
        }
        SpaceKind::P2 | SpaceKind::P2Vec => {
            let vector = kind == SpaceKind::P2Vec;
            let n = if vector { disc.p2v().dof_count() } else { disc.p2().dof_count() };
            let per = if vector { 72 } else { 36 };
            let mut t = TripletBuffer::with_capacity(n, n, per * disc.element_count());
            scatter_p2(disc, vector, &mut t, |e, block| {
                for q in 0..nq {
                    let c = disc.jxw(e, q) * weight_at(e, q);
                    let phi = disc.phi2(q);
                    for i in 0..6 {
                        for j in 0..6 {
                            block[i][j] += c * phi[i] * phi[j];
                        }
                    }
                }
            });
            csr_from_triplets(&t).expect("indices from the dof map")
        }
    }
}

/// `(∇φ_j, ∇φ_i)` on P2 (scalar) or P2 vector fields.
pub fn assemble_stiffness(disc: &Discretization, kind: SpaceKind) -> CsrMatrix {
    let vector = match kind {
        SpaceKind::P2 => false,
        SpaceKind::P2Vec => true,
        SpaceKind::P1 => panic!("stiffness is assembled on P2 spaces"),
    };
    let n = if vector { disc.p2v().dof_count() } else { disc.p2().dof_count() };
    let mut t = TripletBuffer::with_capacity(n, n, if vector { 72 } else { 36 } * disc.element_count());
    scatter_p2(disc, vector, &mut t, |e, block| stiffness_block(disc, e, 1.0, block));
    csr_from_triplets(&t).expect("indices from the dof map")
}

pub(crate) fn stiffness_block(disc: &Discretization, e: usize, scale: f64, block: &mut [[f64; 6]; 6]) {
    for q in 0..disc.nq() {
        let c = scale * disc.jxw(e, q);
        let g = disc.p2_grads(e, q);
        for i in 0..6 {
            for j in 0..6 {
                block[i][j] += c * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    }
}

/// Divergence block `B_kj = (∇·φ_j, ψ_k)`: P1 rows, interleaved P2 vector
/// columns.
pub fn assemble_divergence(disc: &Discretization) -> CsrMatrix {
    let np = disc.p1().dof_count();
    let nv = disc.p2v().dof_count();
    let mut t = TripletBuffer::with_capacity(np, nv, 36 * disc.element_count());
    for e in 0..disc.element_count() {
        let mut block = [[[0.0; 2]; 6]; 3];
        for q in 0..disc.nq() {
            let w = disc.jxw(e, q);
            let psi = disc.phi1(q);
            let g = disc.p2_grads(e, q);
            for k in 0..3 {
                for j in 0..6 {
                    for c in 0..2 {
                        block[k][j][c] += w * psi[k] * g[j][c];
                    }
                }
            }
        }
        let pn = disc.p1().element_nodes(e);
        let vn = disc.p2().element_nodes(e);
        for k in 0..3 {
            for j in 0..6 {
                for c in 0..2 {
                    t.push(pn[k], 2 * vn[j] + c, block[k][j][c]);
                }
            }
        }
    }
    csr_from_triplets(&t).expect("indices from the dof map")
}

/// Skew transport form `(w·∇φ_j, φ_i) + ½(φ_j ∇·w, φ_i)` for a transporting
/// field sampled at quadrature points.
pub(crate) fn transport_block(
    disc: &Discretization,
    e: usize,
    flux: &[[f64; 2]],
    flux_div: &[f64],
    block: &mut [[f64; 6]; 6],
) {
    let nq = disc.nq();
    for q in 0..nq {
        let k = e * nq + q;
        let w = disc.jxw(e, q);
        let phi = disc.phi2(q);
        let g = disc.p2_grads(e, q);
        let b = flux[k];
        let hd = 0.5 * flux_div[k];
        for j in 0..6 {
            let adv = b[0] * g[j][0] + b[1] * g[j][1] + hd * phi[j];
            for i in 0..6 {
                block[i][j] += w * adv * phi[i];
            }
        }
    }
}

/// Transport operator `C(u)` on the scalar P2 space.
pub fn assemble_transport(disc: &Discretization, u: &FeFunction) -> CsrMatrix {
    let flux = disc.vector_values(u);
    let div: Vec<f64> = disc.vector_grads(u).iter().map(|g| g[0][0] + g[1][1]).collect();
    let n = disc.p2().dof_count();
    let mut t = TripletBuffer::with_capacity(n, n, 36 * disc.element_count());
    scatter_p2(disc, false, &mut t, |e, block| transport_block(disc, e, &flux, &div, block));
    csr_from_triplets(&t).expect("indices from the dof map")
}

/// Mass flux `ρu` and its divergence at quadrature points for
/// `ρ = λσ²`.
pub(crate) fn mass_flux(
    disc: &Discretization,
    lambda: f64,
    sigma: &FeFunction,
    u: &FeFunction,
) -> (Vec<f64>, Vec<[f64; 2]>, Vec<f64>) {
    let s = disc.scalar_values(sigma);
    let gs = disc.scalar_grads(sigma);
    let uv = disc.vector_values(u);
    let ug = disc.vector_grads(u);
    let n = s.len();
    let mut rho = Vec::with_capacity(n);
    let mut flux = Vec::with_capacity(n);
    let mut div = Vec::with_capacity(n);
    for k in 0..n {
        let r = lambda * s[k] * s[k];
        let gr = [2.0 * lambda * s[k] * gs[k][0], 2.0 * lambda * s[k] * gs[k][1]];
        rho.push(r);
        flux.push([r * uv[k][0], r * uv[k][1]]);
        div.push(gr[0] * uv[k][0] + gr[1] * uv[k][1] + r * (ug[k][0][0] + ug[k][1][1]));
    }
    (rho, flux, div)
}

/// Momentum convection `N(ρ, u)` on the scalar P2 space, `ρ = λσ²`.
pub fn assemble_momentum_convection(
    disc: &Discretization,
    lambda: f64,
    sigma: &FeFunction,
    u: &FeFunction,
) -> CsrMatrix {
    let (_, flux, div) = mass_flux(disc, lambda, sigma, u);
    let n = disc.p2().dof_count();
    let mut t = TripletBuffer::with_capacity(n, n, 36 * disc.element_count());
    scatter_p2(disc, false, &mut t, |e, block| transport_block(disc, e, &flux, &div, block));
    csr_from_triplets(&t).expect("indices from the dof map")
}

/// `(f, φ_i)` for a vector source sampled at quadrature points.
pub(crate) fn vector_load(disc: &Discretization, values: &[[f64; 2]], out: &mut [f64]) {
    let nq = disc.nq();
    for e in 0..disc.element_count() {
        let nodes = disc.p2().element_nodes(e);
        for q in 0..nq {
            let w = disc.jxw(e, q);
            let f = values[e * nq + q];
            let phi = disc.phi2(q);
            for i in 0..6 {
                out[2 * nodes[i]] += w * f[0] * phi[i];
                out[2 * nodes[i] + 1] += w * f[1] * phi[i];
            }
        }
    }
}

pub(crate) fn scalar_load(disc: &Discretization, values: &[f64], out: &mut [f64]) {
    let nq = disc.nq();
    for e in 0..disc.element_count() {
        let nodes = disc.p2().element_nodes(e);
        for q in 0..nq {
            let w = disc.jxw(e, q) * values[e * nq + q];
            let phi = disc.phi2(q);
            for i in 0..6 {
                out[nodes[i]] += w * phi[i];
            }
        }
    }
}
