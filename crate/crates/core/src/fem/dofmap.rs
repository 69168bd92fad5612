use std::collections::BTreeMap;
use std::sync::Arc;

use super::element::ReferenceElement;
use crate::mesh::{Mesh, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    P1,
    P2,
    /// Two-component P2 field, stored interleaved: component `c` of scalar
    /// node `s` is dof `2s + c`.
    P2Vec,
}

impl SpaceKind {
    pub fn element(self) -> ReferenceElement {
        match self {
            SpaceKind::P1 => ReferenceElement::P1,
            SpaceKind::P2 | SpaceKind::P2Vec => ReferenceElement::P2,
        }
    }

    pub fn components(self) -> usize {
        match self {
            SpaceKind::P2Vec => 2,
            _ => 1,
        }
    }
}

/// Global numbering: vertices first, then edges in the mesh's sorted edge
/// order.
#[derive(Debug, Clone)]
pub struct DofMap {
    kind: SpaceKind,
    mesh: Arc<Mesh>,
    node_count: usize,
    /// Scalar node indices per element, `nodes_per_element` at a time.
    element_nodes: Vec<usize>,
    node_coords: Vec<Point>,
    boundary: BTreeMap<i32, Vec<usize>>,
}

pub fn build_dof_map(mesh: &Arc<Mesh>, kind: SpaceKind) -> DofMap {
    let nv = mesh.vertex_count();
    let p2 = kind.element() == ReferenceElement::P2;
    let node_count = if p2 { nv + mesh.edge_count() } else { nv };

    let per = kind.element().node_count();
    let mut element_nodes = Vec::with_capacity(per * mesh.element_count());
    for (tri, edges) in mesh.triangles().iter().zip(mesh.triangle_edges()) {
        element_nodes.extend_from_slice(tri);
        if p2 {
            element_nodes.extend(edges.iter().map(|e| nv + e));
        }
    }

    let mut node_coords = mesh.vertices().to_vec();
    if p2 {
        node_coords.extend((0..mesh.edge_count()).map(|e| mesh.edge_midpoint(e)));
    }

    let comps = kind.components();
    let mut boundary: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for b in mesh.boundary_edges() {
        let set = boundary.entry(b.tag).or_default();
        let [a, c] = mesh.edges()[b.edge];
        let mut nodes = vec![a, c];
        if p2 {
            nodes.push(nv + b.edge);
        }
        for n in nodes {
            for k in 0..comps {
                set.push(comps * n + k);
            }
        }
    }
    for set in boundary.values_mut() {
        set.sort_unstable();
        set.dedup();
    }

    DofMap {
        kind,
        mesh: Arc::clone(mesh),
        node_count,
        element_nodes,
        node_coords,
        boundary,
    }
}

impl DofMap {
    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn dof_count(&self) -> usize {
        self.node_count * self.kind.components()
    }

    /// Number of scalar nodes (equals `dof_count` for scalar spaces).
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn nodes_per_element(&self) -> usize {
        self.kind.element().node_count()
    }

    pub fn element_nodes(&self, t: usize) -> &[usize] {
        let per = self.nodes_per_element();
        &self.element_nodes[per * t..per * (t + 1)]
    }

    /// Global dofs of element `t`: scalar nodes, or interleaved component
    /// dofs for vector spaces.
    pub fn element_dofs(&self, t: usize) -> Vec<usize> {
        let comps = self.kind.components();
        self.element_nodes(t)
            .iter()
            .flat_map(|&n| (0..comps).map(move |c| comps * n + c))
            .collect()
    }

    pub fn node_coords(&self) -> &[Point] {
        &self.node_coords
    }

    /// Boundary dofs grouped by tag (both components for vector spaces).
    pub fn boundary_dofs(&self) -> &BTreeMap<i32, Vec<usize>> {
        &self.boundary
    }

    pub fn boundary_dofs_for(&self, tag: i32) -> &[usize] {
        self.boundary.get(&tag).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Scalar node carrying dof `d`, and its component.
    pub fn node_of(&self, d: usize) -> (usize, usize) {
        let comps = self.kind.components();
        (d / comps, d % comps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_rectangle_mesh, Mesh, RectangleTags};

    fn square(n: usize) -> Arc<Mesh> {
        Arc::new(
            generate_rectangle_mesh(0.0, 0.0, 1.0, 1.0, n, n, &RectangleTags::uniform(1, "w"))
                .unwrap(),
        )
    }

    #[test]
    fn single_triangle_p2() {
        let m = Arc::new(
            Mesh::new(
                vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
                vec![[0, 1, 2]],
                vec![([0, 1], 1), ([1, 2], 1), ([2, 0], 1)],
                vec![crate::mesh::BoundaryTag::new(1, "w")],
            )
            .unwrap(),
        );
        assert_eq!(build_dof_map(&m, SpaceKind::P2).dof_count(), 6);
    }

    #[test]
    fn unit_square_counts() {
        let m = square(1);
        assert_eq!(build_dof_map(&m, SpaceKind::P1).dof_count(), 4);
        assert_eq!(build_dof_map(&m, SpaceKind::P2).dof_count(), 9);
        assert_eq!(build_dof_map(&m, SpaceKind::P2Vec).dof_count(), 18);
    }

    #[test]
    fn shared_nodes_agree_between_neighbours() {
        let m = square(3);
        let d = build_dof_map(&m, SpaceKind::P2);
        // Every node's coordinate must match the element's local node.
        for t in 0..m.element_count() {
            let c = m.corners(t);
            let mids = [
                [(c[0][0] + c[1][0]) / 2.0, (c[0][1] + c[1][1]) / 2.0],
                [(c[1][0] + c[2][0]) / 2.0, (c[1][1] + c[2][1]) / 2.0],
                [(c[2][0] + c[0][0]) / 2.0, (c[2][1] + c[0][1]) / 2.0],
            ];
            let nodes = d.element_nodes(t);
            for k in 0..3 {
                assert_eq!(d.node_coords()[nodes[k]], c[k]);
                assert_eq!(d.node_coords()[nodes[3 + k]], mids[k]);
            }
        }
    }

    #[test]
    fn boundary_sets_include_midpoints() {
        let m = square(2);
        let d = build_dof_map(&m, SpaceKind::P2);
        // 8 boundary vertices + 8 boundary edges.
        assert_eq!(d.boundary_dofs_for(1).len(), 16);
        let v = build_dof_map(&m, SpaceKind::P2Vec);
        assert_eq!(v.boundary_dofs_for(1).len(), 32);
        for &dof in d.boundary_dofs_for(1) {
            let p = d.node_coords()[dof];
            assert!(p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0);
        }
    }
}
