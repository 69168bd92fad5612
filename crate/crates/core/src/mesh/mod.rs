//! Conforming triangular meshes with tagged boundary edges.
//!
//! A [`Mesh`] is immutable once built. Edges are derived from the triangles
//! and numbered in lexicographic order of their (sorted) vertex pairs, which
//! is the order the P2 degree-of-freedom numbering relies on.

mod generate;
mod gmsh;

pub use generate::{generate_disk_mesh, generate_rectangle_mesh, RectangleTags};
pub use gmsh::{import_gmsh, read_gmsh, write_gmsh};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundaryTag {
    pub id: i32,
    pub name: String,
}

impl BoundaryTag {
    pub fn new(id: i32, name: impl Into<String>) -> Self {
        Self {
            id,
            name: name.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub edge: usize,
    pub tag: i32,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    /// Local edge `k` of a triangle joins local vertices `k` and `(k + 1) % 3`.
    triangle_edges: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    tags: Vec<BoundaryTag>,
}

impl Mesh {
    /// Builds the derived edge structures.
    ///
    /// Only index errors are rejected here; topological and orientation
    /// defects are left for [`validate_mesh`] to report.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_segments: Vec<([usize; 2], i32)>,
        tags: Vec<BoundaryTag>,
    ) -> Result<Self> {
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&v| v >= nv) {
                return Err(Error::Integrity(format!(
                    "triangle {t} references vertex {bad} but only {nv} vertices exist"
                )));
            }
        }

        let mut pairs: Vec<[usize; 2]> = triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| sorted_pair(t[k], t[(k + 1) % 3])))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let index: HashMap<[usize; 2], usize> =
            pairs.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        let triangle_edges = triangles
            .iter()
            .map(|t| {
                let mut out = [0; 3];
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot = index[&sorted_pair(t[k], t[(k + 1) % 3])];
                }
                out
            })
            .collect();

        let mut boundary_edges = Vec::with_capacity(boundary_segments.len());
        for (seg, tag) in boundary_segments {
            let key = sorted_pair(seg[0], seg[1]);
            let edge = *index.get(&key).ok_or_else(|| {
                Error::Integrity(format!(
                    "boundary segment ({}, {}) is not an edge of any triangle",
                    seg[0], seg[1]
                ))
            })?;
            boundary_edges.push(BoundaryEdge { edge, tag });
        }
        boundary_edges.sort_by_key(|b| (b.edge, b.tag));

        Ok(Self {
            vertices,
            triangles,
            edges: pairs,
            triangle_edges,
            boundary_edges,
            tags,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn tags(&self) -> &[BoundaryTag] {
        &self.tags
    }

    pub fn tag_by_name(&self, name: &str) -> Option<&BoundaryTag> {
        self.tags.iter().find(|t| t.name == name)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn element_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [
            self.vertices[tri[0]],
            self.vertices[tri[1]],
            self.vertices[tri[2]],
        ]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        signed_area(&self.corners(t))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.element_count()).map(|t| self.signed_area(t)).sum()
    }

    /// Mesh size: the largest circumcircle diameter over all elements.
    pub fn h(&self) -> f64 {
        (0..self.element_count())
            .map(|t| circumdiameter(&self.corners(t)))
            .fold(0.0, f64::max)
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
    }

    /// Finds an element containing `p` and its barycentric coordinates.
    /// Linear scan; intended for occasional probes, not hot loops.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        const SLACK: f64 = -1e-12;
        (0..self.element_count()).find_map(|t| {
            let l = barycentric(&self.corners(t), p);
            (l.iter().all(|&x| x >= SLACK)).then_some((t, l))
        })
    }
}

fn sorted_pair(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

pub fn signed_area(c: &[Point; 3]) -> f64 {
    0.5 * ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]))
}

pub fn circumdiameter(c: &[Point; 3]) -> f64 {
    let len = |p: Point, q: Point| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
    let (a, b, cc) = (len(c[1], c[2]), len(c[2], c[0]), len(c[0], c[1]));
    let area = signed_area(c).abs();
    if area == 0.0 {
        return f64::INFINITY;
    }
    a * b * cc / (2.0 * area)
}

pub fn barycentric(c: &[Point; 3], p: Point) -> [f64; 3] {
    let area = signed_area(c);
    let l1 = signed_area(&[c[0], p, c[2]]) / area;
    let l2 = signed_area(&[c[0], c[1], p]) / area;
    [1.0 - l1 - l2, l1, l2]
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveArea { triangle: usize, area: f64 },
    EdgeOvershared { edge: usize, triangles: usize },
    UntaggedBoundaryEdge { edge: usize },
    MultiplyTaggedEdge { edge: usize, tags: usize },
    TaggedInteriorEdge { edge: usize, triangles: usize },
    DuplicateTagId { id: i32 },
    UndeclaredTag { id: i32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveArea { triangle, area } => {
                write!(f, "orientation: triangle {triangle} has signed area {area:e}")
            }
            Violation::EdgeOvershared { edge, triangles } => {
                write!(f, "edge multiplicity: edge {edge} shared by {triangles} triangles")
            }
            Violation::UntaggedBoundaryEdge { edge } => {
                write!(f, "boundary edge {edge} carries no tag")
            }
            Violation::MultiplyTaggedEdge { edge, tags } => {
                write!(f, "boundary edge {edge} carries {tags} tags")
            }
            Violation::TaggedInteriorEdge { edge, triangles } => write!(
                f,
                "boundary multiplicity: tagged edge {edge} is shared by {triangles} triangles"
            ),
            Violation::DuplicateTagId { id } => write!(f, "tag id {id} declared more than once"),
            Violation::UndeclaredTag { id } => write!(f, "tag id {id} used but not declared"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "mesh valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_mesh(m: &Mesh) -> ValidationReport {
    let mut violations = Vec::new();

    for t in 0..m.element_count() {
        let area = m.signed_area(t);
        if area <= 0.0 || !area.is_finite() {
            violations.push(Violation::NonPositiveArea { triangle: t, area });
        }
    }

    let mut uses = vec![0usize; m.edge_count()];
    for te in &m.triangle_edges {
        for &e in te {
            uses[e] += 1;
        }
    }
    let mut tag_count = vec![0usize; m.edge_count()];
    for b in &m.boundary_edges {
        tag_count[b.edge] += 1;
    }
    for e in 0..m.edge_count() {
        match uses[e] {
            1 => match tag_count[e] {
                0 => violations.push(Violation::UntaggedBoundaryEdge { edge: e }),
                1 => {}
                n => violations.push(Violation::MultiplyTaggedEdge { edge: e, tags: n }),
            },
            2 => {
                if tag_count[e] > 0 {
                    violations.push(Violation::TaggedInteriorEdge {
                        edge: e,
                        triangles: 2,
                    });
                }
            }
            n => {
                violations.push(Violation::EdgeOvershared {
                    edge: e,
                    triangles: n,
                });
                if tag_count[e] > 0 {
                    violations.push(Violation::TaggedInteriorEdge {
                        edge: e,
                        triangles: n,
                    });
                }
            }
        }
    }

    let mut declared: BTreeMap<i32, usize> = BTreeMap::new();
    for t in &m.tags {
        *declared.entry(t.id).or_default() += 1;
    }
    for (&id, &n) in &declared {
        if n > 1 {
            violations.push(Violation::DuplicateTagId { id });
        }
    }
    let mut used: Vec<i32> = m.boundary_edges.iter().map(|b| b.tag).collect();
    used.sort_unstable();
    used.dedup();
    for id in used {
        if !declared.contains_key(&id) {
            violations.push(Violation::UndeclaredTag { id });
        }
    }

    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Mesh {
        generate_rectangle_mesh(0.0, 0.0, 1.0, 1.0, 2, 2, &RectangleTags::uniform(1, "wall"))
            .unwrap()
    }

    #[test]
    fn generated_square_is_valid() {
        assert!(validate_mesh(&unit_square()).is_valid());
    }

    #[test]
    fn clockwise_triangle_is_reported() {
        let m = unit_square();
        let mut tris = m.triangles().to_vec();
        tris[3].swap(1, 2);
        let segs = m
            .boundary_edges()
            .iter()
            .map(|b| (m.edges()[b.edge], b.tag))
            .collect();
        let bad = Mesh::new(m.vertices().to_vec(), tris, segs, m.tags().to_vec()).unwrap();
        let report = validate_mesh(&bad);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(
            report.violations[0],
            Violation::NonPositiveArea { triangle: 3, .. }
        ));
    }

    #[test]
    fn duplicated_triangle_is_reported() {
        let m = unit_square();
        let mut tris = m.triangles().to_vec();
        tris.push(tris[0]);
        let segs = m
            .boundary_edges()
            .iter()
            .map(|b| (m.edges()[b.edge], b.tag))
            .collect();
        let bad = Mesh::new(m.vertices().to_vec(), tris, segs, m.tags().to_vec()).unwrap();
        let report = validate_mesh(&bad);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::EdgeOvershared { .. })));
    }

    #[test]
    fn untagged_boundary_is_reported() {
        let m = unit_square();
        let segs: Vec<_> = m
            .boundary_edges()
            .iter()
            .skip(1)
            .map(|b| (m.edges()[b.edge], b.tag))
            .collect();
        let bad = Mesh::new(
            m.vertices().to_vec(),
            m.triangles().to_vec(),
            segs,
            m.tags().to_vec(),
        )
        .unwrap();
        let report = validate_mesh(&bad);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(
            report.violations[0],
            Violation::UntaggedBoundaryEdge { .. }
        ));
    }

    #[test]
    fn out_of_range_vertex_is_rejected() {
        let err = Mesh::new(vec![[0.0, 0.0]; 2], vec![[0, 1, 2]], vec![], vec![]).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
    }

    #[test]
    fn locate_finds_interior_point() {
        let m = unit_square();
        let (t, l) = m.locate([0.3, 0.6]).unwrap();
        let c = m.corners(t);
        let x = l[0] * c[0][0] + l[1] * c[1][0] + l[2] * c[2][0];
        let y = l[0] * c[0][1] + l[1] * c[1][1] + l[2] * c[2][1];
        assert!((x - 0.3).abs() < 1e-14 && (y - 0.6).abs() < 1e-14);
    }

    #[test]
    fn circumdiameter_of_right_triangle_is_hypotenuse() {
        let d = circumdiameter(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }
}
