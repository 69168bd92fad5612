use std::f64::consts::PI;

use super::{BoundaryTag, Mesh, Point};
use crate::error::{Error, Result};

/// Boundary tag for each side of an axis-aligned rectangle. Sides may share
/// a tag.
#[derive(Debug, Clone)]
pub struct RectangleTags {
    pub bottom: BoundaryTag,
    pub right: BoundaryTag,
    pub top: BoundaryTag,
    pub left: BoundaryTag,
}

impl RectangleTags {
    pub fn uniform(id: i32, name: &str) -> Self {
        let t = BoundaryTag::new(id, name);
        Self {
            bottom: t.clone(),
            right: t.clone(),
            top: t.clone(),
            left: t,
        }
    }

    fn declared(&self) -> Result<Vec<BoundaryTag>> {
        let mut out: Vec<BoundaryTag> = Vec::new();
        for t in [&self.bottom, &self.right, &self.top, &self.left] {
            match out.iter().find(|o| o.id == t.id) {
                Some(o) if o.name != t.name => {
                    return Err(Error::input(format!(
                        "tag id {} used with names {:?} and {:?}",
                        t.id, o.name, t.name
                    )))
                }
                Some(_) => {}
                None => out.push(t.clone()),
            }
        }
        out.sort_by_key(|t| t.id);
        Ok(out)
    }
}

/// Structured triangulation of `[x0,x1]×[y0,y1]` with `nx×ny` cells, each
/// split along a diagonal whose direction alternates in a checkerboard.
pub fn generate_rectangle_mesh(
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    nx: usize,
    ny: usize,
    tags: &RectangleTags,
) -> Result<Mesh> {
    if !(x0 < x1 && y0 < y1) || ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
        return Err(Error::input(format!(
            "rectangle extents must satisfy x0<x1, y0<y1 (got [{x0},{x1}]x[{y0},{y1}])"
        )));
    }
    if nx == 0 || ny == 0 {
        return Err(Error::input("rectangle cell counts must be at least 1"));
    }
    let declared = tags.declared()?;

    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        // Pin the last row/column to the exact extent.
        let y = if j == ny {
            y1
        } else {
            y0 + (y1 - y0) * j as f64 / ny as f64
        };
        for i in 0..=nx {
            let x = if i == nx {
                x1
            } else {
                x0 + (x1 - x0) * i as f64 / nx as f64
            };
            vertices.push([x, y]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }

    let mut segments = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        segments.push(([id(i, 0), id(i + 1, 0)], tags.bottom.id));
        segments.push(([id(i + 1, ny), id(i, ny)], tags.top.id));
    }
    for j in 0..ny {
        segments.push(([id(nx, j), id(nx, j + 1)], tags.right.id));
        segments.push(([id(0, j + 1), id(0, j)], tags.left.id));
    }

    Mesh::new(vertices, triangles, segments, declared)
}

/// Polar-structured triangulation of the disk of the given radius centred at
/// the origin.
///
/// Ring `k` (of `n_rings`) sits at radius `k/n_rings·radius` and carries
/// `round(n_sectors·k/n_rings)` vertices (at least 3); the outermost ring has
/// exactly `n_sectors`. The innermost ring is fanned to the centre and
/// neighbouring rings are zipped together by angle. The boundary is tagged
/// `1 "wall"`.
pub fn generate_disk_mesh(radius: f64, n_rings: usize, n_sectors: usize) -> Result<Mesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::input(format!("disk radius must be positive, got {radius}")));
    }
    if n_rings < 1 || n_sectors < 3 {
        return Err(Error::input(format!(
            "disk mesh needs n_rings >= 1 and n_sectors >= 3 (got {n_rings}, {n_sectors})"
        )));
    }

    let ring_size = |k: usize| -> usize {
        if k == n_rings {
            n_sectors
        } else {
            ((n_sectors * k) as f64 / n_rings as f64).round().max(3.0) as usize
        }
    };

    let mut vertices: Vec<Point> = vec![[0.0, 0.0]];
    let mut ring_start = Vec::with_capacity(n_rings + 1);
    ring_start.push(0);
    for k in 1..=n_rings {
        ring_start.push(vertices.len());
        let r = radius * k as f64 / n_rings as f64;
        let n = ring_size(k);
        for i in 0..n {
            let theta = 2.0 * PI * i as f64 / n as f64;
            vertices.push([r * theta.cos(), r * theta.sin()]);
        }
    }

    let mut triangles = Vec::new();
    let n1 = ring_size(1);
    for i in 0..n1 {
        triangles.push([0, ring_start[1] + i, ring_start[1] + (i + 1) % n1]);
    }
    for k in 1..n_rings {
        let (a, b) = (ring_size(k), ring_size(k + 1));
        let (si, so) = (ring_start[k], ring_start[k + 1]);
        let (mut i, mut j) = (0usize, 0usize);
        while i < a || j < b {
            let next_in = (i + 1) as f64 / a as f64;
            let next_out = (j + 1) as f64 / b as f64;
            let advance_outer = j < b && (i == a || next_out <= next_in);
            if advance_outer {
                triangles.push([si + i % a, so + j % b, so + (j + 1) % b]);
                j += 1;
            } else {
                triangles.push([si + i % a, so + j % b, si + (i + 1) % a]);
                i += 1;
            }
        }
    }

    let outer = ring_start[n_rings];
    let segments = (0..n_sectors)
        .map(|i| ([outer + i, outer + (i + 1) % n_sectors], 1))
        .collect();

    Mesh::new(
        vertices,
        triangles,
        segments,
        vec![BoundaryTag::new(1, "wall")],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate_mesh;

    fn square(nx: usize, ny: usize) -> Mesh {
        generate_rectangle_mesh(0.0, 0.0, 1.0, 1.0, nx, ny, &RectangleTags::uniform(1, "wall"))
            .unwrap()
    }

    #[test]
    fn smallest_rectangle() {
        let m = square(1, 1);
        assert_eq!(m.vertex_count(), 4);
        assert_eq!(m.element_count(), 2);
        assert_eq!(m.boundary_edges().len(), 4);
        assert_eq!(m.edge_count(), 5);
    }

    #[test]
    fn two_by_two_rectangle() {
        let m = square(2, 2);
        assert_eq!(m.vertex_count(), 9);
        assert_eq!(m.element_count(), 8);
        assert_eq!(m.boundary_edges().len(), 8);
    }

    #[test]
    fn rectangle_area_and_validity() {
        for &(nx, ny) in &[(1, 1), (3, 5), (16, 7), (64, 64)] {
            let m = generate_rectangle_mesh(-1.0, -0.5, 2.0, 1.5, nx, ny, &RectangleTags::uniform(3, "w"))
                .unwrap();
            let area = m.total_area();
            assert!((area - 6.0).abs() <= 1e-14 * 6.0, "area {area}");
            assert!(validate_mesh(&m).is_valid());
        }
    }

    #[test]
    fn rectangle_refinement_quadruples_triangles() {
        for n in 1..6 {
            assert_eq!(square(2 * n, 2 * n).element_count(), 4 * square(n, n).element_count());
        }
    }

    #[test]
    fn rectangle_side_tags() {
        let tags = RectangleTags {
            bottom: BoundaryTag::new(1, "bottom"),
            right: BoundaryTag::new(2, "right"),
            top: BoundaryTag::new(3, "top"),
            left: BoundaryTag::new(4, "left"),
        };
        let m = generate_rectangle_mesh(0.0, 0.0, 2.0, 1.0, 4, 3, &tags).unwrap();
        for b in m.boundary_edges() {
            let mid = m.edge_midpoint(b.edge);
            let expected = if mid[1] == 0.0 {
                1
            } else if mid[0] == 2.0 {
                2
            } else if mid[1] == 1.0 {
                3
            } else {
                4
            };
            assert_eq!(b.tag, expected);
        }
        assert_eq!(m.tags().len(), 4);
    }

    #[test]
    fn rectangle_rejects_bad_input() {
        let t = RectangleTags::uniform(1, "w");
        assert!(generate_rectangle_mesh(1.0, 0.0, 0.0, 1.0, 1, 1, &t).is_err());
        assert!(generate_rectangle_mesh(0.0, 0.0, 1.0, 1.0, 0, 1, &t).is_err());
        assert!(generate_rectangle_mesh(0.0, 0.0, 1.0, 1.0, 1, 0, &t).is_err());
    }

    #[test]
    fn smallest_disk_is_a_fan() {
        let m = generate_disk_mesh(1.0, 1, 4).unwrap();
        assert_eq!(m.element_count(), 4);
        assert!(m.triangles().iter().all(|t| t.contains(&0)));
        assert!(validate_mesh(&m).is_valid());
    }

    #[test]
    fn disk_boundary_on_circle_and_area() {
        for &(r, rings, sectors) in &[(1.0, 32, 128), (2.5, 5, 30), (1.0, 7, 13)] {
            let m = generate_disk_mesh(r, rings, sectors).unwrap();
            assert!(validate_mesh(&m).is_valid());
            for b in m.boundary_edges() {
                for &v in &m.edges()[b.edge] {
                    let p = m.vertices()[v];
                    assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - r).abs() <= 1e-12 * r);
                }
            }
            let n = sectors as f64;
            let polygon = 0.5 * n * r * r * (2.0 * PI / n).sin();
            let area = m.total_area();
            assert!((area - polygon).abs() <= 1e-14 * polygon, "{area} vs {polygon}");
        }
        let m = generate_disk_mesh(1.0, 32, 128).unwrap();
        assert!((m.total_area() - PI).abs() < 0.01 * PI);
    }

    #[test]
    fn disk_rejects_degenerate_counts() {
        assert!(generate_disk_mesh(1.0, 0, 8).is_err());
        assert!(generate_disk_mesh(1.0, 2, 2).is_err());
        assert!(generate_disk_mesh(0.0, 2, 8).is_err());
    }
}
