//! Gmsh MSH 2.2 ASCII subset: `$MeshFormat`, `$Nodes`, `$Elements` with
//! 2-node lines (type 1) and 3-node triangles (type 2). The first element
//! tag is the physical group id; line physical ids become boundary tags.
//! `$PhysicalNames` supplies tag names when present. Other sections are
//! skipped with a warning.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{signed_area, validate_mesh, BoundaryTag, Mesh, Point};
use crate::error::{Error, Result};

pub fn import_gmsh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let file = File::open(path)
        .map_err(|e| Error::Resource(format!("cannot open mesh file {}: {e}", path.display())))?;
    read_gmsh(BufReader::new(file))
}

pub fn read_gmsh(reader: impl Read) -> Result<Mesh> {
    let mut lines = BufReader::new(reader)
        .lines()
        .map(|l| l.map(|s| s.trim().to_string()));

    let mut saw_format = false;
    let mut nodes: Vec<(u64, Point)> = Vec::new();
    let mut triangles: Vec<[u64; 3]> = Vec::new();
    let mut segments: Vec<([u64; 2], i32)> = Vec::new();
    let mut names: BTreeMap<i32, String> = BTreeMap::new();

    while let Some(line) = lines.next() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let Some(section) = line.strip_prefix('$') else {
            return Err(Error::parse("(top level)", format!("unexpected line {line:?}")));
        };
        let section = section.to_string();
        let end = format!("$End{section}");
        let mut body = Vec::new();
        loop {
            match lines.next() {
                Some(l) => {
                    let l = l?;
                    if l == end {
                        break;
                    }
                    body.push(l);
                }
                None => return Err(Error::parse(&section, format!("missing {end}"))),
            }
        }
        match section.as_str() {
            "MeshFormat" => {
                parse_format(&body)?;
                saw_format = true;
            }
            "Nodes" => nodes = parse_nodes(&body)?,
            "Elements" => parse_elements(&body, &mut triangles, &mut segments)?,
            "PhysicalNames" => names = parse_names(&body)?,
            other => log::warn!("ignoring unsupported MSH section ${other}"),
        }
    }
    if !saw_format {
        return Err(Error::parse("MeshFormat", "section missing"));
    }
    if nodes.is_empty() {
        return Err(Error::parse("Nodes", "section missing or empty"));
    }
    if triangles.is_empty() {
        return Err(Error::parse("Elements", "no triangles found"));
    }

    let lookup: HashMap<u64, usize> = nodes.iter().enumerate().map(|(i, &(id, _))| (id, i)).collect();
    let resolve = |id: u64| {
        lookup
            .get(&id)
            .copied()
            .ok_or_else(|| Error::Integrity(format!("element references undefined node {id}")))
    };

    // Keep only nodes that triangles use, in file order.
    let mut remap = vec![usize::MAX; nodes.len()];
    for t in &triangles {
        for &id in t {
            remap[resolve(id)?] = 0;
        }
    }
    let mut vertices = Vec::new();
    for (i, slot) in remap.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = vertices.len();
            vertices.push(nodes[i].1);
        }
    }

    let mut tris = Vec::with_capacity(triangles.len());
    for t in &triangles {
        let mut v = [0usize; 3];
        for k in 0..3 {
            v[k] = remap[resolve(t[k])?];
        }
        let c = [vertices[v[0]], vertices[v[1]], vertices[v[2]]];
        if signed_area(&c) < 0.0 {
            v.swap(1, 2);
        }
        tris.push(v);
    }

    let mut segs = Vec::with_capacity(segments.len());
    for (s, tag) in &segments {
        let a = resolve(s[0])?;
        let b = resolve(s[1])?;
        if remap[a] == usize::MAX || remap[b] == usize::MAX {
            return Err(Error::Integrity(format!(
                "boundary line ({}, {}) touches a node not used by any triangle",
                s[0], s[1]
            )));
        }
        segs.push(([remap[a], remap[b]], *tag));
    }

    let mut tag_ids: Vec<i32> = segs.iter().map(|s| s.1).collect();
    tag_ids.sort_unstable();
    tag_ids.dedup();
    let tags = tag_ids
        .into_iter()
        .map(|id| {
            let name = names.get(&id).cloned().unwrap_or_else(|| format!("tag{id}"));
            BoundaryTag::new(id, name)
        })
        .collect();

    let mesh = Mesh::new(vertices, tris, segs, tags)?;
    let report = validate_mesh(&mesh);
    if !report.is_valid() {
        return Err(Error::Integrity(format!("imported mesh is invalid:\n{report}")));
    }
    Ok(mesh)
}

fn parse_format(body: &[String]) -> Result<()> {
    let first = body
        .first()
        .ok_or_else(|| Error::parse("MeshFormat", "empty section"))?;
    let fields: Vec<&str> = first.split_whitespace().collect();
    if fields.len() < 3 {
        return Err(Error::parse("MeshFormat", format!("malformed header {first:?}")));
    }
    if fields[0] != "2.2" {
        return Err(Error::parse(
            "MeshFormat",
            format!("unsupported version {} (only 2.2 is supported)", fields[0]),
        ));
    }
    if fields[1] != "0" {
        return Err(Error::parse("MeshFormat", "binary files are not supported"));
    }
    Ok(())
}

fn parse_nodes(body: &[String]) -> Result<Vec<(u64, Point)>> {
    let count: usize = parse_field("Nodes", body.first().map(String::as_str))?;
    if body.len() != count + 1 {
        return Err(Error::parse(
            "Nodes",
            format!("declared {count} nodes but found {}", body.len() - 1),
        ));
    }
    body[1..]
        .iter()
        .map(|l| {
            let mut f = l.split_whitespace();
            let id: u64 = parse_field("Nodes", f.next())?;
            let x: f64 = parse_field("Nodes", f.next())?;
            let y: f64 = parse_field("Nodes", f.next())?;
            Ok((id, [x, y]))
        })
        .collect()
}

fn parse_elements(
    body: &[String],
    triangles: &mut Vec<[u64; 3]>,
    segments: &mut Vec<([u64; 2], i32)>,
) -> Result<()> {
    let count: usize = parse_field("Elements", body.first().map(String::as_str))?;
    if body.len() != count + 1 {
        return Err(Error::parse(
            "Elements",
            format!("declared {count} elements but found {}", body.len() - 1),
        ));
    }
    for l in &body[1..] {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() < 3 {
            return Err(Error::parse("Elements", format!("malformed element line {l:?}")));
        }
        let ty: u32 = parse_field("Elements", Some(f[1]))?;
        let ntags: usize = parse_field("Elements", Some(f[2]))?;
        let nodes_at = 3 + ntags;
        let expected = match ty {
            1 => 2,
            2 => 3,
            15 => continue,
            other => {
                return Err(Error::parse(
                    "Elements",
                    format!("unsupported element type {other} in line {l:?}"),
                ))
            }
        };
        if f.len() != nodes_at + expected {
            return Err(Error::parse("Elements", format!("wrong node count in line {l:?}")));
        }
        let physical: i32 = if ntags > 0 {
            parse_field("Elements", Some(f[3]))?
        } else {
            0
        };
        let ids: Vec<u64> = f[nodes_at..]
            .iter()
            .map(|s| parse_field("Elements", Some(s)))
            .collect::<Result<_>>()?;
        if ty == 1 {
            segments.push(([ids[0], ids[1]], physical));
        } else {
            triangles.push([ids[0], ids[1], ids[2]]);
        }
    }
    Ok(())
}

fn parse_names(body: &[String]) -> Result<BTreeMap<i32, String>> {
    let mut out = BTreeMap::new();
    for l in body.iter().skip(1) {
        let mut f = l.splitn(3, char::is_whitespace);
        let dim: u32 = parse_field("PhysicalNames", f.next())?;
        let id: i32 = parse_field("PhysicalNames", f.next())?;
        let name = f.next().unwrap_or("").trim().trim_matches('"').to_string();
        if dim == 1 {
            out.insert(id, name);
        }
    }
    Ok(out)
}

fn parse_field<T: std::str::FromStr>(section: &str, s: Option<&str>) -> Result<T> {
    let s = s.ok_or_else(|| Error::parse(section, "missing field"))?;
    s.parse()
        .map_err(|_| Error::parse(section, format!("cannot parse field {s:?}")))
}

/// Writes the mesh as MSH 2.2 ASCII. Triangles carry physical id 0.
pub fn write_gmsh(mesh: &Mesh, mut w: impl Write) -> Result<()> {
    writeln!(w, "$MeshFormat\n2.2 0 8\n$EndMeshFormat")?;
    writeln!(w, "$PhysicalNames\n{}", mesh.tags().len())?;
    for t in mesh.tags() {
        writeln!(w, "1 {} \"{}\"", t.id, t.name)?;
    }
    writeln!(w, "$EndPhysicalNames")?;
    writeln!(w, "$Nodes\n{}", mesh.vertex_count())?;
    for (i, p) in mesh.vertices().iter().enumerate() {
        writeln!(w, "{} {:?} {:?} 0", i + 1, p[0], p[1])?;
    }
    writeln!(w, "$EndNodes")?;
    let nb = mesh.boundary_edges().len();
    writeln!(w, "$Elements\n{}", nb + mesh.element_count())?;
    for (i, b) in mesh.boundary_edges().iter().enumerate() {
        let [a, c] = mesh.edges()[b.edge];
        writeln!(w, "{} 1 2 {} {} {} {}", i + 1, b.tag, b.tag, a + 1, c + 1)?;
    }
    for (i, t) in mesh.triangles().iter().enumerate() {
        writeln!(
            w,
            "{} 2 2 0 1 {} {} {}",
            nb + i + 1,
            t[0] + 1,
            t[1] + 1,
            t[2] + 1
        )?;
    }
    writeln!(w, "$EndElements")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_rectangle_mesh, RectangleTags};

    const MINIMAL: &str = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n$Elements\n4\n1 1 2 7 1 1 2\n2 1 2 7 1 2 3\n3 1 2 8 1 3 1\n4 2 2 0 1 1 2 3\n$EndElements\n";

    #[test]
    fn minimal_file() {
        let m = read_gmsh(MINIMAL.as_bytes()).unwrap();
        assert_eq!(m.element_count(), 1);
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.boundary_edges().len(), 3);
        let ids: Vec<i32> = m.tags().iter().map(|t| t.id).collect();
        assert_eq!(ids, vec![7, 8]);
    }

    #[test]
    fn quadrilateral_is_rejected() {
        let src = MINIMAL.replace("4 2 2 0 1 1 2 3", "4 3 2 0 1 1 2 3 3");
        let err = read_gmsh(src.as_bytes()).unwrap_err();
        match err {
            Error::Parse { section, message } => {
                assert_eq!(section, "Elements");
                assert!(message.contains("unsupported element type"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_version_names_section() {
        let src = MINIMAL.replace("2.2 0 8", "4.1 0 8");
        assert!(matches!(
            read_gmsh(src.as_bytes()).unwrap_err(),
            Error::Parse { ref section, .. } if section == "MeshFormat"
        ));
    }

    #[test]
    fn dangling_node_reference() {
        let src = MINIMAL.replace("4 2 2 0 1 1 2 3", "4 2 2 0 1 1 2 9");
        assert!(matches!(read_gmsh(src.as_bytes()).unwrap_err(), Error::Integrity(_)));
    }

    #[test]
    fn clockwise_triangles_are_reoriented() {
        let src = MINIMAL.replace("4 2 2 0 1 1 2 3", "4 2 2 0 1 1 3 2");
        let m = read_gmsh(src.as_bytes()).unwrap();
        assert!(m.signed_area(0) > 0.0);
    }

    #[test]
    fn unknown_sections_are_skipped() {
        let src = format!("{MINIMAL}$Comments\nhello\n$EndComments\n");
        assert!(read_gmsh(src.as_bytes()).is_ok());
    }

    #[test]
    fn rectangle_round_trip() {
        let tags = RectangleTags {
            bottom: BoundaryTag::new(1, "wall"),
            right: BoundaryTag::new(3, "outflow"),
            top: BoundaryTag::new(1, "wall"),
            left: BoundaryTag::new(2, "inflow"),
        };
        let m = generate_rectangle_mesh(0.0, 0.0, 3.0, 1.0, 6, 4, &tags).unwrap();
        let mut buf = Vec::new();
        write_gmsh(&m, &mut buf).unwrap();
        let back = read_gmsh(buf.as_slice()).unwrap();
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.edges(), m.edges());
        assert_eq!(back.boundary_edges(), m.boundary_edges());
        assert_eq!(back.tags(), m.tags());
    }
}
