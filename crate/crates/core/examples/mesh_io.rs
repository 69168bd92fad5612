//! Mesh generation, validation and MSH 2.2 round trip.

use vdflow::cases::default_data_dir;
use vdflow::mesh::{generate_disk_mesh, generate_rectangle_mesh, import_gmsh, read_gmsh, validate_mesh, write_gmsh, Mesh, RectangleTags};

fn describe(label: &str, m: &Mesh) {
    let report = validate_mesh(m);
    let tags: Vec<String> = m.tags().iter().map(|t| format!("{}={}", t.id, t.name)).collect();
    println!(
        "{label:<12} {:>6} vertices {:>6} triangles  area {:.6}  h {:.4}  tags [{}]  valid {}",
        m.vertex_count(),
        m.element_count(),
        m.total_area(),
        m.h(),
        tags.join(", "),
        report.is_valid()
    );
}

fn main() -> vdflow::Result<()> {
    let square = generate_rectangle_mesh(-1.0, -1.0, 1.0, 1.0, 16, 16, &RectangleTags::uniform(1, "wall"))?;
    describe("square", &square);
    let disk = generate_disk_mesh(1.0, 16, 96)?;
    describe("disk", &disk);

    let mut bytes = Vec::new();
    write_gmsh(&disk, &mut bytes)?;
    let back = read_gmsh(bytes.as_slice())?;
    describe("disk (msh)", &back);

    let data = default_data_dir();
    for name in ["backstep.msh", "cylinder.msh"] {
        describe(name, &import_gmsh(data.join(name))?);
    }
    Ok(())
}
