//! Legacy ASCII VTK output of vertex fields on a triangle mesh.

use std::io::{self, Write};

use biharm::mesh::Mesh;

/// Writes `mesh` as an unstructured grid of triangles (cell type 5) with one
/// `POINT_DATA` scalar per named field. Fields are indexed by vertex; extra
/// entries (P2 edge dofs) are ignored.
pub fn write_vtk<W: Write>(mut w: W, mesh: &Mesh, title: &str, fields: &[(&str, &[f64])]) -> io::Result<()> {
    let nv = mesh.vertices().len();
    let nt = mesh.triangles().len();
    writeln!(w, "# vtk DataFile Version 2.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {nv} double")?;
    for p in mesh.vertices() {
        writeln!(w, "{:?} {:?} 0.0", p[0], p[1])?;
    }
    writeln!(w, "CELLS {nt} {}", 4 * nt)?;
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "5")?;
    }
    writeln!(w, "POINT_DATA {nv}")?;
    for (name, values) in fields {
        assert!(values.len() >= nv, "field {name} has fewer values than vertices");
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in &values[..nv] {
            writeln!(w, "{v:?}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use biharm::mesh::unit_square_mesh;

    #[test]
    fn layout() {
        let mesh = unit_square_mesh(1).unwrap();
        let mut out = Vec::new();
        write_vtk(&mut out, &mesh, "t", &[("a", &[1.0, 2.0, 3.0, 4.0])]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 2.0");
        assert_eq!(lines[4], "POINTS 4 double");
        assert_eq!(lines[9], "CELLS 2 8");
        assert_eq!(lines[12], "CELL_TYPES 2");
        assert_eq!(lines[15], "POINT_DATA 4");
        assert_eq!(lines[16], "SCALARS a double 1");
        assert_eq!(lines.len(), 22);
    }
}
