//! Legacy ASCII VTK unstructured-grid output.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fem::FeSpace;
use crate::linalg::BlockVector;

const QUAD: u8 = 9;
const HEXAHEDRON: u8 = 12;
/// Lexicographic corner order to VTK's counter-clockwise order.
const QUAD_ORDER: [usize; 4] = [0, 1, 3, 2];
const HEX_ORDER: [usize; 8] = [0, 1, 3, 2, 4, 5, 7, 6];

fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "field".into()
    } else {
        s
    }
}

/// The file contents. Reals use shortest round-trip formatting, so equal
/// inputs give byte-identical text.
pub fn vtk_string(space: &FeSpace, fields: &[(String, BlockVector)], title: &str) -> Result<String> {
    let topo = space.topology();
    let n = topo.n_nodes();
    for (name, f) in fields {
        if f.n_nodes() != n {
            return Err(Error::InvalidMesh(format!(
                "field `{name}` has {} nodes, mesh has {n}",
                f.n_nodes()
            )));
        }
    }
    let (order, cell_type): (&[usize], u8) = if topo.dim == 2 {
        (&QUAD_ORDER, QUAD)
    } else {
        (&HEX_ORDER, HEXAHEDRON)
    };
    let m = topo.n_elements();
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", title.lines().next().unwrap_or("mgfem"));
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {n} double");
    for x in &topo.coords {
        let _ = writeln!(s, "{:e} {:e} {:e}", x[0], x[1], x[2]);
    }
    let _ = writeln!(s, "CELLS {m} {}", m * (order.len() + 1));
    for nodes in &topo.elem_nodes {
        let _ = write!(s, "{}", order.len());
        for &k in order {
            let _ = write!(s, " {}", nodes[k]);
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {m}");
    for _ in 0..m {
        let _ = writeln!(s, "{cell_type}");
    }
    if fields.is_empty() {
        return Ok(s);
    }
    let _ = writeln!(s, "POINT_DATA {n}");
    for (name, f) in fields {
        let name = sanitize(name);
        match f.n_comp() {
            1 => {
                let _ = writeln!(s, "SCALARS {name} double 1");
                let _ = writeln!(s, "LOOKUP_TABLE default");
                for i in 0..n {
                    let _ = writeln!(s, "{:e}", f.get(i, 0));
                }
            }
            2 | 3 => {
                let _ = writeln!(s, "VECTORS {name} double");
                for i in 0..n {
                    let z = if f.n_comp() == 3 { f.get(i, 2) } else { 0.0 };
                    let _ = writeln!(s, "{:e} {:e} {:e}", f.get(i, 0), f.get(i, 1), z);
                }
            }
            nc => {
                for c in 0..nc {
                    let _ = writeln!(s, "SCALARS {name}_{c} double 1");
                    let _ = writeln!(s, "LOOKUP_TABLE default");
                    for i in 0..n {
                        let _ = writeln!(s, "{:e}", f.get(i, c));
                    }
                }
            }
        }
    }
    Ok(s)
}

pub fn write_vtk(space: &FeSpace, fields: &[(String, BlockVector)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = vtk_string(space, fields, "mgfem")?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
