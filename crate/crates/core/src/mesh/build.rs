//! Mesh constructors.

use super::tree::{AxisMap, HierMesh};
use crate::error::{Error, Result};

const UNIT: AxisMap = AxisMap::Uniform { lo: 0.0, hi: 1.0 };

/// A single unit square or unit cube element.
pub fn unit_box(dim: usize) -> HierMesh {
    HierMesh::from_roots(dim, [1, 1, 1], [UNIT; 3]).expect("unit box is valid")
}

/// Unit square/cube refined uniformly `level` times: `(2^level + 1)^dim` nodes.
pub fn uniform_unit_box(dim: usize, level: usize) -> HierMesh {
    unit_box(dim).uniform_refine_n(level)
}

/// Axis-aligned box `[lo, hi]` split into `roots` unrefined cells.
pub fn box_mesh(dim: usize, roots: [usize; 3], lo: [f64; 3], hi: [f64; 3]) -> Result<HierMesh> {
    let mut maps = [UNIT; 3];
    for a in 0..dim {
        maps[a] = AxisMap::Uniform { lo: lo[a], hi: hi[a] };
    }
    HierMesh::from_roots(dim, roots, maps)
}

/// Splits the cell counts into a root grid and a uniform refinement depth:
/// the depth is the largest `k` with `2^k` dividing every count.
pub fn graded_roots(n: [usize; 3]) -> ([usize; 3], usize) {
    let k = n.iter().map(|c| c.trailing_zeros()).min().unwrap_or(0) as usize;
    ([n[0] >> k, n[1] >> k, n[2] >> k], k)
}

/// Hexahedral mesh of `(0,1) × (0,1) × (0,2)` with cosine-graded points in
/// every direction, clustered toward all walls.
///
/// Along x, `x_i = ½(1 - cos(iπ/N_x))`, the ascending reordering of
/// `½(1 + cos(iπ/N_x))`; y likewise. Along z, `z_k = 1 + sin((2k - N_z)π/(2N_z))`,
/// which equals `1 - cos(kπ/N_z)` and spans `[0, 2]`.
///
/// The mesh is built as a coarse root grid refined uniformly, so global
/// coarsening can recover a multigrid hierarchy from it.
pub fn graded_tensor_mesh(nx: usize, ny: usize, nz: usize) -> Result<HierMesh> {
    if nx < 2 || ny < 2 || nz < 2 {
        return Err(Error::InvalidMesh(format!(
            "graded cavity mesh needs at least 2 cells per axis, got ({nx},{ny},{nz})"
        )));
    }
    let (roots, k) = graded_roots([nx, ny, nz]);
    let maps = [
        AxisMap::Cosine { lo: 0.0, hi: 1.0 },
        AxisMap::Cosine { lo: 0.0, hi: 1.0 },
        AxisMap::Cosine { lo: 0.0, hi: 2.0 },
    ];
    Ok(HierMesh::from_roots(3, roots, maps)?.uniform_refine_n(k))
}

/// Sorted distinct coordinates of the mesh nodes along `axis`.
pub fn axis_coordinates(mesh: &HierMesh, axis: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = mesh
        .active_nodes()
        .iter()
        .map(|&n| mesh.node_coords(n)[axis])
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_nx2_coordinates() {
        let m = graded_tensor_mesh(2, 2, 2).unwrap();
        let xs = axis_coordinates(&m, 0);
        assert_eq!(xs.len(), 3);
        assert_eq!(xs[0], 0.0);
        assert!((xs[1] - 0.5).abs() < 1e-15);
        assert_eq!(xs[2], 1.0);
        let zs = axis_coordinates(&m, 2);
        assert_eq!(zs[0], 0.0);
        assert_eq!(zs[2], 2.0);
    }

    #[test]
    fn graded_matches_closed_form() {
        let (nx, nz) = (8usize, 16usize);
        let m = graded_tensor_mesh(nx, nx, nz).unwrap();
        let xs = axis_coordinates(&m, 0);
        let zs = axis_coordinates(&m, 2);
        assert_eq!(xs.len(), nx + 1);
        assert_eq!(zs.len(), nz + 1);
        for (i, &x) in xs.iter().enumerate() {
            let raw = 0.5 * (1.0 + (((nx - i) as f64) * std::f64::consts::PI / nx as f64).cos());
            assert!((x - raw).abs() < 1e-14, "x_{i}");
        }
        for (k, &z) in zs.iter().enumerate() {
            let want = 1.0
                + ((2.0 * k as f64 - nz as f64) * std::f64::consts::PI / (2.0 * nz as f64)).sin();
            assert!((z - want).abs() < 1e-14, "z_{k}");
        }
    }

    #[test]
    fn graded_root_split() {
        assert_eq!(graded_roots([8, 8, 16]), ([1, 1, 2], 3));
        assert_eq!(graded_roots([32, 32, 64]), ([1, 1, 2], 5));
        assert_eq!(graded_roots([3, 4, 4]), ([3, 4, 4], 0));
    }

    #[test]
    fn level7_square_nodes() {
        assert_eq!(uniform_unit_box(2, 7).n_nodes(), 16641);
    }
}
