use std::collections::BTreeMap;

use super::tree::{size_at, ElemState, HierMesh, NodeId, LMAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HangingKind {
    /// Midpoint of a coarse element's edge; two masters.
    Edge,
    /// Center of a coarse element's face (3D only); four masters.
    Face,
}

/// A node whose value is interpolated from the corners of the coarser
/// edge or face it lies on.
#[derive(Debug, Clone, PartialEq)]
pub struct HangingConstraint {
    pub hanging_node: NodeId,
    pub masters: Vec<NodeId>,
    pub weights: Vec<f64>,
    pub kind: HangingKind,
}

/// Corner pairs `(c, c + 2^axis)` forming the element edges, with the axis.
pub(crate) fn element_edges(dim: usize) -> Vec<(usize, usize, usize)> {
    let mut edges = Vec::new();
    for axis in 0..dim {
        for c in 0..1usize << dim {
            if c & (1 << axis) == 0 {
                edges.push((c, c | (1 << axis), axis));
            }
        }
    }
    edges
}

/// Faces of a hexahedron: corners in tangent-lexicographic order plus the
/// two tangent axes.
pub(crate) fn element_faces_3d() -> Vec<([usize; 4], [usize; 2])> {
    let mut faces = Vec::new();
    for normal in 0..3 {
        let t: Vec<usize> = (0..3).filter(|&a| a != normal).collect();
        for side in 0..2 {
            let mut corners = [0; 4];
            for (k, c) in corners.iter_mut().enumerate() {
                *c = (side << normal) | ((k & 1) << t[0]) | (((k >> 1) & 1) << t[1]);
            }
            faces.push((corners, [t[0], t[1]]));
        }
    }
    faces
}

/// Every hanging node of the mesh with its masters, sorted by node id.
///
/// A node is hanging when it is used by some active element and sits at the
/// midpoint of an edge, or the center of a face, of another active element.
/// Weights are the coarse element's Q1 basis values at the node.
pub fn hanging_constraints(mesh: &HierMesh) -> Vec<HangingConstraint> {
    let dim = mesh.dim();
    let used = mesh.active_node_mask();
    let edges = element_edges(dim);
    let faces = if dim == 3 { element_faces_3d() } else { Vec::new() };
    let mut found: BTreeMap<NodeId, HangingConstraint> = BTreeMap::new();
    let lookup_used = |key: [u64; 3]| mesh.node_by_key(&key).filter(|&n| used[n]);

    for e in 0..mesh.n_tree_elements() {
        if mesh.state(e) != ElemState::Active {
            continue;
        }
        let el = mesh.element(e);
        if el.level >= LMAX {
            continue;
        }
        let half = size_at(el.level + 1);
        for &(ca, cb, axis) in &edges {
            let (na, nb) = (el.nodes[ca], el.nodes[cb]);
            let ka = mesh.node_key(na);
            let mut km = ka;
            km[axis] += half;
            if let Some(m) = lookup_used(km) {
                found.entry(m).or_insert_with(|| {
                    let l = mesh.axis_ratio(axis, ka[axis], km[axis], ka[axis] + 2 * half);
                    HangingConstraint {
                        hanging_node: m,
                        masters: vec![na, nb],
                        weights: vec![1.0 - l, l],
                        kind: HangingKind::Edge,
                    }
                });
            }
        }
        for (corners, [t0, t1]) in &faces {
            let k0 = mesh.node_key(el.nodes[corners[0]]);
            let mut km = k0;
            km[*t0] += half;
            km[*t1] += half;
            if let Some(m) = lookup_used(km) {
                found.entry(m).or_insert_with(|| {
                    let l0 = mesh.axis_ratio(*t0, k0[*t0], km[*t0], k0[*t0] + 2 * half);
                    let l1 = mesh.axis_ratio(*t1, k0[*t1], km[*t1], k0[*t1] + 2 * half);
                    HangingConstraint {
                        hanging_node: m,
                        masters: corners.iter().map(|&c| el.nodes[c]).collect(),
                        weights: vec![
                            (1.0 - l0) * (1.0 - l1),
                            l0 * (1.0 - l1),
                            (1.0 - l0) * l1,
                            l0 * l1,
                        ],
                        kind: HangingKind::Face,
                    }
                });
            }
        }
    }
    found.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build::unit_box;

    #[test]
    fn uniform_has_none() {
        assert!(hanging_constraints(&unit_box(3).uniform_refine_n(2)).is_empty());
    }

    #[test]
    fn edge_and_face_counts() {
        assert_eq!(element_edges(2).len(), 4);
        assert_eq!(element_edges(3).len(), 12);
        assert_eq!(element_faces_3d().len(), 6);
    }

    #[test]
    fn square_one_refined_child() {
        let m = unit_box(2).uniform_refine();
        let m = m.refine(&[m.active_elements()[0]]);
        assert_eq!(m.n_active(), 7);
        let h = hanging_constraints(&m);
        assert_eq!(h.len(), 2);
        for c in &h {
            assert_eq!(c.weights, vec![0.5, 0.5]);
            assert_eq!(c.kind, HangingKind::Edge);
        }
    }

    #[test]
    fn cube_face_center_weights() {
        let m = unit_box(3).uniform_refine();
        let m = m.refine(&[m.active_elements()[0]]);
        let h = hanging_constraints(&m);
        let faces: Vec<_> = h.iter().filter(|c| c.kind == HangingKind::Face).collect();
        let edges: Vec<_> = h.iter().filter(|c| c.kind == HangingKind::Edge).collect();
        assert_eq!(faces.len(), 3);
        assert_eq!(edges.len(), 9);
        for c in faces {
            assert_eq!(c.weights, vec![0.25; 4]);
        }
        for c in edges {
            assert_eq!(c.weights, vec![0.5; 2]);
        }
    }
}
