use super::tree::{ElemId, HierMesh, NodeId};

const NONE: usize = usize::MAX;

/// Compact numbering of the nodes and elements of one mesh view: the
/// degrees of freedom of a finite element space on it.
///
/// Local node `i` is the `i`-th smallest tree node id used by an active
/// element, so numbering is deterministic and nested views number shared
/// nodes in the same relative order.
#[derive(Debug, Clone)]
pub struct Topology {
    pub dim: usize,
    /// Active elements, ascending tree id.
    pub elements: Vec<ElemId>,
    /// Tree node id of each local node.
    pub nodes: Vec<NodeId>,
    /// Local corner indices of each active element.
    pub elem_nodes: Vec<[usize; 8]>,
    pub coords: Vec<[f64; 3]>,
    local: Vec<usize>,
}

impl Topology {
    pub fn new(mesh: &HierMesh) -> Self {
        let dim = mesh.dim();
        let nodes = mesh.active_nodes();
        let mut local = vec![NONE; mesh.n_tree_nodes()];
        for (i, &n) in nodes.iter().enumerate() {
            local[n] = i;
        }
        let elements = mesh.active_elements();
        let nc = 1 << dim;
        let elem_nodes = elements
            .iter()
            .map(|&e| {
                let mut l = [0; 8];
                for c in 0..nc {
                    l[c] = local[mesh.element(e).nodes[c]];
                }
                l
            })
            .collect();
        let coords = nodes.iter().map(|&n| mesh.node_coords(n)).collect();
        Self {
            dim,
            elements,
            nodes,
            elem_nodes,
            coords,
            local,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_corners(&self) -> usize {
        1 << self.dim
    }

    /// Local index of a tree node, if it belongs to this view.
    pub fn local(&self, n: NodeId) -> Option<usize> {
        match self.local.get(n) {
            Some(&l) if l != NONE => Some(l),
            _ => None,
        }
    }

    /// Corner coordinates of active element `k` (local element index).
    pub fn element_coords(&self, k: usize) -> [[f64; 3]; 8] {
        let mut x = [[0.0; 3]; 8];
        for c in 0..self.n_corners() {
            x[c] = self.coords[self.elem_nodes[k][c]];
        }
        x
    }
}
