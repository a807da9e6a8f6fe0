use crate::error::{Error, Result};
use crate::linalg::{BlockVector, CsrMatrix, TripletBuilder};
use crate::mesh::{hanging_constraints, HangingKind, HierMesh, Topology};

/// Hanging-node constraint in the local node numbering of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalConstraint {
    pub node: usize,
    pub masters: Vec<usize>,
    pub weights: Vec<f64>,
    pub kind: HangingKind,
}

/// Degree-1 nodal space with `n_comp` components on one mesh view.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: HierMesh,
    topo: Topology,
    n_comp: usize,
    constraints: Vec<LocalConstraint>,
    hanging: Vec<bool>,
    h: CsrMatrix,
    dirichlet_mask: Vec<bool>,
    dirichlet_idx: Vec<usize>,
    dirichlet_val: Vec<f64>,
}

impl FeSpace {
    /// Builds the space and its hanging-node matrix. Fails if a hanging
    /// node is the master of another, which a 2:1 balanced mesh rules out.
    pub fn new(mesh: &HierMesh, n_comp: usize) -> Result<Self> {
        if n_comp == 0 {
            return Err(Error::ComponentCount {
                op: "FeSpace::new",
                expected: 1,
                got: 0,
            });
        }
        let topo = Topology::new(mesh);
        let constraints: Vec<LocalConstraint> = hanging_constraints(mesh)
            .into_iter()
            .map(|c| LocalConstraint {
                node: topo.local(c.hanging_node).expect("hanging node is active"),
                masters: c
                    .masters
                    .iter()
                    .map(|&m| topo.local(m).expect("master is active"))
                    .collect(),
                weights: c.weights,
                kind: c.kind,
            })
            .collect();
        let mut hanging = vec![false; topo.n_nodes()];
        for c in &constraints {
            hanging[c.node] = true;
        }
        let h = hanging_matrix(topo.n_nodes(), &constraints, &hanging)?;
        let n = topo.n_nodes() * n_comp;
        Ok(Self {
            mesh: mesh.clone(),
            topo,
            n_comp,
            constraints,
            hanging,
            h,
            dirichlet_mask: vec![false; n],
            dirichlet_idx: Vec::new(),
            dirichlet_val: Vec::new(),
        })
    }

    pub fn mesh(&self) -> &HierMesh {
        &self.mesh
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn dim(&self) -> usize {
        self.topo.dim
    }

    pub fn n_comp(&self) -> usize {
        self.n_comp
    }

    pub fn n_nodes(&self) -> usize {
        self.topo.n_nodes()
    }

    pub fn n_dofs(&self) -> usize {
        self.topo.n_nodes() * self.n_comp
    }

    pub fn coords(&self, node: usize) -> [f64; 3] {
        self.topo.coords[node]
    }

    pub fn constraints(&self) -> &[LocalConstraint] {
        &self.constraints
    }

    pub fn is_hanging(&self, node: usize) -> bool {
        self.hanging[node]
    }

    pub fn n_hanging(&self) -> usize {
        self.constraints.len()
    }

    /// Node-level hanging matrix `H` (identity rows for regular nodes).
    pub fn hanging_matrix(&self) -> &CsrMatrix {
        &self.h
    }

    pub fn zeros(&self) -> BlockVector {
        BlockVector::zeros(self.n_nodes(), self.n_comp)
    }

    /// True for nodes on the boundary of the domain box.
    pub fn is_boundary_node(&self, node: usize) -> bool {
        let key = self.mesh.node_key(self.topo.nodes[node]);
        (0..self.dim()).any(|a| key[a] == 0 || key[a] == self.mesh.logical_span(a))
    }

    /// Local boundary nodes, ascending.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&i| self.is_boundary_node(i)).collect()
    }

    /// Prescribes values on boundary nodes: `value(x, comp)` returns the
    /// boundary value or `None` to leave the component free. Hanging nodes
    /// are skipped; their values follow from their masters.
    pub fn set_dirichlet_boundary(&mut self, value: impl Fn([f64; 3], usize) -> Option<f64>) {
        let mut entries = Vec::new();
        for node in self.boundary_nodes() {
            if self.hanging[node] {
                continue;
            }
            let x = self.coords(node);
            for c in 0..self.n_comp {
                if let Some(v) = value(x, c) {
                    entries.push((node * self.n_comp + c, v));
                }
            }
        }
        self.set_dirichlet(entries);
    }

    /// Replaces the Dirichlet set by `(flat index, value)` pairs.
    pub fn set_dirichlet(&mut self, mut entries: Vec<(usize, f64)>) {
        entries.sort_by_key(|e| e.0);
        entries.dedup_by_key(|e| e.0);
        self.dirichlet_mask.fill(false);
        for &(k, _) in &entries {
            self.dirichlet_mask[k] = true;
        }
        self.dirichlet_idx = entries.iter().map(|e| e.0).collect();
        self.dirichlet_val = entries.iter().map(|e| e.1).collect();
    }

    /// Re-evaluates the values on the existing Dirichlet set.
    pub fn update_dirichlet_values(&mut self, value: impl Fn([f64; 3], usize) -> f64) {
        for (k, &idx) in self.dirichlet_idx.iter().enumerate() {
            let (node, c) = (idx / self.n_comp, idx % self.n_comp);
            self.dirichlet_val[k] = value(self.topo.coords[node], c);
        }
    }

    pub fn dirichlet_indices(&self) -> &[usize] {
        &self.dirichlet_idx
    }

    pub fn dirichlet_values(&self) -> &[f64] {
        &self.dirichlet_val
    }

    pub fn is_dirichlet(&self, flat: usize) -> bool {
        self.dirichlet_mask[flat]
    }

    /// Per flat index: true for hanging or Dirichlet entries, which are not
    /// free unknowns of the constrained system.
    pub fn constrained_mask(&self) -> Vec<bool> {
        let nc = self.n_comp;
        (0..self.n_dofs())
            .map(|k| self.dirichlet_mask[k] || self.hanging[k / nc])
            .collect()
    }

    /// Nodal interpolant of `f(x) -> component values`.
    pub fn interpolate(&self, f: impl Fn([f64; 3]) -> Vec<f64>) -> BlockVector {
        let mut v = self.zeros();
        for i in 0..self.n_nodes() {
            let vals = f(self.coords(i));
            for c in 0..self.n_comp {
                v.set(i, c, vals[c]);
            }
        }
        v
    }
}

fn hanging_matrix(n: usize, constraints: &[LocalConstraint], hanging: &[bool]) -> Result<CsrMatrix> {
    let mut b = TripletBuilder::with_capacity(n, n, n + 3 * constraints.len());
    let mut next = constraints.iter().peekable();
    for i in 0..n {
        match next.peek() {
            Some(c) if c.node == i => {
                for (&m, &w) in c.masters.iter().zip(&c.weights) {
                    if hanging[m] {
                        return Err(Error::HangingMaster { node: m, hanging: i });
                    }
                    b.add(i, m, w);
                }
                next.next();
            }
            _ => b.add(i, i, 1.0),
        }
    }
    Ok(b.build())
}

/// `H` for an explicit constraint list; used to build hanging matrices in
/// isolation and in tests.
pub fn build_hanging_matrix(n: usize, constraints: &[LocalConstraint]) -> Result<CsrMatrix> {
    let mut sorted = constraints.to_vec();
    sorted.sort_by_key(|c| c.node);
    let mut hanging = vec![false; n];
    for c in &sorted {
        if c.node >= n || c.masters.iter().any(|&m| m >= n) {
            return Err(Error::OutOfRange {
                op: "build_hanging_matrix",
                index: c.node.max(c.masters.iter().copied().max().unwrap_or(0)),
                size: n,
            });
        }
        hanging[c.node] = true;
    }
    hanging_matrix(n, &sorted, &hanging)
}
