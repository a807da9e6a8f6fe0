//! Hanging-node and Dirichlet constraints on assembled systems.
//!
//! A constrained solve works on "full" vectors over all nodes:
//! the system is `Hᵀ A H` with identity rows at hanging nodes, the right
//! hand side is `Hᵀ b` with zeros at hanging nodes, Dirichlet rows are
//! eliminated symmetrically, and the solution is expanded by `u = H x`.

use super::space::FeSpace;
use crate::error::{Error, Result};
use crate::linalg::{BlockVector, CsrMatrix, TripletBuilder};

/// `Hᵀ A H` with every hanging row and column replaced by the identity.
///
/// `h` is the flat hanging matrix (rows with no diagonal entry are hanging).
/// The products are formed entry by entry and each output entry is summed
/// in ascending order of its contributions, so a symmetric `A` gives a
/// bit-exactly symmetric result.
pub fn constrain_system(a: &CsrMatrix, h: &CsrMatrix) -> Result<CsrMatrix> {
    let n = a.n_rows();
    if a.n_cols() != n || h.n_rows() != n || h.n_cols() != n {
        return Err(Error::dim("constrain_system", n, h.n_rows()));
    }
    let hanging: Vec<bool> = (0..n).map(|i| h.get(i, i) == 0.0).collect();
    if !hanging.iter().any(|&x| x) {
        return Ok(a.clone());
    }
    let mut b = TripletBuilder::with_capacity(n, n, a.nnz() * 2);
    for i in 0..n {
        let (hi_cols, hi_vals) = h.row(i);
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let (hj_cols, hj_vals) = h.row(j);
            for (&p, &hp) in hi_cols.iter().zip(hi_vals) {
                for (&q, &hq) in hj_cols.iter().zip(hj_vals) {
                    b.add(p, q, v * (hp * hq));
                }
            }
        }
    }
    for (i, &hang) in hanging.iter().enumerate() {
        if hang {
            b.add(i, i, 1.0);
        }
    }
    Ok(b.build_value_ordered())
}

/// Node-level `H` expanded to a space's flattened index.
pub fn flat_hanging_matrix(space: &FeSpace) -> CsrMatrix {
    space.hanging_matrix().expand_components(space.n_comp())
}

/// Right-hand side in constrained form: `Hᵀ b` with hanging entries zeroed.
pub fn constrain_rhs(space: &FeSpace, b: &BlockVector) -> Result<BlockVector> {
    if b.len() != space.n_dofs() {
        return Err(Error::dim("constrain_rhs", space.n_dofs(), b.len()));
    }
    let nc = space.n_comp();
    let mut out = b.clone();
    for c in space.constraints() {
        for k in 0..nc {
            let v = b.get(c.node, k);
            for (&m, &w) in c.masters.iter().zip(&c.weights) {
                out.as_mut_slice()[m * nc + k] += w * v;
            }
            out.set(c.node, k, 0.0);
        }
    }
    Ok(out)
}

/// Fills hanging entries of `x` by interpolation from their masters
/// (`x ← H x`).
pub fn expand_hanging(space: &FeSpace, x: &mut BlockVector) {
    let nc = space.n_comp();
    for c in space.constraints() {
        for k in 0..nc {
            let mut s = 0.0;
            for (&m, &w) in c.masters.iter().zip(&c.weights) {
                s += w * x.get(m, k);
            }
            x.set(c.node, k, s);
        }
    }
}

/// Symmetric elimination of Dirichlet unknowns, reusable across right-hand
/// sides with changing boundary values.
#[derive(Debug, Clone)]
pub struct DirichletSystem {
    /// Rows and columns of constrained unknowns cleared, unit diagonal.
    pub matrix: CsrMatrix,
    /// `A[i,k]` for free rows `i` and constrained columns `k`, full size.
    coupling: CsrMatrix,
    indices: Vec<usize>,
}

impl DirichletSystem {
    pub fn new(a: &CsrMatrix, indices: &[usize]) -> Result<Self> {
        let n = a.n_rows();
        let mut fixed = vec![false; n];
        for &k in indices {
            if k >= n {
                return Err(Error::OutOfRange {
                    op: "DirichletSystem::new",
                    index: k,
                    size: n,
                });
            }
            fixed[k] = true;
        }
        let mut rp = vec![0usize];
        let (mut ci, mut vv) = (Vec::with_capacity(a.nnz()), Vec::with_capacity(a.nnz()));
        let mut coupling = TripletBuilder::new(n, n);
        for i in 0..n {
            let (cols, vals) = a.row(i);
            if fixed[i] {
                ci.push(i);
                vv.push(1.0);
            } else {
                for (&j, &v) in cols.iter().zip(vals) {
                    if fixed[j] {
                        coupling.add(i, j, v);
                    } else {
                        ci.push(j);
                        vv.push(v);
                    }
                }
            }
            rp.push(ci.len());
        }
        Ok(Self {
            matrix: CsrMatrix::from_parts_unchecked(n, n, rp, ci, vv),
            coupling: coupling.build(),
            indices: indices.to_vec(),
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `b'_i = b_i - Σ_k A[i,k] g_k` on free rows, `b'_k = g_k` on fixed rows.
    pub fn apply_rhs(&self, b: &mut [f64], values: &[f64]) -> Result<()> {
        if values.len() != self.indices.len() {
            return Err(Error::dim("DirichletSystem::apply_rhs", self.indices.len(), values.len()));
        }
        if b.len() != self.matrix.n_rows() {
            return Err(Error::dim("DirichletSystem::apply_rhs", self.matrix.n_rows(), b.len()));
        }
        let mut g = vec![0.0; b.len()];
        for (&k, &v) in self.indices.iter().zip(values) {
            g[k] = v;
        }
        for (i, bi) in b.iter_mut().enumerate() {
            let (cols, vals) = self.coupling.row(i);
            for (&k, &v) in cols.iter().zip(vals) {
                *bi -= v * g[k];
            }
        }
        for (&k, &v) in self.indices.iter().zip(values) {
            b[k] = v;
        }
        Ok(())
    }
}

/// One-shot symmetric Dirichlet elimination using the space's boundary data.
pub fn apply_dirichlet(a: &CsrMatrix, b: &BlockVector, space: &FeSpace) -> Result<(CsrMatrix, BlockVector)> {
    let sys = DirichletSystem::new(a, space.dirichlet_indices())?;
    let mut rhs = b.clone();
    sys.apply_rhs(rhs.as_mut_slice(), space.dirichlet_values())?;
    Ok((sys.matrix, rhs))
}
