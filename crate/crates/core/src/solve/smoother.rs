//! Damped Jacobi and block-Jacobi smoothing.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};
use crate::linalg::{Backend, CsrMatrix, DiagOperator, TripletBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherKind {
    Jacobi,
    /// Inverts the dense `n_comp × n_comp` diagonal block of every node.
    BlockJacobi,
    /// Scalar block-Jacobi over small node groups that follow strong
    /// matrix couplings. On stretched cells the groups line up with the
    /// short cell direction, which point Jacobi cannot smooth.
    StrongBlockJacobi,
}

/// Off-diagonal `a_ij` is strong when `|a_ij| ≥ STRONG · max_k |a_ik|`.
const STRONG: f64 = 0.8;
const MAX_GROUP: usize = 128;

/// The `S` of the smoothing step `x ← x + ω S (b - A x)`.
#[derive(Debug, Clone)]
pub enum Smoother {
    Jacobi(DiagOperator),
    /// Block-diagonal matrix of inverted node blocks.
    BlockJacobi(CsrMatrix),
    Groups(GroupSmoother),
}

/// Dense LU factors of the diagonal blocks of a node partition.
#[derive(Debug, Clone)]
pub struct GroupSmoother {
    groups: Vec<Vec<usize>>,
    factors: Vec<LU<f64, Dyn, Dyn>>,
}

impl GroupSmoother {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let groups = strong_groups(a, STRONG, MAX_GROUP);
        let mut factors = Vec::with_capacity(groups.len());
        for g in &groups {
            let mut block = DMatrix::<f64>::zeros(g.len(), g.len());
            for (bi, &i) in g.iter().enumerate() {
                for (bj, &j) in g.iter().enumerate() {
                    block[(bi, bj)] = a.get(i, j);
                }
            }
            let lu = block.lu();
            if !lu.is_invertible() {
                return Err(Error::Singular { column: g[0] });
            }
            factors.push(lu);
        }
        Ok(Self { groups, factors })
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    fn apply(&self, r: &[f64], out: &mut [f64]) -> Result<()> {
        for (g, lu) in self.groups.iter().zip(&self.factors) {
            let rhs = DVector::from_iterator(g.len(), g.iter().map(|&i| r[i]));
            let sol = lu.solve(&rhs).ok_or(Error::Singular { column: g[0] })?;
            for (k, &i) in g.iter().enumerate() {
                out[i] = sol[k];
            }
        }
        Ok(())
    }
}

/// Partitions the rows of `a` into groups of at most `max_group` nodes,
/// grown breadth-first along strong couplings from the lowest free index.
pub fn strong_groups(a: &CsrMatrix, theta: f64, max_group: usize) -> Vec<Vec<usize>> {
    let n = a.n_rows();
    let mut strong: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let (cols, vals) = a.row(i);
        let max = cols
            .iter()
            .zip(vals)
            .filter(|(&j, _)| j != i)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        if max == 0.0 {
            continue;
        }
        for (&j, &v) in cols.iter().zip(vals) {
            if j != i && v.abs() >= theta * max {
                strong[i].push(j);
                strong[j].push(i);
            }
        }
    }
    for s in &mut strong {
        s.sort_unstable();
        s.dedup();
    }
    let mut assigned = vec![false; n];
    let mut groups = Vec::new();
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if assigned[seed] {
            continue;
        }
        let mut g = vec![seed];
        assigned[seed] = true;
        queue.clear();
        queue.push_back(seed);
        'grow: while let Some(i) = queue.pop_front() {
            for &j in &strong[i] {
                if g.len() >= max_group {
                    break 'grow;
                }
                if !assigned[j] {
                    assigned[j] = true;
                    g.push(j);
                    queue.push_back(j);
                }
            }
        }
        g.sort_unstable();
        groups.push(g);
    }
    groups
}

impl Smoother {
    pub fn new(kind: SmootherKind, a: &CsrMatrix, n_comp: usize) -> Result<Self> {
        match kind {
            SmootherKind::Jacobi => Ok(Smoother::Jacobi(DiagOperator::from_matrix_diagonal(a)?)),
            SmootherKind::BlockJacobi if n_comp == 1 => {
                Ok(Smoother::Jacobi(DiagOperator::from_matrix_diagonal(a)?))
            }
            SmootherKind::BlockJacobi => Ok(Smoother::BlockJacobi(inverse_block_diagonal(a, n_comp)?)),
            SmootherKind::StrongBlockJacobi if n_comp == 1 => Ok(Smoother::Groups(GroupSmoother::new(a)?)),
            SmootherKind::StrongBlockJacobi => Err(Error::ComponentCount {
                op: "strong block-Jacobi smoother",
                expected: 1,
                got: n_comp,
            }),
        }
    }

    /// `out = S r`.
    pub fn apply(&self, backend: &dyn Backend, r: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            Smoother::Jacobi(d) => backend.diag_apply(d, r, out),
            Smoother::BlockJacobi(s) => backend.spmv_flat(1.0, s, r, 0.0, out),
            Smoother::Groups(g) => {
                if r.len() != out.len() {
                    return Err(Error::dim("group smoother", r.len(), out.len()));
                }
                g.apply(r, out)
            }
        }
    }
}

fn inverse_block_diagonal(a: &CsrMatrix, nc: usize) -> Result<CsrMatrix> {
    let n = a.n_rows();
    if n % nc != 0 || a.n_cols() != n {
        return Err(Error::ComponentCount {
            op: "block-Jacobi smoother",
            expected: nc,
            got: n,
        });
    }
    let mut b = TripletBuilder::with_capacity(n, n, n * nc);
    let mut block = DMatrix::<f64>::zeros(nc, nc);
    for node in 0..n / nc {
        block.fill(0.0);
        for c in 0..nc {
            let row = node * nc + c;
            let (cols, vals) = a.row(row);
            for (&j, &v) in cols.iter().zip(vals) {
                if j / nc == node {
                    block[(c, j % nc)] = v;
                }
            }
        }
        let inv = block
            .clone()
            .try_inverse()
            .ok_or(Error::Singular { column: node * nc })?;
        for c in 0..nc {
            for d in 0..nc {
                let v = inv[(c, d)];
                if v != 0.0 {
                    b.add(node * nc + c, node * nc + d, v);
                }
            }
        }
    }
    Ok(b.build())
}

/// `steps` damped smoothing sweeps on `A x = b`.
pub fn smooth(
    backend: &dyn Backend,
    a: &CsrMatrix,
    s: &Smoother,
    b: &[f64],
    x: &mut [f64],
    omega: f64,
    steps: usize,
) -> Result<()> {
    let mut r = vec![0.0; b.len()];
    let mut z = vec![0.0; b.len()];
    for _ in 0..steps {
        r.copy_from_slice(b);
        backend.spmv_flat(-1.0, a, x, 1.0, &mut r)?;
        s.apply(backend, &r, &mut z)?;
        backend.axpy(omega, &z, x)?;
    }
    Ok(())
}

/// Point-Jacobi smoothing `x ← x + ω D⁻¹(b − A x)`, `steps` times.
pub fn jacobi_smooth(
    backend: &dyn Backend,
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    omega: f64,
    steps: usize,
) -> Result<()> {
    let s = Smoother::new(SmootherKind::Jacobi, a, 1)?;
    smooth(backend, a, &s, b, x, omega, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Reference;

    #[test]
    fn identity_one_step() {
        let mut x = [0.0, 0.0];
        jacobi_smooth(&Reference, &CsrMatrix::identity(2), &[3.0, 4.0], &mut x, 1.0, 1).unwrap();
        assert_eq!(x, [3.0, 4.0]);
    }

    #[test]
    fn diagonal_one_step() {
        let a = CsrMatrix::from_diagonal(&[2.0, 4.0]);
        let mut x = [0.0, 0.0];
        jacobi_smooth(&Reference, &a, &[2.0, 4.0], &mut x, 1.0, 1).unwrap();
        assert_eq!(x, [1.0, 1.0]);
    }

    #[test]
    fn block_inverse() {
        let a = CsrMatrix::from_dense(
            4,
            4,
            &[2.0, 1.0, 0.5, 0.0, 1.0, 2.0, 0.0, 0.5, 0.5, 0.0, 4.0, 0.0, 0.0, 0.5, 0.0, 4.0],
        )
        .unwrap();
        let Smoother::BlockJacobi(s) = Smoother::new(SmootherKind::BlockJacobi, &a, 2).unwrap() else {
            panic!("expected block smoother");
        };
        assert!((s.get(0, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.get(0, 1) + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.get(0, 2), 0.0);
        assert_eq!(s.get(2, 2), 0.25);
    }

    #[test]
    fn zero_diagonal_rejected() {
        let a = CsrMatrix::from_dense(2, 2, &[0.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            Smoother::new(SmootherKind::Jacobi, &a, 1),
            Err(Error::ZeroDiagonal { row: 0 })
        ));
    }

    /// 4x4 grid Laplacian coupled 100x more strongly along y.
    fn anisotropic_grid() -> CsrMatrix {
        let idx = |x: usize, y: usize| y * 4 + x;
        let mut b = TripletBuilder::new(16, 16);
        for y in 0..4 {
            for x in 0..4 {
                let i = idx(x, y);
                b.add(i, i, 2.0 + 200.0 + 1e-3);
                if x > 0 {
                    b.add(i, idx(x - 1, y), -1.0);
                }
                if x < 3 {
                    b.add(i, idx(x + 1, y), -1.0);
                }
                if y > 0 {
                    b.add(i, idx(x, y - 1), -100.0);
                }
                if y < 3 {
                    b.add(i, idx(x, y + 1), -100.0);
                }
            }
        }
        b.build()
    }

    #[test]
    fn groups_follow_strong_couplings() {
        let groups = strong_groups(&anisotropic_grid(), STRONG, MAX_GROUP);
        assert_eq!(groups, vec![vec![0, 4, 8, 12], vec![1, 5, 9, 13], vec![2, 6, 10, 14], vec![3, 7, 11, 15]]);
        let capped = strong_groups(&anisotropic_grid(), STRONG, 2);
        assert_eq!(capped.len(), 8);
        assert!(capped.iter().all(|g| g.len() == 2));
    }

    #[test]
    fn single_group_is_exact_solve() {
        let a = CsrMatrix::from_dense(3, 3, &[4.0, -1.0, 0.0, -1.0, 4.0, -1.0, 0.0, -1.0, 4.0]).unwrap();
        let s = Smoother::new(SmootherKind::StrongBlockJacobi, &a, 1).unwrap();
        let Smoother::Groups(g) = &s else {
            panic!("expected group smoother");
        };
        assert_eq!(g.groups().len(), 1);
        let b = [1.0, 2.0, 3.0];
        let mut x = [0.0; 3];
        smooth(&Reference, &a, &s, &b, &mut x, 1.0, 1).unwrap();
        let mut r = b;
        Reference.spmv_flat(-1.0, &a, &x, 1.0, &mut r).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn group_smoother_needs_scalar_system() {
        assert!(Smoother::new(SmootherKind::StrongBlockJacobi, &CsrMatrix::identity(4), 2).is_err());
    }
}
