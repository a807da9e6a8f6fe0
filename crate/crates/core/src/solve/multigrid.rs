//! Geometric multigrid V-cycle over a hierarchy of globally coarsened
//! meshes.
//!
//! Every level carries its own directly assembled operator. Level vectors
//! are in the constrained "full" form: hanging and Dirichlet entries are
//! identity rows and corrections never touch them. The transfer between
//! levels `l-1` and `l` is `Z_l P H_{l-1} Z_{l-1}` with `Z` zeroing those
//! entries and `H` the coarse hanging matrix; restriction is its transpose.

use nalgebra::{DMatrix, DVector, LU, Dyn};

use super::projection::project_zero_mean;
use super::smoother::{smooth, Smoother, SmootherKind};
use crate::error::{Error, Result};
use crate::fem::FeSpace;
use crate::linalg::{Backend, CsrMatrix, Reference};

#[derive(Debug, Clone, PartialEq)]
pub struct MgConfig {
    pub nu_pre: usize,
    pub nu_post: usize,
    pub omega: f64,
    pub coarse_sweeps: usize,
    pub max_cycles: usize,
    pub rel_tol: f64,
    /// Global coarsening stops once a level has at most this many elements.
    pub coarse_target: usize,
}

impl Default for MgConfig {
    fn default() -> Self {
        Self {
            nu_pre: 2,
            nu_post: 2,
            omega: 0.8,
            coarse_sweeps: 20,
            max_cycles: 100,
            rel_tol: 1e-8,
            coarse_target: 64,
        }
    }
}

impl MgConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: key.into(),
                line: 0,
                message: message.into(),
            })
        };
        if self.nu_pre < 1 {
            return bad("mg.nu_pre", "must be at least 1");
        }
        if self.nu_post < 1 {
            return bad("mg.nu_post", "must be at least 1");
        }
        if self.coarse_sweeps < 1 {
            return bad("mg.coarse_sweeps", "must be at least 1");
        }
        if self.max_cycles < 1 {
            return bad("mg.max_cycles", "must be at least 1");
        }
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return bad("mg.omega", "must lie in (0, 1]");
        }
        if !(self.rel_tol > 0.0) {
            return bad("mg.rel_tol", "must be positive");
        }
        if self.coarse_target < 1 {
            return bad("mg.coarse_target", "must be at least 1");
        }
        Ok(())
    }
}

/// One multigrid level.
#[derive(Debug, Clone)]
pub struct MgLevel {
    /// Constrained system with Dirichlet rows eliminated.
    pub a: CsrMatrix,
    pub smoother: Smoother,
    /// Node-level prolongation from the next coarser level.
    pub p_from_below: Option<CsrMatrix>,
    /// `Pᵀ`, stored explicitly.
    r_to_below: Option<CsrMatrix>,
    /// Node-level hanging matrix of this level.
    pub h: CsrMatrix,
    h_is_identity: bool,
    pub n_comp: usize,
    /// Flat entries that are hanging or Dirichlet.
    pub mask: Vec<bool>,
    /// Power-iteration estimate of the spectral radius of `S A`.
    pub lambda_max: f64,
}

impl MgLevel {
    pub fn new(
        a: CsrMatrix,
        kind: SmootherKind,
        n_comp: usize,
        h: CsrMatrix,
        mask: Vec<bool>,
        p_from_below: Option<CsrMatrix>,
    ) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n || h.n_rows() * n_comp != n || mask.len() != n {
            return Err(Error::dim("MgLevel::new", n, h.n_rows() * n_comp));
        }
        if let Some(p) = &p_from_below {
            if p.n_rows() != h.n_rows() {
                return Err(Error::dim("MgLevel::new", h.n_rows(), p.n_rows()));
            }
        }
        let smoother = Smoother::new(kind, &a, n_comp)?;
        let lambda_max = estimate_lambda_max(&a, &smoother)?;
        let h_is_identity = (0..h.n_rows()).all(|i| h.row(i) == (&[i][..], &[1.0][..]));
        let r_to_below = p_from_below.as_ref().map(CsrMatrix::transpose);
        Ok(Self {
            a,
            smoother,
            p_from_below,
            r_to_below,
            h,
            h_is_identity,
            n_comp,
            mask,
            lambda_max,
        })
    }

    /// Level built from a space: its hanging matrix and constraint mask.
    pub fn from_space(
        space: &FeSpace,
        a: CsrMatrix,
        kind: SmootherKind,
        p_from_below: Option<CsrMatrix>,
    ) -> Result<Self> {
        Self::new(
            a,
            kind,
            space.n_comp(),
            space.hanging_matrix().clone(),
            space.constrained_mask(),
            p_from_below,
        )
    }

    pub fn n(&self) -> usize {
        self.a.n_rows()
    }

    /// Restriction operator `Pᵀ`.
    pub fn restriction(&self) -> Option<&CsrMatrix> {
        self.r_to_below.as_ref()
    }

    /// Damping actually used on this level. The configured `omega` is kept
    /// unless `omega λ_max >= 2`, where the smoother would amplify the
    /// stiffest modes (stretched cells); then it drops to `4 / (3 λ_max)`.
    pub fn damping(&self, omega: f64) -> f64 {
        if omega * self.lambda_max < 2.0 {
            omega
        } else {
            omega.min(4.0 / (3.0 * self.lambda_max))
        }
    }
}

const POWER_STEPS: usize = 40;
/// Power iteration approaches `λ_max` from below.
const POWER_SAFETY: f64 = 1.1;

fn estimate_lambda_max(a: &CsrMatrix, s: &Smoother) -> Result<f64> {
    let n = a.n_rows();
    if n == 0 {
        return Ok(1.0);
    }
    // Fixed, non-smooth start vector keeps the estimate reproducible.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 97) as f64 / 97.0).collect();
    let (mut ax, mut y) = (vec![0.0; n], vec![0.0; n]);
    let mut lambda = 0.0;
    for _ in 0..POWER_STEPS {
        let norm = Reference.norm2(&x);
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        Reference.spmv_flat(1.0, a, &x, 0.0, &mut ax)?;
        s.apply(&Reference, &ax, &mut y)?;
        lambda = Reference.norm2(&y);
        std::mem::swap(&mut x, &mut y);
    }
    Ok((lambda * POWER_SAFETY).max(1e-12))
}

fn apply_mask(mask: &[bool], x: &mut [f64]) {
    for (v, &m) in x.iter_mut().zip(mask) {
        if m {
            *v = 0.0;
        }
    }
}

/// A multigrid hierarchy with its cycle parameters.
#[derive(Debug)]
pub struct Multigrid {
    pub levels: Vec<MgLevel>,
    pub config: MgConfig,
    coarse_lu: Option<LU<f64, Dyn, Dyn>>,
    zero_mean: Option<Vec<f64>>,
}

impl Multigrid {
    pub fn new(levels: Vec<MgLevel>, config: MgConfig) -> Result<Self> {
        config.validate()?;
        if levels.is_empty() {
            return Err(Error::Solver("multigrid needs at least one level".into()));
        }
        for l in 1..levels.len() {
            let p = levels[l].p_from_below.as_ref().ok_or_else(|| {
                Error::Solver(format!("level {l} has no prolongation from level {}", l - 1))
            })?;
            if p.n_cols() != levels[l - 1].h.n_rows() || levels[l].n_comp != levels[l - 1].n_comp {
                return Err(Error::dim("Multigrid::new", levels[l - 1].h.n_rows(), p.n_cols()));
            }
        }
        Ok(Self {
            levels,
            config,
            coarse_lu: None,
            zero_mean: None,
        })
    }

    /// Replaces the coarse smoothing sweeps by a dense direct solve.
    /// Meant for small test hierarchies.
    pub fn with_direct_coarse(mut self) -> Result<Self> {
        let a = &self.levels[0].a;
        let n = a.n_rows();
        let m = DMatrix::from_row_slice(n, n, &a.to_dense());
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular { column: 0 });
        }
        self.coarse_lu = Some(lu);
        Ok(self)
    }

    /// Projects every finest-level iterate onto zero weighted mean, for
    /// singular pure-Neumann systems.
    pub fn with_zero_mean(mut self, weights: Vec<f64>) -> Self {
        self.zero_mean = Some(weights);
        self
    }

    pub fn finest(&self) -> &MgLevel {
        self.levels.last().unwrap()
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// One V-cycle on level `l`, updating `x` in place.
    pub fn v_cycle(&self, backend: &dyn Backend, l: usize, x: &mut [f64], b: &[f64]) -> Result<()> {
        let lev = &self.levels[l];
        let cfg = &self.config;
        if l == 0 {
            if let Some(lu) = &self.coarse_lu {
                let sol = lu
                    .solve(&DVector::from_column_slice(b))
                    .ok_or(Error::Singular { column: 0 })?;
                x.copy_from_slice(sol.as_slice());
                return Ok(());
            }
            return smooth(backend, &lev.a, &lev.smoother, b, x, lev.damping(cfg.omega), cfg.coarse_sweeps);
        }
        smooth(backend, &lev.a, &lev.smoother, b, x, lev.damping(cfg.omega), cfg.nu_pre)?;

        let below = &self.levels[l - 1];
        let nc = lev.n_comp;
        let mut r = b.to_vec();
        backend.spmv_flat(-1.0, &lev.a, x, 1.0, &mut r)?;
        apply_mask(&lev.mask, &mut r);
        let mut t = vec![0.0; below.n()];
        backend.spmv_components(1.0, lev.r_to_below.as_ref().unwrap(), &r, 0.0, &mut t, nc)?;
        let mut d = if below.h_is_identity {
            t
        } else {
            let mut d = vec![0.0; below.n()];
            backend.spmv_transpose_components(1.0, &below.h, &t, 0.0, &mut d, nc)?;
            d
        };
        apply_mask(&below.mask, &mut d);

        let mut y = vec![0.0; below.n()];
        self.v_cycle(backend, l - 1, &mut y, &d)?;

        apply_mask(&below.mask, &mut y);
        let hy = if below.h_is_identity {
            y
        } else {
            let mut hy = vec![0.0; below.n()];
            backend.spmv_components(1.0, &below.h, &y, 0.0, &mut hy, nc)?;
            hy
        };
        let mut e = vec![0.0; lev.n()];
        backend.spmv_components(1.0, lev.p_from_below.as_ref().unwrap(), &hy, 0.0, &mut e, nc)?;
        apply_mask(&lev.mask, &mut e);
        backend.axpy(1.0, &e, x)?;

        smooth(backend, &lev.a, &lev.smoother, b, x, lev.damping(cfg.omega), cfg.nu_post)
    }

    /// One V-cycle from zero on the finest level: the preconditioner
    /// `z = M⁻¹ r`.
    pub fn precondition(&self, backend: &dyn Backend, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.fill(0.0);
        self.v_cycle(backend, self.levels.len() - 1, z, r)?;
        if let Some(w) = &self.zero_mean {
            project_zero_mean(z, Some(w.as_slice()));
        }
        Ok(())
    }
}

/// Free-function form of [`Multigrid::v_cycle`].
pub fn v_cycle(backend: &dyn Backend, mg: &Multigrid, l: usize, x: &mut [f64], b: &[f64]) -> Result<()> {
    mg.v_cycle(backend, l, x, b)
}

/// Outcome of an iterative solve; non-convergence is reported here rather
/// than as an error.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveRecord {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative residual `‖b - Ax‖/‖b‖` (absolute when `b = 0`).
    pub final_residual: f64,
    pub converged: bool,
    /// Residual norms, starting with the initial one.
    pub history: Vec<f64>,
}

/// Repeated V-cycles until `‖b - Ax‖ ≤ rel_tol ‖b‖` or `max_cycles`.
pub fn mg_solve(backend: &dyn Backend, mg: &Multigrid, b: &[f64], x0: Option<&[f64]>) -> Result<SolveRecord> {
    let lev = mg.finest();
    let n = lev.n();
    if b.len() != n {
        return Err(Error::dim("mg_solve", n, b.len()));
    }
    let mut x = match x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        Some(x0) => return Err(Error::dim("mg_solve", n, x0.len())),
        None => vec![0.0; n],
    };
    let bnorm = backend.norm2(b);
    if bnorm == 0.0 {
        return Ok(SolveRecord {
            x: vec![0.0; n],
            iterations: 0,
            final_residual: 0.0,
            converged: true,
            history: vec![0.0],
        });
    }
    let top = mg.levels.len() - 1;
    let mut r = vec![0.0; n];
    let residual = |x: &[f64], r: &mut [f64]| -> Result<f64> {
        r.copy_from_slice(b);
        backend.spmv_flat(-1.0, &lev.a, x, 1.0, r)?;
        Ok(backend.norm2(r) / bnorm)
    };
    let mut res = residual(&x, &mut r)?;
    let mut history = vec![res * bnorm];
    let mut it = 0;
    while res > mg.config.rel_tol && it < mg.config.max_cycles {
        mg.v_cycle(backend, top, &mut x, b)?;
        if let Some(w) = &mg.zero_mean {
            project_zero_mean(&mut x, Some(w.as_slice()));
        }
        it += 1;
        res = residual(&x, &mut r)?;
        history.push(res * bnorm);
        if !res.is_finite() {
            return Err(Error::Solver(format!("multigrid diverged after {it} cycles")));
        }
    }
    Ok(SolveRecord {
        x,
        iterations: it,
        final_residual: res,
        converged: res <= mg.config.rel_tol,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(a: CsrMatrix) -> MgLevel {
        let n = a.n_rows();
        MgLevel::new(a, SmootherKind::Jacobi, 1, CsrMatrix::identity(n), vec![false; n], None).unwrap()
    }

    #[test]
    fn identity_keeps_configured_damping() {
        let l = level(CsrMatrix::identity(5));
        assert!((l.lambda_max - POWER_SAFETY).abs() < 1e-12);
        assert_eq!(l.damping(0.8), 0.8);
    }

    #[test]
    fn large_spread_caps_damping() {
        // Blocks (1-c) I + c J of size 4: D⁻¹A has eigenvalues 0.1 and 3.7.
        let (blocks, k, c) = (10, 4, 0.9);
        let mut b = crate::linalg::TripletBuilder::new(blocks * k, blocks * k);
        for blk in 0..blocks {
            for i in 0..k {
                for j in 0..k {
                    b.add(blk * k + i, blk * k + j, if i == j { 1.0 } else { c });
                }
            }
        }
        let l = level(b.build());
        assert!(l.lambda_max > 3.6 && l.lambda_max < 3.7 * POWER_SAFETY + 1e-9, "{}", l.lambda_max);
        assert!((l.damping(0.8) - 4.0 / (3.0 * l.lambda_max)).abs() < 1e-15);
        assert!(l.damping(0.8) * 3.7 < 2.0);
    }

    #[test]
    fn moderate_spread_keeps_damping() {
        // D⁻¹A of the 1D Laplacian has eigenvalues up to nearly 2.
        let n = 40;
        let mut b = crate::linalg::TripletBuilder::new(n, n);
        for i in 0..n {
            b.add(i, i, 2.0);
            if i > 0 {
                b.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                b.add(i, i + 1, -1.0);
            }
        }
        let l = level(b.build());
        assert!(l.lambda_max > 1.9 && l.lambda_max < 2.0 * POWER_SAFETY, "{}", l.lambda_max);
        assert_eq!(l.damping(0.8), 0.8);
    }
}
