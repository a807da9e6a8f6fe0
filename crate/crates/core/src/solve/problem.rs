//! A constrained linear system on every level of a mesh hierarchy, with
//! the multigrid preconditioner built on top.

use super::gmres::{gmres, GmresConfig};
use super::multigrid::{MgConfig, MgLevel, Multigrid, SolveRecord};
use super::projection::project_zero_mean;
use super::smoother::SmootherKind;
use crate::error::Result;
use crate::fem::{build_prolongation, constrain_rhs, constrain_system, expand_hanging, flat_hanging_matrix, DirichletSystem, FeSpace};
use crate::linalg::{Backend, BlockVector, CsrMatrix};
use crate::mesh::MeshHierarchy;

/// Spaces and Dirichlet eliminations per level, coarsest first.
#[derive(Debug)]
pub struct LinearProblem {
    pub spaces: Vec<FeSpace>,
    dirichlet: DirichletSystem,
    pub mg: Multigrid,
}

impl LinearProblem {
    /// `configure` sets up each level's space (Dirichlet set); `assemble`
    /// returns the unconstrained operator on a level.
    pub fn new(
        hierarchy: &MeshHierarchy,
        n_comp: usize,
        mut configure: impl FnMut(&mut FeSpace),
        mut assemble: impl FnMut(&FeSpace) -> Result<CsrMatrix>,
        smoother: SmootherKind,
        config: MgConfig,
    ) -> Result<Self> {
        let mut spaces = Vec::with_capacity(hierarchy.n_levels());
        let mut levels = Vec::with_capacity(hierarchy.n_levels());
        let mut dirichlet = None;
        for mesh in &hierarchy.levels {
            let mut space = FeSpace::new(mesh, n_comp)?;
            configure(&mut space);
            let a = assemble(&space)?;
            let a = constrain_system(&a, &flat_hanging_matrix(&space))?;
            let sys = DirichletSystem::new(&a, space.dirichlet_indices())?;
            let p = match spaces.last() {
                Some(coarse) => Some(build_prolongation(coarse, &space)?),
                None => None,
            };
            levels.push(MgLevel::from_space(&space, sys.matrix.clone(), smoother, p)?);
            dirichlet = Some(sys);
            spaces.push(space);
        }
        Ok(Self {
            spaces,
            dirichlet: dirichlet.expect("hierarchy has at least one level"),
            mg: Multigrid::new(levels, config)?,
        })
    }

    /// Enables the zero-mean projection in the preconditioner.
    pub fn with_zero_mean(self, weights: Vec<f64>) -> Self {
        Self {
            mg: self.mg.with_zero_mean(weights),
            ..self
        }
    }

    pub fn space(&self) -> &FeSpace {
        self.spaces.last().unwrap()
    }

    pub fn space_mut(&mut self) -> &mut FeSpace {
        self.spaces.last_mut().unwrap()
    }

    /// The finest constrained operator.
    pub fn matrix(&self) -> &CsrMatrix {
        &self.mg.finest().a
    }

    /// Turns an assembled load vector into the constrained right-hand side
    /// with the finest space's current Dirichlet values.
    pub fn rhs(&self, load: &BlockVector) -> Result<Vec<f64>> {
        let space = self.space();
        let mut b = constrain_rhs(space, load)?.into_vec();
        self.dirichlet.apply_rhs(&mut b, space.dirichlet_values())?;
        Ok(b)
    }

    /// Solves with multigrid-preconditioned GMRES and expands hanging
    /// values. `x0` is a full field; its hanging entries are ignored.
    pub fn solve(
        &self,
        backend: &dyn Backend,
        load: &BlockVector,
        x0: Option<&BlockVector>,
        gmres_cfg: &GmresConfig,
    ) -> Result<(BlockVector, SolveRecord)> {
        let b = self.rhs(load)?;
        let rec = self.solve_constrained(backend, &b, x0.map(|x| x.as_slice()), gmres_cfg)?;
        let space = self.space();
        let mut x = BlockVector::from_vec(space.n_comp(), rec.x.clone())?;
        expand_hanging(space, &mut x);
        Ok((x, rec))
    }

    /// GMRES on an already constrained right-hand side.
    pub fn solve_constrained(
        &self,
        backend: &dyn Backend,
        b: &[f64],
        x0: Option<&[f64]>,
        gmres_cfg: &GmresConfig,
    ) -> Result<SolveRecord> {
        let a = self.matrix();
        let mask = &self.mg.finest().mask;
        let space = self.space();
        let x0 = x0.map(|x0| {
            let mut x = x0.to_vec();
            for (k, v) in x.iter_mut().enumerate() {
                if mask[k] && !space.is_dirichlet(k) {
                    *v = 0.0;
                }
            }
            for (&k, &v) in space.dirichlet_indices().iter().zip(space.dirichlet_values()) {
                x[k] = v;
            }
            x
        });
        let mut op = |x: &[f64], y: &mut [f64]| backend.spmv_flat(1.0, a, x, 0.0, y);
        let mut pre = |r: &[f64], z: &mut [f64]| self.mg.precondition(backend, r, z);
        gmres(backend, &mut op, Some(&mut pre), b, x0.as_deref(), gmres_cfg)
    }
}

/// Pure-Neumann variant: no Dirichlet rows, the right-hand side and every
/// preconditioned iterate are projected onto zero weighted mean.
pub fn solve_zero_mean(
    backend: &dyn Backend,
    problem: &LinearProblem,
    b: &[f64],
    weights: &[f64],
    gmres_cfg: &GmresConfig,
) -> Result<SolveRecord> {
    let mut rhs = b.to_vec();
    project_zero_mean(&mut rhs, None);
    let mut rec = problem.solve_constrained(backend, &rhs, None, gmres_cfg)?;
    project_zero_mean(&mut rec.x, Some(weights));
    Ok(rec)
}
