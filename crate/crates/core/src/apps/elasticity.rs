//! Linear elasticity on the unit cube as a first-order system in
//! displacement `u` and velocity `v`, on adaptively refined meshes.

use super::timing::{ReportKind, Timer, TimingReport};
use super::{check_converged, Snapshot, SolverSettings};
use crate::error::{Error, Result};
use crate::fem::{assemble_elasticity, assemble_mass, FeSpace};
use crate::linalg::{Backend, BlockVector, CsrMatrix, TripletBuilder};
use crate::mesh::{build_hierarchy, refine_toward, uniform_unit_box, HierMesh, Pattern, DEFAULT_LAYERS};
use crate::solve::{LinearProblem, SmootherKind};

/// Unknowns per node: three displacement and three velocity components.
pub const N_COMP: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityConfig {
    pub lambda: f64,
    pub mu: f64,
    pub f: [f64; 3],
    pub dt: f64,
    pub t_end: f64,
    pub pattern: Pattern,
    /// Mesh level; level 1 is the uniform mesh with 8 elements per side.
    pub level: usize,
    pub snapshot_stride: usize,
}

impl Default for ElasticityConfig {
    fn default() -> Self {
        Self {
            lambda: 8e4,
            mu: 2e4,
            f: [0.0, -1.0, 0.0],
            dt: 0.025,
            t_end: 2.5,
            pattern: Pattern::Edge,
            level: 2,
            snapshot_stride: 0,
        }
    }
}

impl ElasticityConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: key.into(),
                line: 0,
                message: message.into(),
            })
        };
        if !(self.mu > 0.0) {
            return bad("elasticity.mu", "must be positive");
        }
        if !(self.lambda >= 0.0) {
            return bad("elasticity.lambda", "must be non-negative");
        }
        if !(self.dt > 0.0) {
            return bad("elasticity.dt", "must be positive");
        }
        if !(self.t_end > 0.0) {
            return bad("elasticity.t_end", "must be positive");
        }
        if !self.f.iter().all(|v| v.is_finite()) {
            return bad("elasticity.f", "must be finite");
        }
        if self.level < 1 || self.level > 8 {
            return bad("elasticity.level", "must lie in 1..=8");
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn mesh(&self) -> HierMesh {
        refine_toward(
            &uniform_unit_box(3, 3),
            &self.pattern.default_target(3),
            DEFAULT_LAYERS,
            self.level,
        )
    }
}

/// Backward Euler block operator on a 6-component space, before
/// constraints:
///
/// ```text
/// [ M/dt   -M  ] [u]
/// [ K_e   M/dt ] [v]
/// ```
///
/// with `M` the lumped mass and `K_e` the elasticity operator.
pub fn block_operator(space: &FeSpace, lambda: f64, mu: f64, dt: f64) -> Result<CsrMatrix> {
    if space.n_comp() != N_COMP || space.dim() != 3 {
        return Err(Error::ComponentCount {
            op: "elasticity block operator",
            expected: N_COMP,
            got: space.n_comp(),
        });
    }
    let disp = FeSpace::new(space.mesh(), 3)?;
    let k = assemble_elasticity(&disp, lambda, mu)?;
    let (_, lumped) = assemble_mass(&disp)?;
    let m = lumped.diagonal();
    let n = space.n_dofs();
    let mut b = TripletBuilder::with_capacity(n, n, k.nnz() + 4 * n);
    for node in 0..space.n_nodes() {
        let base = node * N_COMP;
        for c in 0..3 {
            b.add(base + c, base + c, m[node] / dt);
            b.add(base + c, base + 3 + c, -m[node]);
            let (cols, vals) = k.row(node * 3 + c);
            for (&j, &v) in cols.iter().zip(vals) {
                b.add(base + 3 + c, (j / 3) * N_COMP + j % 3, v);
            }
            b.add(base + 3 + c, base + 3 + c, m[node] / dt);
        }
    }
    Ok(b.build())
}

#[derive(Debug, Clone)]
pub struct ElasticityResult {
    pub space: FeSpace,
    /// Node-major `(u, v)` field.
    pub solution: BlockVector,
    /// Largest displacement component after each step.
    pub max_displacement: Vec<f64>,
    pub iterations: Vec<usize>,
    pub snapshots: Vec<Snapshot>,
    pub timing: TimingReport,
}

/// Splits a 6-component field into displacement and velocity.
pub fn split_fields(x: &BlockVector) -> (BlockVector, BlockVector) {
    let n = x.n_nodes();
    let (mut u, mut v) = (BlockVector::zeros(n, 3), BlockVector::zeros(n, 3));
    for i in 0..n {
        for c in 0..3 {
            u.set(i, c, x.get(i, c));
            v.set(i, c, x.get(i, 3 + c));
        }
    }
    (u, v)
}

fn snapshot(step: usize, t: f64, x: &BlockVector) -> Snapshot {
    let (u, v) = split_fields(x);
    Snapshot::new(step, t, vec![("displacement".into(), u), ("velocity".into(), v)])
}

/// Per step: `(M/dt)u − Mv = (M/dt)u⁻`, `K_e u + (M/dt)v = (M/dt)v⁻ + M f`,
/// homogeneous Dirichlet data for both fields, zero initial state.
pub fn run_elasticity(backend: &dyn Backend, cfg: &ElasticityConfig, solver: &SolverSettings) -> Result<ElasticityResult> {
    cfg.validate()?;
    let mut timer = Timer::new(ReportKind::Linear);
    let (lambda, mu, dt) = (cfg.lambda, cfg.mu, cfg.dt);
    let (problem, mass) = timer.time("init", |_| -> Result<_> {
        let hierarchy = build_hierarchy(&cfg.mesh(), solver.mg.coarse_target);
        let problem = LinearProblem::new(
            &hierarchy,
            N_COMP,
            |s| s.set_dirichlet_boundary(|_, _| Some(0.0)),
            |s| block_operator(s, lambda, mu, dt),
            SmootherKind::BlockJacobi,
            solver.mg.clone(),
        )?;
        let (_, lumped) = assemble_mass(&FeSpace::new(problem.space().mesh(), 1)?)?;
        Ok((problem, lumped.diagonal()))
    })?;
    let space = problem.space().clone();
    let mut x = space.zeros();
    let keep = |step: usize| cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0;
    let mut snapshots = Vec::new();
    if keep(0) {
        snapshots.push(snapshot(0, 0.0, &x));
    }
    let (mut max_displacement, mut iterations) = (Vec::new(), Vec::new());
    for step in 1..=cfg.n_steps() {
        let t = step as f64 * dt;
        let load = timer.time("rhs", |_| -> Result<BlockVector> {
            let mut load = space.zeros();
            for i in 0..space.n_nodes() {
                for c in 0..3 {
                    load.set(i, c, mass[i] / dt * x.get(i, c));
                    load.set(i, 3 + c, mass[i] * (x.get(i, 3 + c) / dt + cfg.f[c]));
                }
            }
            Ok(load)
        })?;
        let (next, rec) = timer.time("solve", |_| problem.solve(backend, &load, Some(&x), &solver.gmres))?;
        check_converged(&rec, "elasticity", step)?;
        iterations.push(rec.iterations);
        x = next;
        let (u, _) = split_fields(&x);
        max_displacement.push(u.max_abs());
        if keep(step) {
            snapshots.push(snapshot(step, t, &x));
        }
    }
    Ok(ElasticityResult {
        space,
        solution: x,
        max_displacement,
        iterations,
        snapshots,
        timing: timer.report(),
    })
}
