//! Transport-diffusion on the unit square with a manufactured solution.

use std::f64::consts::PI;

use super::timing::{ReportKind, Timer, TimingReport};
use super::{check_converged, Snapshot, SolverSettings};
use crate::error::{Error, Result};
use crate::fem::{assemble_advection, assemble_mass, assemble_stiffness, l2_error, FeSpace};
use crate::linalg::{Backend, BlockVector, CsrMatrix};
use crate::mesh::{build_hierarchy, uniform_unit_box};
use crate::solve::{LinearProblem, SmootherKind};

#[derive(Debug, Clone, PartialEq)]
pub struct TransportDiffusionConfig {
    pub lambda: f64,
    pub b: [f64; 2],
    pub dt: f64,
    pub t_end: f64,
    /// Uniform mesh with `2^level` elements per side.
    pub level: usize,
    /// Keep every `snapshot_stride`-th step (and step 0); 0 keeps none.
    pub snapshot_stride: usize,
}

impl Default for TransportDiffusionConfig {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            b: [0.0, -1.0],
            dt: 0.02,
            t_end: 2.0,
            level: 5,
            snapshot_stride: 0,
        }
    }
}

impl TransportDiffusionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: key.into(),
                line: 0,
                message: message.into(),
            })
        };
        if !(self.lambda > 0.0) {
            return bad("td.lambda", "must be positive");
        }
        if !(self.dt > 0.0) {
            return bad("td.dt", "must be positive");
        }
        if !(self.t_end > 0.0) {
            return bad("td.t_end", "must be positive");
        }
        if !self.b.iter().all(|v| v.is_finite()) {
            return bad("td.b", "must be finite");
        }
        if self.level > 12 {
            return bad("td.level", "at most 12");
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// `m(t, z) = ½ + ¼ cos(πt/2) − z`.
pub fn m(t: f64, z: f64) -> f64 {
    0.5 + 0.25 * (0.5 * PI * t).cos() - z
}

/// The exact solution `exp(−¼(m(t,x)² + m(t,y)²))`.
pub fn theta_exact(t: f64, x: [f64; 3]) -> f64 {
    let (mx, my) = (m(t, x[0]), m(t, x[1]));
    (-0.25 * (mx * mx + my * my)).exp()
}

/// `f = ∂_tθ − λΔθ + b·∇θ` evaluated from the closed form.
pub fn forcing(lambda: f64, b: [f64; 2], t: f64, x: [f64; 3]) -> f64 {
    let (mx, my) = (m(t, x[0]), m(t, x[1]));
    let th = theta_exact(t, x);
    let mt = -PI / 8.0 * (0.5 * PI * t).sin();
    let dt = -0.5 * (mx + my) * mt;
    let lap = -1.0 + 0.25 * (mx * mx + my * my);
    let grad = 0.5 * (b[0] * mx + b[1] * my);
    th * (dt - lambda * lap + grad)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub step: usize,
    pub time: f64,
    pub l2: f64,
}

#[derive(Debug, Clone)]
pub struct TransportDiffusionResult {
    pub space: FeSpace,
    pub solution: BlockVector,
    pub errors: Vec<ErrorRow>,
    /// GMRES iterations per time step.
    pub iterations: Vec<usize>,
    pub snapshots: Vec<Snapshot>,
    pub timing: TimingReport,
}

/// Backward Euler with lumped mass:
/// `(M/dt + λK + B) θ^m = M f(t_m) + (M/dt) θ^{m−1}`, Dirichlet data from
/// the exact solution, solved by multigrid-preconditioned GMRES.
pub fn run_transport_diffusion(
    backend: &dyn Backend,
    cfg: &TransportDiffusionConfig,
    solver: &SolverSettings,
) -> Result<TransportDiffusionResult> {
    cfg.validate()?;
    let mut timer = Timer::new(ReportKind::Linear);
    let (lambda, bvec, dt) = (cfg.lambda, cfg.b, cfg.dt);

    let (mut problem, mass) = timer.time("init", |_| -> Result<_> {
        let mesh = uniform_unit_box(2, cfg.level);
        let hierarchy = build_hierarchy(&mesh, solver.mg.coarse_target);
        let problem = LinearProblem::new(
            &hierarchy,
            1,
            |s| s.set_dirichlet_boundary(|x, _| Some(theta_exact(0.0, x))),
            |s| {
                let (_, lumped) = assemble_mass(s)?;
                let m = CsrMatrix::from_diagonal(&lumped.diagonal());
                let k = assemble_stiffness(s, 1.0)?;
                let adv = assemble_advection(s, [bvec[0], bvec[1], 0.0])?;
                CsrMatrix::linear_combination(&[(1.0 / dt, &m), (lambda, &k), (1.0, &adv)])
            },
            SmootherKind::Jacobi,
            solver.mg.clone(),
        )?;
        let (_, lumped) = assemble_mass(problem.space())?;
        Ok((problem, lumped.diagonal()))
    })?;

    let space = problem.space().clone();
    let mut theta = space.interpolate(|x| vec![theta_exact(0.0, x)]);
    let mut errors = vec![ErrorRow {
        step: 0,
        time: 0.0,
        l2: l2_error(&space, &theta, |t, x| vec![theta_exact(t, x)], 0.0)?,
    }];
    let mut snapshots = Vec::new();
    let keep = |step: usize| cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0;
    if keep(0) {
        snapshots.push(Snapshot::new(0, 0.0, vec![("theta".into(), theta.clone())]));
    }
    let mut iterations = Vec::new();
    for step in 1..=cfg.n_steps() {
        let t = step as f64 * dt;
        let load = timer.time("rhs", |_| -> Result<BlockVector> {
            problem
                .space_mut()
                .update_dirichlet_values(|x, _| theta_exact(t, x));
            let vals: Vec<f64> = (0..space.n_nodes())
                .map(|i| mass[i] * (forcing(lambda, bvec, t, space.coords(i)) + theta.get(i, 0) / dt))
                .collect();
            BlockVector::scalar(vals)
        })?;
        let (x, rec) = timer.time("solve", |_| problem.solve(backend, &load, Some(&theta), &solver.gmres))?;
        check_converged(&rec, "transport-diffusion", step)?;
        iterations.push(rec.iterations);
        theta = x;
        errors.push(ErrorRow {
            step,
            time: t,
            l2: l2_error(&space, &theta, |t, x| vec![theta_exact(t, x)], t)?,
        });
        if keep(step) {
            snapshots.push(Snapshot::new(step, t, vec![("theta".into(), theta.clone())]));
        }
    }
    Ok(TransportDiffusionResult {
        space,
        solution: theta,
        errors,
        iterations,
        snapshots,
        timing: timer.report(),
    })
}
