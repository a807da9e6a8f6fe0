//! Explicit pressure-correction solver for the lid-driven cavity.
//!
//! Velocity is Q1 on the once-refined mesh and pressure Q1 on the graded
//! cavity mesh. Each step: an explicit lumped-mass momentum update with
//! the interpolated nonlinearity, a pressure Poisson solve for the
//! increment `q`, and an explicit pressure update.

use super::timing::{ReportKind, Timer, TimingReport};
use super::{Snapshot, SolverSettings};
use crate::error::{Error, Result};
use crate::fem::{
    assemble_convection, assemble_gradient_coupling, assemble_gradient_load, assemble_mass, assemble_stiffness,
    FeSpace,
};
use crate::linalg::{Backend, BlockVector, CsrMatrix, DiagOperator, Reference, TripletBuilder};
use crate::mesh::{build_hierarchy, graded_tensor_mesh, HierMesh};
use crate::solve::{project_zero_mean, weighted_mean, GmresConfig, LinearProblem, MgConfig, SmootherKind, SolveRecord};

/// Cell counts of the pressure mesh for the full-size cavity run.
pub const PAPER_CELLS: [usize; 3] = [32, 32, 64];
/// Desk-scale default.
pub const DESK_CELLS: [usize; 3] = [8, 8, 16];

#[derive(Debug, Clone, PartialEq)]
pub struct NavierStokesConfig {
    pub re: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Pressure-mesh cells per axis.
    pub cells: [usize; 3],
    /// Velocity prescribed on the face `x = 1`.
    pub lid: [f64; 3],
    pub snapshot_stride: usize,
    /// Kinetic energy above this aborts the run.
    pub energy_limit: f64,
}

impl Default for NavierStokesConfig {
    fn default() -> Self {
        Self {
            re: 100.0,
            dt: 1e-3,
            t_end: 0.2,
            cells: DESK_CELLS,
            lid: [0.0, 1.0, 0.0],
            snapshot_stride: 0,
            energy_limit: 1e6,
        }
    }
}

impl NavierStokesConfig {
    /// Full-size cavity: Re = 1000 on the 32x32x64 mesh, 40 000 steps.
    pub fn paper_scale() -> Self {
        Self {
            re: 1e3,
            dt: 1e-4,
            t_end: 4.0,
            cells: PAPER_CELLS,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: key.into(),
                line: 0,
                message: message.into(),
            })
        };
        if !(self.re > 0.0) {
            return bad("ns.re", "must be positive");
        }
        if !(self.dt > 0.0) {
            return bad("ns.dt", "must be positive");
        }
        if !(self.t_end > 0.0) {
            return bad("ns.t_end", "must be positive");
        }
        if self.cells.iter().any(|&c| c < 2) {
            return bad("ns.cells", "need at least 2 cells per axis");
        }
        if !self.lid.iter().all(|v| v.is_finite()) {
            return bad("ns.lid", "must be finite");
        }
        if !(self.energy_limit > 0.0) {
            return bad("ns.energy_limit", "must be positive");
        }
        Ok(())
    }

    pub fn nu(&self) -> f64 {
        1.0 / self.re
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Everything assembled once before time stepping.
#[derive(Debug)]
pub struct NsOperators {
    pub velocity: FeSpace,
    pub pressure: FeSpace,
    pub nu: f64,
    /// Inverted lumped masses, node level.
    pub mv_inv: DiagOperator,
    pub mp_inv: DiagOperator,
    /// `ν K` on the velocity nodes, applied per component.
    pub kv: CsrMatrix,
    /// Pure-Neumann pressure Laplacian.
    pub kp: CsrMatrix,
    pub conv: [CsrMatrix; 3],
    pub grad: [CsrMatrix; 3],
    /// `G_x, G_y, G_z` interleaved: row `3i + c` is row `i` of `G_c`, so
    /// `G p` is a velocity field and `Gᵀ u = Σ_c G_cᵀ u_c`.
    pub grad_flat: CsrMatrix,
    /// Pressure solver with zero-mean projection.
    pub pressure_problem: LinearProblem,
    /// Lumped pressure mass, the weights of the zero-mean projection.
    pub pressure_weights: Vec<f64>,
}

fn interleave(grad: &[CsrMatrix; 3]) -> CsrMatrix {
    let (nv, np) = (grad[0].n_rows(), grad[0].n_cols());
    let mut b = TripletBuilder::with_capacity(3 * nv, np, grad.iter().map(|g| g.nnz()).sum());
    for i in 0..nv {
        for (c, g) in grad.iter().enumerate() {
            let (cols, vals) = g.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                b.add(3 * i + c, j, v);
            }
        }
    }
    b.build()
}

/// Marks the velocity Dirichlet set: `lid` on `x = 1`, zero elsewhere on
/// the boundary.
pub fn set_cavity_boundary(space: &mut FeSpace, lid: [f64; 3]) {
    let x_hi = space.mesh().axis_maps()[0].hi();
    space.set_dirichlet_boundary(|x, c| Some(if x[0] == x_hi { lid[c] } else { 0.0 }));
}

/// Builds the velocity and pressure spaces on the graded cavity mesh and
/// assembles every operator.
pub fn ns_assemble(cfg: &NavierStokesConfig, mg: &MgConfig) -> Result<NsOperators> {
    cfg.validate()?;
    let pmesh = graded_tensor_mesh(cfg.cells[0], cfg.cells[1], cfg.cells[2])?;
    ns_assemble_on(&pmesh, cfg.nu(), cfg.lid, mg)
}

/// [`ns_assemble`] on a given pressure mesh.
pub fn ns_assemble_on(pmesh: &HierMesh, nu: f64, lid: [f64; 3], mg: &MgConfig) -> Result<NsOperators> {
    if pmesh.dim() != 3 {
        return Err(Error::Unsupported("the cavity solver is three-dimensional".into()));
    }
    let vmesh = pmesh.uniform_refine();
    let mut velocity = FeSpace::new(&vmesh, 3)?;
    set_cavity_boundary(&mut velocity, lid);
    let vscalar = FeSpace::new(&vmesh, 1)?;
    let (_, mv) = assemble_mass(&vscalar)?;
    let kv = assemble_stiffness(&vscalar, nu)?;
    let conv = [
        assemble_convection(&vscalar, 0)?,
        assemble_convection(&vscalar, 1)?,
        assemble_convection(&vscalar, 2)?,
    ];

    let hierarchy = build_hierarchy(pmesh, mg.coarse_target);
    let pressure_problem = LinearProblem::new(
        &hierarchy,
        1,
        |_| {},
        |s| assemble_stiffness(s, 1.0),
        SmootherKind::StrongBlockJacobi,
        mg.clone(),
    )?;
    let pressure = pressure_problem.space().clone();
    let (_, mp) = assemble_mass(&pressure)?;
    let pressure_weights = mp.diagonal();
    let pressure_problem = pressure_problem.with_zero_mean(pressure_weights.clone());
    let kp = pressure_problem.matrix().clone();
    let grad = [
        assemble_gradient_coupling(&velocity, &pressure, 0)?,
        assemble_gradient_coupling(&velocity, &pressure, 1)?,
        assemble_gradient_coupling(&velocity, &pressure, 2)?,
    ];
    let grad_flat = interleave(&grad);
    Ok(NsOperators {
        velocity,
        pressure,
        nu,
        mv_inv: mv,
        mp_inv: mp,
        kv,
        kp,
        conv,
        grad,
        grad_flat,
        pressure_problem,
        pressure_weights,
    })
}

fn impose_dirichlet(space: &FeSpace, u: &mut BlockVector) {
    let s = u.as_mut_slice();
    for (&k, &v) in space.dirichlet_indices().iter().zip(space.dirichlet_values()) {
        s[k] = v;
    }
}

/// Discrete divergence `Σ_c G_cᵀ u_c` on the pressure nodes.
pub fn divergence(backend: &dyn Backend, ops: &NsOperators, u: &BlockVector) -> Result<Vec<f64>> {
    let mut d = vec![0.0; ops.pressure.n_nodes()];
    backend.spmv_transpose_flat(1.0, &ops.grad_flat, u.as_slice(), 0.0, &mut d)?;
    Ok(d)
}

/// `conv(u)_{·,c} = Σ_d C_d v^d_{·,c}` with `v^d = u_d u` node by node.
pub fn convection(backend: &dyn Backend, ops: &NsOperators, u: &BlockVector) -> Result<BlockVector> {
    let v = backend.nodewise_products(u)?;
    let mut out = BlockVector::zeros(u.n_nodes(), 3);
    for (d, vd) in v.iter().enumerate() {
        backend.spmv_components(1.0, &ops.conv[d], vd.as_slice(), 1.0, out.as_mut_slice(), 3)?;
    }
    Ok(out)
}

/// Step 1:
/// `u^m = u^{m−1} + dt M⁻¹[M f − νK u^{m−1} + conv(u^{m−1}) + G(p + q)]`,
/// then the Dirichlet values are re-imposed.
pub fn ns_momentum_step(
    backend: &dyn Backend,
    ops: &NsOperators,
    u_prev: &BlockVector,
    p_prev: &[f64],
    q_prev: &[f64],
    f: Option<&BlockVector>,
    dt: f64,
    timer: &mut Timer,
) -> Result<BlockVector> {
    let n = ops.velocity.n_nodes();
    if u_prev.n_nodes() != n || u_prev.n_comp() != 3 {
        return Err(Error::dim("ns_momentum_step", 3 * n, u_prev.len()));
    }
    let r = timer.time("mom-rhs", |timer| -> Result<BlockVector> {
        let mut r = timer.time("mom-rhs-nonlin", |_| convection(backend, ops, u_prev))?;
        timer.time("mom-rhs-p", |_| -> Result<()> {
            let pq: Vec<f64> = p_prev.iter().zip(q_prev).map(|(p, q)| p + q).collect();
            backend.spmv_flat(1.0, &ops.grad_flat, &pq, 1.0, r.as_mut_slice())
        })?;
        timer.time("mom-rhs-visc", |_| {
            backend.spmv_components(-1.0, &ops.kv, u_prev.as_slice(), 1.0, r.as_mut_slice(), 3)
        })?;
        if let Some(f) = f {
            let m = ops.mv_inv.diagonal();
            let s = r.as_mut_slice();
            for i in 0..n {
                for c in 0..3 {
                    s[3 * i + c] += m[i] * f.get(i, c);
                }
            }
        }
        Ok(r)
    })?;
    timer.time("mom-solve", |_| -> Result<BlockVector> {
        let inv = ops.mv_inv.inv_values();
        let mut u = u_prev.clone();
        let s = u.as_mut_slice();
        let rs = r.as_slice();
        for i in 0..n {
            for c in 0..3 {
                s[3 * i + c] += dt * inv[i] * rs[3 * i + c];
            }
        }
        impose_dirichlet(&ops.velocity, &mut u);
        Ok(u)
    })
}

/// Step 2: `K_p q = −(1/dt) Σ_c G_cᵀ u_c`, right-hand side and solution
/// projected onto zero lumped-mass mean.
pub fn ns_pressure_step(
    backend: &dyn Backend,
    ops: &NsOperators,
    u_new: &BlockVector,
    dt: f64,
    gmres_cfg: &GmresConfig,
    timer: &mut Timer,
) -> Result<(Vec<f64>, SolveRecord)> {
    let rhs = timer.time("pres-rhs", |_| -> Result<Vec<f64>> {
        let mut d = divergence(backend, ops, u_new)?;
        backend.scale(-1.0 / dt, &mut d);
        project_zero_mean(&mut d, None);
        Ok(d)
    })?;
    timer.time("pres-solve", |_| -> Result<(Vec<f64>, SolveRecord)> {
        let mut rec = ops.pressure_problem.solve_constrained(backend, &rhs, None, gmres_cfg)?;
        project_zero_mean(&mut rec.x, Some(&ops.pressure_weights));
        Ok((rec.x.clone(), rec))
    })
}

/// Step 3: `p^m = p^{m−1} + q^m − ν M_p⁻¹ Σ_c G_cᵀ u_c`, mean-projected.
pub fn ns_pressure_update(
    backend: &dyn Backend,
    ops: &NsOperators,
    p_prev: &[f64],
    q_new: &[f64],
    u_new: &BlockVector,
    nu: f64,
    timer: &mut Timer,
) -> Result<Vec<f64>> {
    let d = timer.time("pres-up.rhs", |_| divergence(backend, ops, u_new))?;
    timer.time("pres-up.solve", |_| -> Result<Vec<f64>> {
        let mut md = vec![0.0; d.len()];
        backend.diag_apply(&ops.mp_inv, &d, &mut md)?;
        let mut p: Vec<f64> = p_prev.iter().zip(q_new).map(|(p, q)| p + q).collect();
        backend.axpy(-nu, &md, &mut p)?;
        project_zero_mean(&mut p, Some(&ops.pressure_weights));
        Ok(p)
    })
}

/// Initial pressure from `(∇p⁰, ∇φ) = −(f⁰, ∇φ)`. Only a zero initial
/// velocity is supported; the remaining terms vanish then.
pub fn initial_pressure(
    backend: &dyn Backend,
    ops: &NsOperators,
    u0: Option<&BlockVector>,
    f0: Option<&dyn Fn([f64; 3]) -> [f64; 3]>,
    gmres_cfg: &GmresConfig,
) -> Result<Vec<f64>> {
    if let Some(u0) = u0 {
        if u0.max_abs() != 0.0 {
            return Err(Error::Unsupported(
                "initial pressure for a nonzero initial velocity".into(),
            ));
        }
    }
    let n = ops.pressure.n_nodes();
    let Some(f0) = f0 else {
        return Ok(vec![0.0; n]);
    };
    let load = assemble_gradient_load(&ops.pressure, f0)?;
    let mut rhs = load.into_vec();
    backend.scale(-1.0, &mut rhs);
    project_zero_mean(&mut rhs, None);
    let mut rec = ops.pressure_problem.solve_constrained(backend, &rhs, None, gmres_cfg)?;
    if !rec.converged {
        return Err(Error::Solver(format!(
            "initial pressure: GMRES did not converge ({} iterations)",
            rec.iterations
        )));
    }
    project_zero_mean(&mut rec.x, Some(&ops.pressure_weights));
    Ok(rec.x)
}

/// `½ uᵀ M_v u` with the lumped mass.
pub fn kinetic_energy(ops: &NsOperators, u: &BlockVector) -> f64 {
    let m = ops.mv_inv.diagonal();
    0.5 * (0..u.n_nodes())
        .map(|i| m[i] * u.node(i).iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
}

/// Largest deviation of the backend's node-wise products from the exact
/// outer products `u_i ⊗ u_i`.
pub fn nodal_identity_error(backend: &dyn Backend, u: &BlockVector) -> Result<f64> {
    let v = backend.nodewise_products(u)?;
    let mut worst: f64 = 0.0;
    for i in 0..u.n_nodes() {
        for (d, vd) in v.iter().enumerate() {
            for c in 0..3 {
                worst = worst.max((vd.get(i, c) - u.get(i, d) * u.get(i, c)).abs());
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsDiagnostics {
    pub step: usize,
    pub time: f64,
    pub kinetic_energy: f64,
    /// `‖Σ_c G_cᵀ u_c‖` of the momentum predictor.
    pub divergence: f64,
    pub gmres_iterations: usize,
    pub pressure_residual: f64,
    /// Lumped-mass weighted mean of `p^m`.
    pub pressure_mean: f64,
    pub nodal_identity_error: f64,
}

#[derive(Debug)]
pub struct NavierStokesResult {
    pub ops: NsOperators,
    pub velocity: BlockVector,
    pub pressure: Vec<f64>,
    pub diagnostics: Vec<NsDiagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub timing: TimingReport,
}

fn ns_snapshot(step: usize, t: f64, ops: &NsOperators, u: &BlockVector, p: &[f64]) -> Result<Snapshot> {
    // Pressure is shown on the velocity mesh by Q1 interpolation.
    let pv = ops.velocity_pressure(p)?;
    Ok(Snapshot::new(
        step,
        t,
        vec![("velocity".into(), u.clone()), ("pressure".into(), pv)],
    ))
}

impl NsOperators {
    /// Pressure values at the velocity nodes (Q1 interpolation from the
    /// coarser pressure mesh).
    pub fn velocity_pressure(&self, p: &[f64]) -> Result<BlockVector> {
        let vs = FeSpace::new(self.velocity.mesh(), 1)?;
        let prol = crate::fem::build_prolongation(&self.pressure, &vs)?;
        let mut out = vec![0.0; vs.n_nodes()];
        Reference.spmv_flat(1.0, &prol, p, 0.0, &mut out)?;
        BlockVector::scalar(out)
    }
}

/// The driven-cavity time loop (steps 1-3 per time step).
pub fn run_driven_cavity(
    backend: &dyn Backend,
    cfg: &NavierStokesConfig,
    solver: &SolverSettings,
) -> Result<NavierStokesResult> {
    cfg.validate()?;
    let mut timer = Timer::new(ReportKind::NavierStokes);
    let ops = timer.time("init", |_| ns_assemble(cfg, &solver.mg))?;
    let nu = ops.nu;
    let dt = cfg.dt;
    let mut u = ops.velocity.zeros();
    impose_dirichlet(&ops.velocity, &mut u);
    let mut p = initial_pressure(backend, &ops, None, None, &solver.gmres)?;
    let mut q = vec![0.0; p.len()];
    let keep = |step: usize| cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0;
    let mut snapshots = Vec::new();
    if keep(0) {
        snapshots.push(ns_snapshot(0, 0.0, &ops, &u, &p)?);
    }
    let mut diagnostics = Vec::with_capacity(cfg.n_steps());
    let abort = |step: usize, e: Error| match e {
        Error::NonFinite { .. } => Error::Solver(format!("driven cavity diverged at step {step}: {e}")),
        other => other,
    };
    for step in 1..=cfg.n_steps() {
        let t = step as f64 * dt;
        let identity = nodal_identity_error(backend, &u).map_err(|e| abort(step, e))?;
        let u_new = ns_momentum_step(backend, &ops, &u, &p, &q, None, dt, &mut timer).map_err(|e| abort(step, e))?;
        let div = divergence(backend, &ops, &u_new).map_err(|e| abort(step, e))?;
        let (q_new, rec) =
            ns_pressure_step(backend, &ops, &u_new, dt, &solver.gmres, &mut timer).map_err(|e| abort(step, e))?;
        if !rec.converged {
            return Err(Error::Solver(format!(
                "driven cavity: pressure GMRES did not converge at step {step} ({} iterations)",
                rec.iterations
            )));
        }
        let p_new = ns_pressure_update(backend, &ops, &p, &q_new, &u_new, nu, &mut timer).map_err(|e| abort(step, e))?;
        let energy = kinetic_energy(&ops, &u_new);
        if !energy.is_finite() || energy > cfg.energy_limit {
            return Err(Error::Solver(format!(
                "driven cavity diverged at step {step}: kinetic energy {energy:.3e}"
            )));
        }
        diagnostics.push(NsDiagnostics {
            step,
            time: t,
            kinetic_energy: energy,
            divergence: backend.norm2(&div),
            gmres_iterations: rec.iterations,
            pressure_residual: rec.final_residual,
            pressure_mean: weighted_mean(&p_new, Some(&ops.pressure_weights)),
            nodal_identity_error: identity,
        });
        u = u_new;
        p = p_new;
        q = q_new;
        if keep(step) {
            snapshots.push(ns_snapshot(step, t, &ops, &u, &p)?);
        }
    }
    Ok(NavierStokesResult {
        ops,
        velocity: u,
        pressure: p,
        diagnostics,
        snapshots,
        timing: timer.report(),
    })
}
