//! Runs a configured problem and writes its outputs.

use std::path::{Path, PathBuf};

use super::config::{Problem, RunConfig};
use super::report::{write_diagnostics_csv, write_displacements_csv, write_errors_csv, write_timing_report};
use super::vtk::write_vtk;
use crate::apps::{run_driven_cavity, run_elasticity, run_transport_diffusion, Snapshot};
use crate::error::{Error, Result};
use crate::fem::FeSpace;
use crate::linalg::{backend_by_name, BlockVector};

/// Exit status: 2 for configuration errors, 3 for solver failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } => 2,
        Error::Solver(_) | Error::NonFinite { .. } | Error::Singular { .. } | Error::ZeroDiagonal { .. } => 3,
        _ => 1,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub problem: Problem,
    pub steps: usize,
    /// Every file written, in write order.
    pub files: Vec<PathBuf>,
}

struct Out<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Out<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    fn snapshots(&mut self, prefix: &str, space: &FeSpace, snaps: &[Snapshot]) -> Result<()> {
        for s in snaps {
            let p = self.path(&format!("{prefix}_{:06}.vtk", s.step));
            write_vtk(space, &s.fields, p)?;
        }
        Ok(())
    }

    fn vtk(&mut self, name: &str, space: &FeSpace, fields: &[(String, BlockVector)]) -> Result<()> {
        let p = self.path(name);
        write_vtk(space, fields, p)
    }
}

/// Runs the problem and writes CSV tables, VTK snapshots and the final
/// state under `cfg.out_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let backend = backend_by_name(&cfg.backend).ok_or_else(|| Error::Config {
        key: "backend".into(),
        line: 0,
        message: format!("unknown backend `{}`", cfg.backend),
    })?;
    let dir = cfg.out_dir.as_path();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Out { dir, files: Vec::new() };
    let stride = cfg.snapshot_stride;
    let steps = match cfg.problem {
        Problem::TransportDiffusion => {
            let td = crate::apps::TransportDiffusionConfig {
                snapshot_stride: stride,
                ..cfg.td.clone()
            };
            let r = run_transport_diffusion(backend.as_ref(), &td, &cfg.solver)?;
            let p = out.path("errors.csv");
            write_errors_csv(&r.errors, &r.iterations, p)?;
            let p = out.path("timing.csv");
            write_timing_report(&r.timing, p)?;
            out.snapshots("theta", &r.space, &r.snapshots)?;
            out.vtk("solution.vtk", &r.space, &[("theta".into(), r.solution.clone())])?;
            r.iterations.len()
        }
        Problem::Elasticity => {
            let el = crate::apps::ElasticityConfig {
                snapshot_stride: stride,
                ..cfg.elasticity.clone()
            };
            let r = run_elasticity(backend.as_ref(), &el, &cfg.solver)?;
            let p = out.path("displacement.csv");
            write_displacements_csv(el.dt, &r.max_displacement, &r.iterations, p)?;
            let p = out.path("timing.csv");
            write_timing_report(&r.timing, p)?;
            out.snapshots("elasticity", &r.space, &r.snapshots)?;
            let (u, v) = crate::apps::elasticity::split_fields(&r.solution);
            out.vtk("solution.vtk", &r.space, &[("displacement".into(), u), ("velocity".into(), v)])?;
            r.iterations.len()
        }
        Problem::DrivenCavity => {
            let ns = crate::apps::NavierStokesConfig {
                snapshot_stride: stride,
                ..cfg.ns.clone()
            };
            let r = run_driven_cavity(backend.as_ref(), &ns, &cfg.solver)?;
            let p = out.path("diagnostics.csv");
            write_diagnostics_csv(&r.diagnostics, p)?;
            let p = out.path("timing.csv");
            write_timing_report(&r.timing, p)?;
            let vspace = FeSpace::new(r.ops.velocity.mesh(), 1)?;
            out.snapshots("cavity", &vspace, &r.snapshots)?;
            let pv = r.ops.velocity_pressure(&r.pressure)?;
            out.vtk(
                "solution.vtk",
                &vspace,
                &[("velocity".into(), r.velocity.clone()), ("pressure".into(), pv)],
            )?;
            r.diagnostics.len()
        }
    };
    Ok(RunSummary {
        problem: cfg.problem,
        steps,
        files: out.files,
    })
}
