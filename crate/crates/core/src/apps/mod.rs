//! End-to-end drivers: transport-diffusion, linear elasticity and the
//! explicit pressure-correction Navier-Stokes solver.

pub mod elasticity;
pub mod navier_stokes;
pub mod timing;
pub mod transport;

pub use elasticity::{run_elasticity, ElasticityConfig, ElasticityResult};
pub use navier_stokes::{
    initial_pressure, ns_assemble, ns_momentum_step, ns_pressure_step, ns_pressure_update, run_driven_cavity,
    NavierStokesConfig, NavierStokesResult, NsDiagnostics, NsOperators,
};
pub use timing::{ReportKind, Timer, TimingReport, TimingRow, LINEAR_LABELS, NS_LABELS};
pub use transport::{
    forcing, run_transport_diffusion, theta_exact, ErrorRow, TransportDiffusionConfig, TransportDiffusionResult,
};

use crate::error::{Error, Result};
use crate::linalg::BlockVector;
use crate::solve::{GmresConfig, MgConfig, SolveRecord};

/// Linear solver parameters shared by all drivers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverSettings {
    pub mg: MgConfig,
    pub gmres: GmresConfig,
}

impl SolverSettings {
    /// Defaults for the cavity pressure solve: the graded mesh has
    /// stretched cells, so four smoothing sweeps instead of two.
    pub fn navier_stokes() -> Self {
        Self {
            mg: MgConfig {
                nu_pre: 4,
                nu_post: 4,
                ..MgConfig::default()
            },
            gmres: GmresConfig::default(),
        }
    }
}

/// Named fields at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub fields: Vec<(String, BlockVector)>,
}

impl Snapshot {
    pub fn new(step: usize, time: f64, fields: Vec<(String, BlockVector)>) -> Self {
        Self { step, time, fields }
    }
}

pub(crate) fn check_converged(rec: &SolveRecord, what: &str, step: usize) -> Result<()> {
    if rec.converged {
        Ok(())
    } else {
        Err(Error::Solver(format!(
            "{what}: GMRES did not converge at step {step} ({} iterations, relative residual {:.3e})",
            rec.iterations, rec.final_residual
        )))
    }
}
