//! Smoothers, geometric multigrid, GMRES and the zero-mean projection.

pub mod gmres;
pub mod multigrid;
pub mod problem;
pub mod projection;
pub mod record;
pub mod smoother;

pub use gmres::{gmres, GmresConfig, LinearOp};
pub use multigrid::{mg_solve, v_cycle, MgConfig, MgLevel, Multigrid, SolveRecord};
pub use problem::{solve_zero_mean, LinearProblem};
pub use projection::{project_zero_mean, weighted_mean};
pub use record::{write_convergence, write_convergence_csv};
pub use smoother::{jacobi_smooth, smooth, Smoother, SmootherKind};
