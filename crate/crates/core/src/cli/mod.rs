//! Configuration, output writers and the run driver behind the `mgfem`
//! binary.

pub mod config;
pub mod report;
pub mod run;
pub mod vtk;

pub use config::{load_config, parse_config, Problem, RunConfig};
pub use report::{
    write_diagnostics, write_diagnostics_csv, write_displacements, write_displacements_csv, write_errors,
    write_errors_csv, write_timing, write_timing_report,
};
pub use run::{exit_code, run, RunSummary};
pub use vtk::{vtk_string, write_vtk};
