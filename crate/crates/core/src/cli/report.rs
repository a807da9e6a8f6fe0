//! CSV tables: error histories, time-step diagnostics and timing reports.

use std::io::Write;
use std::path::Path;

use crate::apps::{ErrorRow, NsDiagnostics, TimingReport};
use crate::error::{Error, Result};

fn finish<W: Write>(mut w: csv::Writer<W>, what: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(what, e))
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufWriter::new(f))
}

/// `label,seconds,count` in the report's fixed bucket order.
pub fn write_timing<W: Write>(report: &TimingReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "seconds", "count"])?;
    for row in &report.rows {
        w.write_record([row.label.to_string(), format!("{:.9}", row.seconds), row.count.to_string()])?;
    }
    finish(w, "<timing csv>")
}

pub fn write_timing_report(report: &TimingReport, path: impl AsRef<Path>) -> Result<()> {
    write_timing(report, create(path.as_ref())?)
}

/// `step,time,l2_error,gmres_iterations`; step 0 has no solve.
pub fn write_errors<W: Write>(rows: &[ErrorRow], iterations: &[usize], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "time", "l2_error", "gmres_iterations"])?;
    for r in rows {
        let its = r.step.checked_sub(1).and_then(|k| iterations.get(k)).copied().unwrap_or(0);
        w.write_record([r.step.to_string(), format!("{:e}", r.time), format!("{:e}", r.l2), its.to_string()])?;
    }
    finish(w, "<error csv>")
}

pub fn write_errors_csv(rows: &[ErrorRow], iterations: &[usize], path: impl AsRef<Path>) -> Result<()> {
    write_errors(rows, iterations, create(path.as_ref())?)
}

/// `step,time,max_displacement,gmres_iterations` for the elasticity runs.
pub fn write_displacements<W: Write>(dt: f64, max_displacement: &[f64], iterations: &[usize], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "time", "max_displacement", "gmres_iterations"])?;
    for (k, (u, its)) in max_displacement.iter().zip(iterations).enumerate() {
        let step = k + 1;
        w.write_record([
            step.to_string(),
            format!("{:e}", step as f64 * dt),
            format!("{u:e}"),
            its.to_string(),
        ])?;
    }
    finish(w, "<displacement csv>")
}

pub fn write_displacements_csv(
    dt: f64,
    max_displacement: &[f64],
    iterations: &[usize],
    path: impl AsRef<Path>,
) -> Result<()> {
    write_displacements(dt, max_displacement, iterations, create(path.as_ref())?)
}

pub fn write_diagnostics<W: Write>(rows: &[NsDiagnostics], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "step",
        "time",
        "kinetic_energy",
        "divergence",
        "gmres_iterations",
        "pressure_residual",
        "pressure_mean",
        "nodal_identity_error",
    ])?;
    for d in rows {
        w.write_record([
            d.step.to_string(),
            format!("{:e}", d.time),
            format!("{:e}", d.kinetic_energy),
            format!("{:e}", d.divergence),
            d.gmres_iterations.to_string(),
            format!("{:e}", d.pressure_residual),
            format!("{:e}", d.pressure_mean),
            format!("{:e}", d.nodal_identity_error),
        ])?;
    }
    finish(w, "<diagnostics csv>")
}

pub fn write_diagnostics_csv(rows: &[NsDiagnostics], path: impl AsRef<Path>) -> Result<()> {
    write_diagnostics(rows, create(path.as_ref())?)
}
