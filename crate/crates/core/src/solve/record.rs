//! Convergence histories as CSV.

use std::io::Write;
use std::path::Path;

use super::multigrid::SolveRecord;
use crate::error::{Error, Result};

/// Writes `iteration,residual` rows, one per history entry.
pub fn write_convergence<W: Write>(record: &SolveRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "residual"])?;
    for (i, r) in record.history.iter().enumerate() {
        w.write_record([i.to_string(), format!("{r:.17e}")])?;
    }
    w.flush().map_err(|e| Error::io("<convergence csv>", e))?;
    Ok(())
}

pub fn write_convergence_csv(record: &SolveRecord, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_convergence(record, std::io::BufWriter::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows() {
        let rec = SolveRecord {
            x: vec![],
            iterations: 1,
            final_residual: 0.5,
            converged: false,
            history: vec![1.0, 0.5],
        };
        let mut buf = Vec::new();
        write_convergence(&rec, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "iteration,residual");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1,5.0000"));
    }
}
