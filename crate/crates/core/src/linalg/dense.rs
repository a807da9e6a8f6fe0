//! Dense LU with partial pivoting, used as the reference oracle for the
//! iterative solvers on small systems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solves `A x = b` for a row-major `n × n` matrix.
pub fn dense_lu_solve(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n * n {
        return Err(Error::dim("dense_lu_solve", n * n, a.len()));
    }
    if let Some(k) = a.iter().chain(b).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            op: "dense_lu_solve",
            index: k,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = DMatrix::from_row_slice(n, n, a);
    let scale = a.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    let lu = m.lu();
    let u = lu.u();
    let tol = scale * f64::EPSILON * n as f64;
    for i in 0..n {
        if u[(i, i)].abs() <= tol {
            return Err(Error::Singular { column: i });
        }
    }
    let x = lu
        .solve(&DVector::from_column_slice(b))
        .ok_or(Error::Singular { column: n - 1 })?;
    Ok(x.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(dense_lu_solve(&[1.0, 0.0, 0.0, 1.0], &[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        assert_eq!(dense_lu_solve(&[2.0, 0.0, 0.0, 4.0], &[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
        let x = dense_lu_solve(&[2.0, 1.0, 1.0, 2.0], &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular() {
        assert!(matches!(
            dense_lu_solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0]),
            Err(Error::Singular { .. })
        ));
    }
}
