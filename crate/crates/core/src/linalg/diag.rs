use super::csr::CsrMatrix;
use crate::error::{Error, Result};

/// Diagonal operator stored by its inverse entries, so applying it is a
/// point-wise product. Used for lumped mass inverses and Jacobi smoothing.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagOperator {
    inv_values: Vec<f64>,
}

impl DiagOperator {
    /// Builds `D^{-1}` from the diagonal entries of `D`.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut inv_values = Vec::with_capacity(diag.len());
        for (row, &d) in diag.iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::NonFinite {
                    op: "DiagOperator::from_diagonal",
                    index: row,
                });
            }
            if d == 0.0 {
                return Err(Error::ZeroDiagonal { row });
            }
            let inv = 1.0 / d;
            if !inv.is_finite() {
                return Err(Error::ZeroDiagonal { row });
            }
            inv_values.push(inv);
        }
        Ok(Self { inv_values })
    }

    /// Builds the operator directly from inverse entries.
    pub fn from_inverse(inv_values: Vec<f64>) -> Result<Self> {
        if let Some(k) = inv_values.iter().position(|v| !v.is_finite() || *v == 0.0) {
            return Err(Error::NonFinite {
                op: "DiagOperator::from_inverse",
                index: k,
            });
        }
        Ok(Self { inv_values })
    }

    /// Inverse of the diagonal of `a`.
    pub fn from_matrix_diagonal(a: &CsrMatrix) -> Result<Self> {
        Self::from_diagonal(&a.diagonal())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inv_values: vec![1.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.inv_values.len()
    }

    pub fn inv_values(&self) -> &[f64] {
        &self.inv_values
    }

    /// The diagonal entries of `D` itself.
    pub fn diagonal(&self) -> Vec<f64> {
        self.inv_values.iter().map(|v| 1.0 / v).collect()
    }

    /// `D` as a CSR matrix.
    pub fn to_csr(&self) -> CsrMatrix {
        CsrMatrix::from_diagonal(&self.diagonal())
    }

    /// `D^{-1}` as a CSR matrix.
    pub fn inverse_to_csr(&self) -> CsrMatrix {
        CsrMatrix::from_diagonal(&self.inv_values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_diagonal_fails() {
        assert!(matches!(
            DiagOperator::from_diagonal(&[1.0, 0.0]),
            Err(Error::ZeroDiagonal { row: 1 })
        ));
    }

    #[test]
    fn stores_inverse() {
        let d = DiagOperator::from_diagonal(&[2.0, 4.0]).unwrap();
        assert_eq!(d.inv_values(), &[0.5, 0.25]);
        assert_eq!(d.diagonal(), vec![2.0, 4.0]);
    }
}
