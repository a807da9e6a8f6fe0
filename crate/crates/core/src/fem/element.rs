//! The Q1 reference element and its trilinear geometry mapping.

use crate::error::{Error, Result};

/// Tensor-product Gauss rule on the reference cell `[0,1]^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Two points per direction: exact for polynomials of degree 3 in each
    /// variable, which covers every Q1 integrand on affine cells.
    pub fn gauss2(dim: usize) -> Self {
        let g = 0.5 / 3f64.sqrt();
        Self::tensor(dim, &[0.5 - g, 0.5 + g], &[0.5, 0.5])
    }

    pub fn tensor(dim: usize, pts: &[f64], wts: &[f64]) -> Self {
        let n = pts.len();
        let count = n.pow(dim as u32);
        let mut points = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for k in 0..count {
            let mut p = [0.0; 3];
            let mut w = 1.0;
            let mut r = k;
            for pa in p.iter_mut().take(dim) {
                *pa = pts[r % n];
                w *= wts[r % n];
                r /= n;
            }
            points.push(p);
            weights.push(w);
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Q1 basis function of corner `c` at reference point `xi`.
#[inline]
pub fn q1_value(dim: usize, c: usize, xi: &[f64; 3]) -> f64 {
    let mut v = 1.0;
    for (a, &x) in xi.iter().enumerate().take(dim) {
        v *= if (c >> a) & 1 == 1 { x } else { 1.0 - x };
    }
    v
}

/// Reference gradient of the Q1 basis function of corner `c`.
#[inline]
pub fn q1_ref_grad(dim: usize, c: usize, xi: &[f64; 3]) -> [f64; 3] {
    let mut g = [0.0; 3];
    for (a, ga) in g.iter_mut().enumerate().take(dim) {
        let mut v = 1.0;
        for (b, &x) in xi.iter().enumerate().take(dim) {
            let bit = (c >> b) & 1 == 1;
            v *= if a == b {
                if bit {
                    1.0
                } else {
                    -1.0
                }
            } else if bit {
                x
            } else {
                1.0 - x
            };
        }
        *ga = v;
    }
    g
}

/// Basis values, physical gradients, position and integration weight at
/// one quadrature point of one element.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub phi: [f64; 8],
    pub grad: [[f64; 3]; 8],
    pub x: [f64; 3],
    /// Quadrature weight times the Jacobian determinant.
    pub jxw: f64,
}

/// Evaluates the element with corner coordinates `corners` at reference
/// point `xi`. Fails if the Jacobian determinant is not positive.
pub fn eval_point(
    dim: usize,
    corners: &[[f64; 3]; 8],
    xi: &[f64; 3],
    weight: f64,
    element: usize,
) -> Result<QuadPoint> {
    let nc = 1 << dim;
    let mut phi = [0.0; 8];
    let mut rg = [[0.0; 3]; 8];
    let mut x = [0.0; 3];
    let mut jac = [[0.0; 3]; 3];
    for c in 0..nc {
        phi[c] = q1_value(dim, c, xi);
        rg[c] = q1_ref_grad(dim, c, xi);
        for i in 0..dim {
            x[i] += phi[c] * corners[c][i];
            for j in 0..dim {
                jac[i][j] += corners[c][i] * rg[c][j];
            }
        }
    }
    let (det, inv) = invert(dim, &jac);
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::DegenerateElement { element, det });
    }
    let mut grad = [[0.0; 3]; 8];
    for c in 0..nc {
        // ∇φ = J^{-T} ∇̂φ̂
        for i in 0..dim {
            let mut s = 0.0;
            for j in 0..dim {
                s += inv[j][i] * rg[c][j];
            }
            grad[c][i] = s;
        }
    }
    Ok(QuadPoint {
        phi,
        grad,
        x,
        jxw: weight * det,
    })
}

fn invert(dim: usize, m: &[[f64; 3]; 3]) -> (f64, [[f64; 3]; 3]) {
    let mut inv = [[0.0; 3]; 3];
    if dim == 2 {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        inv[0][0] = m[1][1] / det;
        inv[0][1] = -m[0][1] / det;
        inv[1][0] = -m[1][0] / det;
        inv[1][1] = m[0][0] / det;
        return (det, inv);
    }
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    inv[0][0] = c00 / det;
    inv[1][0] = c01 / det;
    inv[2][0] = c02 / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    (det, inv)
}
