//! The kernel set every solver is written against.
//!
//! A backend supplies a handful of unchecked kernels; the trait's provided
//! methods validate shapes and inputs and then dispatch to them. Solvers
//! never touch matrix storage directly, so an accelerator port only needs
//! to implement the kernels.

use rayon::prelude::*;

use super::csr::CsrMatrix;
use super::diag::DiagOperator;
use super::vector::BlockVector;
use crate::error::{Error, Result};

/// How a scalar matrix acts on a multi-component vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Apply {
    /// The matrix is defined over the flattened `(node, comp)` index.
    Flat,
    /// The matrix is defined over nodes and acts on each component slice.
    PerComponent,
}

pub trait Backend: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;

    /// `y ← α A x + β y` where `x`, `y` hold `n_comp` interleaved slices and
    /// `A` acts on each slice. Shapes are already validated.
    fn spmv_kernel(&self, alpha: f64, a: &CsrMatrix, x: &[f64], beta: f64, y: &mut [f64], n_comp: usize);

    /// `y ← α Aᵀ x + β y`, same conventions as [`Backend::spmv_kernel`].
    fn spmv_transpose_kernel(
        &self,
        alpha: f64,
        a: &CsrMatrix,
        x: &[f64],
        beta: f64,
        y: &mut [f64],
        n_comp: usize,
    );

    fn dot_kernel(&self, x: &[f64], y: &[f64]) -> f64;

    fn axpy_kernel(&self, alpha: f64, x: &[f64], y: &mut [f64]);

    fn scale_kernel(&self, alpha: f64, x: &mut [f64]);

    /// `out_k = w_k x_k`.
    fn pointwise_mul_kernel(&self, w: &[f64], x: &[f64], out: &mut [f64]);

    /// `v[d][i*3+c] = u[i*3+d] * u[i*3+c]`.
    fn nodewise_products_kernel(&self, u: &[f64], v: [&mut [f64]; 3]);

    fn spmv(
        &self,
        alpha: f64,
        a: &CsrMatrix,
        x: &BlockVector,
        beta: f64,
        y: &mut BlockVector,
        mode: Apply,
    ) -> Result<()> {
        let nc = check_spmv(a.n_rows(), a.n_cols(), x, y, mode, beta, "spmv")?;
        self.spmv_kernel(alpha, a, x.as_slice(), beta, y.as_mut_slice(), nc);
        Ok(())
    }

    fn spmv_transpose(
        &self,
        alpha: f64,
        a: &CsrMatrix,
        x: &BlockVector,
        beta: f64,
        y: &mut BlockVector,
        mode: Apply,
    ) -> Result<()> {
        let nc = check_spmv(a.n_cols(), a.n_rows(), x, y, mode, beta, "spmv_transpose")?;
        self.spmv_transpose_kernel(alpha, a, x.as_slice(), beta, y.as_mut_slice(), nc);
        Ok(())
    }

    /// Slice form of [`Backend::spmv`] for flat operators.
    fn spmv_flat(&self, alpha: f64, a: &CsrMatrix, x: &[f64], beta: f64, y: &mut [f64]) -> Result<()> {
        self.spmv_components(alpha, a, x, beta, y, 1)
    }

    fn spmv_transpose_flat(
        &self,
        alpha: f64,
        a: &CsrMatrix,
        x: &[f64],
        beta: f64,
        y: &mut [f64],
    ) -> Result<()> {
        self.spmv_transpose_components(alpha, a, x, beta, y, 1)
    }

    /// Slice form of [`Backend::spmv`] applying a node-level matrix to each
    /// of `n_comp` interleaved components.
    fn spmv_components(
        &self,
        alpha: f64,
        a: &CsrMatrix,
        x: &[f64],
        beta: f64,
        y: &mut [f64],
        n_comp: usize,
    ) -> Result<()> {
        check_slices(a.n_rows() * n_comp, a.n_cols() * n_comp, x, y, beta, "spmv")?;
        self.spmv_kernel(alpha, a, x, beta, y, n_comp);
        Ok(())
    }

    fn spmv_transpose_components(
        &self,
        alpha: f64,
        a: &CsrMatrix,
        x: &[f64],
        beta: f64,
        y: &mut [f64],
        n_comp: usize,
    ) -> Result<()> {
        check_slices(a.n_cols() * n_comp, a.n_rows() * n_comp, x, y, beta, "spmv_transpose")?;
        self.spmv_transpose_kernel(alpha, a, x, beta, y, n_comp);
        Ok(())
    }

    fn dot(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len(x.len(), y.len(), "dot")?;
        Ok(self.dot_kernel(x, y))
    }

    fn norm2(&self, x: &[f64]) -> f64 {
        self.dot_kernel(x, x).sqrt()
    }

    fn axpy(&self, alpha: f64, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_len(x.len(), y.len(), "axpy")?;
        if alpha != 0.0 {
            self.axpy_kernel(alpha, x, y);
        }
        Ok(())
    }

    fn scale(&self, alpha: f64, x: &mut [f64]) {
        self.scale_kernel(alpha, x);
    }

    fn copy(&self, src: &[f64], dst: &mut [f64]) -> Result<()> {
        check_len(src.len(), dst.len(), "copy")?;
        dst.copy_from_slice(src);
        Ok(())
    }

    fn set_zero(&self, x: &mut [f64]) {
        x.fill(0.0);
    }

    /// `out = D^{-1} x` over the flattened index.
    fn diag_apply(&self, d: &DiagOperator, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(d.n(), x.len(), "diag_apply")?;
        check_len(x.len(), out.len(), "diag_apply")?;
        self.pointwise_mul_kernel(d.inv_values(), x, out);
        Ok(())
    }

    fn diag_apply_vec(&self, d: &DiagOperator, x: &BlockVector) -> Result<BlockVector> {
        let mut out = BlockVector::zeros(x.n_nodes(), x.n_comp());
        self.diag_apply(d, x.as_slice(), out.as_mut_slice())?;
        Ok(out)
    }

    /// The three node-wise outer-product vectors of a velocity field.
    fn nodewise_products(&self, u: &BlockVector) -> Result<[BlockVector; 3]> {
        if u.n_comp() != 3 {
            return Err(Error::ComponentCount {
                op: "nodewise_products",
                expected: 3,
                got: u.n_comp(),
            });
        }
        let n = u.n_nodes();
        let mut v = [BlockVector::zeros(n, 3), BlockVector::zeros(n, 3), BlockVector::zeros(n, 3)];
        {
            let [a, b, c] = &mut v;
            self.nodewise_products_kernel(
                u.as_slice(),
                [a.as_mut_slice(), b.as_mut_slice(), c.as_mut_slice()],
            );
        }
        Ok(v)
    }

    /// Places `p[j]` at `out[map[j]]`; every other entry of `out` is zeroed.
    fn space_scatter(&self, p: &[f64], map: &[usize], out: &mut [f64]) -> Result<()> {
        check_len(map.len(), p.len(), "space_scatter")?;
        out.fill(0.0);
        for (j, &k) in map.iter().enumerate() {
            if k >= out.len() {
                return Err(Error::OutOfRange {
                    op: "space_scatter",
                    index: k,
                    size: out.len(),
                });
            }
            out[k] = p[j];
        }
        Ok(())
    }

    /// `out[j] = v[map[j]]`.
    fn space_gather(&self, v: &[f64], map: &[usize], out: &mut [f64]) -> Result<()> {
        check_len(map.len(), out.len(), "space_gather")?;
        for (j, &k) in map.iter().enumerate() {
            if k >= v.len() {
                return Err(Error::OutOfRange {
                    op: "space_gather",
                    index: k,
                    size: v.len(),
                });
            }
            out[j] = v[k];
        }
        Ok(())
    }
}

fn check_len(expected: usize, got: usize, op: &'static str) -> Result<()> {
    if expected != got {
        return Err(Error::dim(op, expected, got));
    }
    Ok(())
}

fn check_finite(x: &[f64], op: &'static str) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { op, index }),
        None => Ok(()),
    }
}

fn check_slices(rows: usize, cols: usize, x: &[f64], y: &[f64], beta: f64, op: &'static str) -> Result<()> {
    check_len(cols, x.len(), op)?;
    check_len(rows, y.len(), op)?;
    check_finite(x, op)?;
    if beta != 0.0 {
        check_finite(y, op)?;
    }
    Ok(())
}

fn check_spmv(
    rows: usize,
    cols: usize,
    x: &BlockVector,
    y: &BlockVector,
    mode: Apply,
    beta: f64,
    op: &'static str,
) -> Result<usize> {
    if x.n_comp() != y.n_comp() {
        return Err(Error::ComponentCount {
            op,
            expected: x.n_comp(),
            got: y.n_comp(),
        });
    }
    let nc = match mode {
        Apply::Flat => 1,
        Apply::PerComponent => x.n_comp(),
    };
    check_len(cols * nc, x.len(), op)?;
    check_len(rows * nc, y.len(), op)?;
    check_finite(x.as_slice(), op)?;
    if beta != 0.0 {
        check_finite(y.as_slice(), op)?;
    }
    Ok(nc)
}

#[inline]
fn row_apply(a: &CsrMatrix, i: usize, x: &[f64], nc: usize, c: usize) -> f64 {
    let (cols, vals) = a.row(i);
    let mut s = 0.0;
    for (&j, &v) in cols.iter().zip(vals) {
        s += v * x[j * nc + c];
    }
    s
}

#[inline]
fn combine(alpha: f64, ax: f64, beta: f64, y: f64) -> f64 {
    if beta == 0.0 {
        alpha * ax
    } else {
        alpha * ax + beta * y
    }
}

/// Sequential reference implementation; the conformance baseline.
#[derive(Debug, Default, Clone, Copy)]
pub struct Reference;

impl Backend for Reference {
    fn name(&self) -> &'static str {
        "reference"
    }

    fn spmv_kernel(&self, alpha: f64, a: &CsrMatrix, x: &[f64], beta: f64, y: &mut [f64], nc: usize) {
        for i in 0..a.n_rows() {
            for c in 0..nc {
                let k = i * nc + c;
                y[k] = combine(alpha, row_apply(a, i, x, nc, c), beta, y[k]);
            }
        }
    }

    fn spmv_transpose_kernel(
        &self,
        alpha: f64,
        a: &CsrMatrix,
        x: &[f64],
        beta: f64,
        y: &mut [f64],
        nc: usize,
    ) {
        if beta == 0.0 {
            y.fill(0.0);
        } else if beta != 1.0 {
            y.iter_mut().for_each(|v| *v *= beta);
        }
        for i in 0..a.n_rows() {
            let (cols, vals) = a.row(i);
            for c in 0..nc {
                let xi = alpha * x[i * nc + c];
                if xi == 0.0 {
                    continue;
                }
                for (&j, &v) in cols.iter().zip(vals) {
                    y[j * nc + c] += v * xi;
                }
            }
        }
    }

    fn dot_kernel(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    fn axpy_kernel(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    }

    fn scale_kernel(&self, alpha: f64, x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v *= alpha);
    }

    fn pointwise_mul_kernel(&self, w: &[f64], x: &[f64], out: &mut [f64]) {
        for ((o, wi), xi) in out.iter_mut().zip(w).zip(x) {
            *o = wi * xi;
        }
    }

    fn nodewise_products_kernel(&self, u: &[f64], v: [&mut [f64]; 3]) {
        let [v0, v1, v2] = v;
        for (i, ui) in u.chunks_exact(3).enumerate() {
            for c in 0..3 {
                v0[i * 3 + c] = ui[0] * ui[c];
                v1[i * 3 + c] = ui[1] * ui[c];
                v2[i * 3 + c] = ui[2] * ui[c];
            }
        }
    }
}

/// Multithreaded backend on the rayon pool.
///
/// Reductions use a fixed chunk size, so results do not depend on the
/// number of threads. Row-parallel kernels are bit-identical to the
/// reference backend; dot products may differ in the last bits.
#[derive(Debug, Default, Clone, Copy)]
pub struct Threaded;

const PAR_MIN: usize = 4096;
const DOT_CHUNK: usize = 8192;

impl Backend for Threaded {
    fn name(&self) -> &'static str {
        "threaded"
    }

    fn spmv_kernel(&self, alpha: f64, a: &CsrMatrix, x: &[f64], beta: f64, y: &mut [f64], nc: usize) {
        if y.len() < PAR_MIN {
            return Reference.spmv_kernel(alpha, a, x, beta, y, nc);
        }
        y.par_chunks_mut(nc).enumerate().for_each(|(i, yi)| {
            for (c, yc) in yi.iter_mut().enumerate() {
                *yc = combine(alpha, row_apply(a, i, x, nc, c), beta, *yc);
            }
        });
    }

    fn spmv_transpose_kernel(
        &self,
        alpha: f64,
        a: &CsrMatrix,
        x: &[f64],
        beta: f64,
        y: &mut [f64],
        nc: usize,
    ) {
        if y.len() < PAR_MIN {
            return Reference.spmv_transpose_kernel(alpha, a, x, beta, y, nc);
        }
        // Row i of Aᵀ visits the original rows in increasing order, which is
        // the same accumulation order as the sequential scatter.
        let at = a.transpose();
        self.spmv_kernel(alpha, &at, x, beta, y, nc);
    }

    fn dot_kernel(&self, x: &[f64], y: &[f64]) -> f64 {
        if x.len() <= DOT_CHUNK {
            return Reference.dot_kernel(x, y);
        }
        let partial: Vec<f64> = x
            .par_chunks(DOT_CHUNK)
            .zip(y.par_chunks(DOT_CHUNK))
            .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>())
            .collect();
        partial.iter().sum()
    }

    fn axpy_kernel(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        if y.len() < PAR_MIN {
            return Reference.axpy_kernel(alpha, x, y);
        }
        y.par_iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    }

    fn scale_kernel(&self, alpha: f64, x: &mut [f64]) {
        if x.len() < PAR_MIN {
            return Reference.scale_kernel(alpha, x);
        }
        x.par_iter_mut().for_each(|v| *v *= alpha);
    }

    fn pointwise_mul_kernel(&self, w: &[f64], x: &[f64], out: &mut [f64]) {
        if out.len() < PAR_MIN {
            return Reference.pointwise_mul_kernel(w, x, out);
        }
        out.par_iter_mut()
            .zip(w)
            .zip(x)
            .for_each(|((o, wi), xi)| *o = wi * xi);
    }

    fn nodewise_products_kernel(&self, u: &[f64], v: [&mut [f64]; 3]) {
        if u.len() < PAR_MIN {
            return Reference.nodewise_products_kernel(u, v);
        }
        let [v0, v1, v2] = v;
        u.par_chunks_exact(3)
            .zip(v0.par_chunks_exact_mut(3))
            .zip(v1.par_chunks_exact_mut(3))
            .zip(v2.par_chunks_exact_mut(3))
            .for_each(|(((ui, a), b), c)| {
                for k in 0..3 {
                    a[k] = ui[0] * ui[k];
                    b[k] = ui[1] * ui[k];
                    c[k] = ui[2] * ui[k];
                }
            });
    }
}

/// Names accepted by [`backend_by_name`].
pub const BACKEND_NAMES: [&str; 2] = ["reference", "threaded"];

pub fn backend_by_name(name: &str) -> Option<Box<dyn Backend>> {
    match name {
        "reference" => Some(Box::new(Reference)),
        "threaded" => Some(Box::new(Threaded)),
        _ => None,
    }
}
