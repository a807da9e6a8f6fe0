//! Right-preconditioned GMRES with modified Gram-Schmidt and Givens
//! rotations. No restarts: the Krylov space grows up to `max_krylov`.

use super::multigrid::SolveRecord;
use crate::error::{Error, Result};
use crate::linalg::Backend;

#[derive(Debug, Clone, PartialEq)]
pub struct GmresConfig {
    pub max_krylov: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            max_krylov: 50,
            rel_tol: 1e-8,
            abs_tol: 1e-14,
        }
    }
}

impl GmresConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: key.into(),
                line: 0,
                message: message.into(),
            })
        };
        if self.max_krylov < 1 {
            return bad("gmres.max_krylov", "must be at least 1");
        }
        if !(self.rel_tol > 0.0) {
            return bad("gmres.rel_tol", "must be positive");
        }
        if !(self.abs_tol >= 0.0) {
            return bad("gmres.abs_tol", "must be non-negative");
        }
        Ok(())
    }
}

/// A linear map `y = Op(x)`.
pub type LinearOp<'a> = dyn FnMut(&[f64], &mut [f64]) -> Result<()> + 'a;

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}

/// Solves `A x = b`. Converged when the residual norm is at most
/// `max(rel_tol‖b‖, abs_tol)`. `history` holds the residual norm before the
/// first step and after each one; `final_residual` is the true relative
/// residual of the returned iterate.
pub fn gmres(
    backend: &dyn Backend,
    apply_a: &mut LinearOp<'_>,
    mut precond: Option<&mut LinearOp<'_>>,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &GmresConfig,
) -> Result<SolveRecord> {
    cfg.validate()?;
    let n = b.len();
    let mut x = match x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        Some(x0) => return Err(Error::dim("gmres", n, x0.len())),
        None => vec![0.0; n],
    };
    let bnorm = backend.norm2(b);
    let tol = (cfg.rel_tol * bnorm).max(cfg.abs_tol);
    let rel = |r: f64| if bnorm > 0.0 { r / bnorm } else { r };

    let mut r = vec![0.0; n];
    apply_a(&x, &mut r)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let beta = backend.norm2(&r);
    if !beta.is_finite() {
        return Err(Error::NonFinite { op: "gmres", index: 0 });
    }
    let mut history = vec![beta];
    if beta <= tol {
        return Ok(SolveRecord {
            x,
            iterations: 0,
            final_residual: rel(beta),
            converged: true,
            history,
        });
    }

    let m = cfg.max_krylov;
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
    // Columns of the rotated Hessenberg matrix, each of length j + 2.
    let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut cs: Vec<(f64, f64)> = Vec::with_capacity(m);
    let mut g = vec![0.0; m + 1];
    g[0] = beta;
    backend.scale(1.0 / beta, &mut r);
    v.push(r);

    let mut k = 0;
    let mut res = beta;
    while k < m {
        let mut zk = vec![0.0; n];
        match precond.as_deref_mut() {
            Some(p) => p(&v[k], &mut zk)?,
            None => zk.copy_from_slice(&v[k]),
        }
        let mut w = vec![0.0; n];
        apply_a(&zk, &mut w)?;
        z.push(zk);

        let mut col = vec![0.0; k + 2];
        for (i, vi) in v.iter().enumerate() {
            let hij = backend.dot(&w, vi)?;
            col[i] = hij;
            backend.axpy(-hij, vi, &mut w)?;
        }
        let hnext = backend.norm2(&w);
        col[k + 1] = hnext;
        for (i, &(c, s)) in cs.iter().enumerate() {
            let (a, bb) = (col[i], col[i + 1]);
            col[i] = c * a + s * bb;
            col[i + 1] = -s * a + c * bb;
        }
        let (c, s) = givens(col[k], col[k + 1]);
        col[k] = c * col[k] + s * col[k + 1];
        col[k + 1] = 0.0;
        g[k + 1] = -s * g[k];
        g[k] *= c;
        cs.push((c, s));
        h.push(col);
        k += 1;
        res = g[k].abs();
        if !res.is_finite() {
            return Err(Error::NonFinite { op: "gmres", index: 0 });
        }
        history.push(res);
        let breakdown = hnext <= 1e-14 * beta;
        if res <= tol || breakdown {
            break;
        }
        backend.scale(1.0 / hnext, &mut w);
        v.push(w);
    }

    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for (j, yj) in y.iter().enumerate().skip(i + 1) {
            s -= h[j][i] * yj;
        }
        if h[i][i] == 0.0 {
            return Err(Error::Singular { column: i });
        }
        y[i] = s / h[i][i];
    }
    for (yi, zi) in y.iter().zip(&z) {
        backend.axpy(*yi, zi, &mut x)?;
    }

    let mut r = vec![0.0; n];
    apply_a(&x, &mut r)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let true_res = backend.norm2(&r);
    Ok(SolveRecord {
        x,
        iterations: k,
        final_residual: rel(true_res),
        converged: res <= tol || true_res <= tol,
        history,
    })
}
