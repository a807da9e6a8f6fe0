//! Element-by-element assembly of every matrix the solvers consume.
//!
//! Element contributions are merged in ascending element order, so the
//! assembled matrices are reproducible bit for bit.

use super::element::{eval_point, q1_value, QuadPoint, QuadratureRule};
use super::space::FeSpace;
use crate::error::{Error, Result};
use crate::linalg::{BlockVector, CsrMatrix, DiagOperator, TripletBuilder};

/// Runs `local(q, out)` at every quadrature point of every element and
/// scatters the `(nc·2^d)²` local matrix into the global flattened system.
fn assemble_local<F>(space: &FeSpace, nc: usize, mut local: F) -> Result<CsrMatrix>
where
    F: FnMut(&QuadPoint, &mut [f64]),
{
    let topo = space.topology();
    let dim = topo.dim;
    let nv = topo.n_corners();
    let nl = nv * nc;
    let quad = QuadratureRule::gauss2(dim);
    let n = topo.n_nodes() * nc;
    let mut b = TripletBuilder::with_capacity(n, n, topo.n_elements() * nl * nl);
    let mut mat = vec![0.0; nl * nl];
    for k in 0..topo.n_elements() {
        let corners = topo.element_coords(k);
        mat.fill(0.0);
        for (xi, &w) in quad.points.iter().zip(&quad.weights) {
            let q = eval_point(dim, &corners, xi, w, topo.elements[k])?;
            local(&q, &mut mat);
        }
        let nodes = &topo.elem_nodes[k];
        for a in 0..nv {
            for c in 0..nc {
                let row = nodes[a] * nc + c;
                for bb in 0..nv {
                    for d in 0..nc {
                        b.add(row, nodes[bb] * nc + d, mat[(a * nc + c) * nl + bb * nc + d]);
                    }
                }
            }
        }
    }
    Ok(b.build())
}

/// Consistent mass `M_ij = ∫ φ_j φ_i` (scalar, node level) and its lumped
/// diagonal, stored inverted.
pub fn assemble_mass(space: &FeSpace) -> Result<(CsrMatrix, DiagOperator)> {
    let nv = space.topology().n_corners();
    let m = assemble_local(space, 1, |q, out| {
        for a in 0..nv {
            for b in 0..nv {
                out[a * nv + b] += q.jxw * (q.phi[a] * q.phi[b]);
            }
        }
    })?;
    let lumped = lumped_from(&m)?;
    Ok((m, lumped))
}

/// Row sums of a mass matrix as an inverted diagonal operator.
pub fn lumped_from(m: &CsrMatrix) -> Result<DiagOperator> {
    let sums: Vec<f64> = (0..m.n_rows()).map(|i| m.row(i).1.iter().sum()).collect();
    DiagOperator::from_diagonal(&sums)
}

/// `K_ij = coeff · ∫ ∇φ_j · ∇φ_i`.
pub fn assemble_stiffness(space: &FeSpace, coeff: f64) -> Result<CsrMatrix> {
    let nv = space.topology().n_corners();
    let dim = space.dim();
    assemble_local(space, 1, |q, out| {
        for a in 0..nv {
            for b in 0..nv {
                let mut g = 0.0;
                for i in 0..dim {
                    g += q.grad[a][i] * q.grad[b][i];
                }
                out[a * nv + b] += q.jxw * (coeff * g);
            }
        }
    })
}

/// `B_ij = ∫ (b · ∇φ_j) φ_i`.
pub fn assemble_advection(space: &FeSpace, bvec: [f64; 3]) -> Result<CsrMatrix> {
    let nv = space.topology().n_corners();
    let dim = space.dim();
    assemble_local(space, 1, |q, out| {
        for a in 0..nv {
            for b in 0..nv {
                let mut g = 0.0;
                for i in 0..dim {
                    g += bvec[i] * q.grad[b][i];
                }
                out[a * nv + b] += q.jxw * (g * q.phi[a]);
            }
        }
    })
}

/// `C_d[i,j] = ∫ φ_j ∂_d φ_i`.
pub fn assemble_convection(space: &FeSpace, d: usize) -> Result<CsrMatrix> {
    if d >= space.dim() {
        return Err(Error::OutOfRange {
            op: "assemble_convection",
            index: d,
            size: space.dim(),
        });
    }
    let nv = space.topology().n_corners();
    assemble_local(space, 1, |q, out| {
        for a in 0..nv {
            for b in 0..nv {
                out[a * nv + b] += q.jxw * (q.phi[b] * q.grad[a][d]);
            }
        }
    })
}

/// Linear elasticity over the flattened `(node, comp)` index:
/// `K[(a,c),(b,d)] = ∫ λ ∂_cφ_a ∂_dφ_b + μ ∂_dφ_a ∂_cφ_b + μ δ_cd ∇φ_a·∇φ_b`.
pub fn assemble_elasticity(space: &FeSpace, lambda: f64, mu: f64) -> Result<CsrMatrix> {
    let dim = space.dim();
    if space.n_comp() != dim {
        return Err(Error::ComponentCount {
            op: "assemble_elasticity",
            expected: dim,
            got: space.n_comp(),
        });
    }
    let nv = space.topology().n_corners();
    let nl = nv * dim;
    assemble_local(space, dim, |q, out| {
        for a in 0..nv {
            let ga = &q.grad[a];
            for b in 0..nv {
                let gb = &q.grad[b];
                let mut dot = 0.0;
                for i in 0..dim {
                    dot += ga[i] * gb[i];
                }
                for c in 0..dim {
                    for d in 0..dim {
                        let mut v = lambda * (ga[c] * gb[d]) + mu * (ga[d] * gb[c]);
                        if c == d {
                            v += mu * dot;
                        }
                        out[(a * dim + c) * nl + b * dim + d] += q.jxw * v;
                    }
                }
            }
        }
    })
}

/// `G_c[i,j] = ∫ ψ_j ∂_c φ_i` with `φ` the velocity basis on the refined
/// mesh and `ψ` the pressure basis on its parent mesh. The divergence
/// coupling is the transpose.
///
/// Integration runs over the fine elements; the coarse basis is evaluated
/// in each fine element's parent, which must be an axis-aligned box.
pub fn assemble_gradient_coupling(vel: &FeSpace, pres: &FeSpace, c: usize) -> Result<CsrMatrix> {
    let dim = vel.dim();
    if c >= dim {
        return Err(Error::OutOfRange {
            op: "assemble_gradient_coupling",
            index: c,
            size: dim,
        });
    }
    let (vm, pm) = (vel.mesh(), pres.mesh());
    if !vm.ids_compatible_with(pm) || pres.dim() != dim {
        return Err(Error::InvalidMesh(
            "velocity mesh is not a refinement of the pressure mesh".into(),
        ));
    }
    let vt = vel.topology();
    let pt = pres.topology();
    let nv = vt.n_corners();
    let quad = QuadratureRule::gauss2(dim);
    let mut b = TripletBuilder::with_capacity(vt.n_nodes(), pt.n_nodes(), vt.n_elements() * nv * nv);
    for k in 0..vt.n_elements() {
        let e = vt.elements[k];
        let parent = vm
            .element(e)
            .parent
            .filter(|&p| pm.state(p) == crate::mesh::ElemState::Active)
            .ok_or_else(|| {
                Error::InvalidMesh(format!("velocity element {e} has no active parent in the pressure mesh"))
            })?;
        let pnodes: Vec<usize> = vm
            .element(parent)
            .corners(dim)
            .iter()
            .map(|&n| pt.local(n).expect("parent corner is a pressure node"))
            .collect();
        let lo = pt.coords[pnodes[0]];
        let mut ext = [1.0; 3];
        for (a, e) in ext.iter_mut().enumerate().take(dim) {
            *e = pt.coords[pnodes[1 << a]][a] - lo[a];
        }
        let corners = vt.element_coords(k);
        let mut mat = vec![0.0; nv * nv];
        for (xi, &w) in quad.points.iter().zip(&quad.weights) {
            let q = eval_point(dim, &corners, xi, w, e)?;
            let mut eta = [0.0; 3];
            for a in 0..dim {
                eta[a] = (q.x[a] - lo[a]) / ext[a];
            }
            for a in 0..nv {
                for j in 0..nv {
                    mat[a * nv + j] += q.jxw * (q1_value(dim, j, &eta) * q.grad[a][c]);
                }
            }
        }
        let vnodes = &vt.elem_nodes[k];
        for a in 0..nv {
            for j in 0..nv {
                b.add(vnodes[a], pnodes[j], mat[a * nv + j]);
            }
        }
    }
    Ok(b.build())
}

/// Load vector `F_{i,c} = ∫ f_c φ_i` for a callable right-hand side.
pub fn assemble_load(space: &FeSpace, f: impl Fn([f64; 3]) -> Vec<f64>) -> Result<BlockVector> {
    let topo = space.topology();
    let dim = topo.dim;
    let nv = topo.n_corners();
    let nc = space.n_comp();
    let quad = QuadratureRule::gauss2(dim);
    let mut out = space.zeros();
    for k in 0..topo.n_elements() {
        let corners = topo.element_coords(k);
        for (xi, &w) in quad.points.iter().zip(&quad.weights) {
            let q = eval_point(dim, &corners, xi, w, topo.elements[k])?;
            let fx = f(q.x);
            for a in 0..nv {
                let i = topo.elem_nodes[k][a];
                for c in 0..nc {
                    out.as_mut_slice()[i * nc + c] += q.jxw * (fx[c] * q.phi[a]);
                }
            }
        }
    }
    Ok(out)
}

/// `F_i = ∫ f · ∇φ_i` on a scalar space, for a vector-valued `f`.
pub fn assemble_gradient_load(space: &FeSpace, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<BlockVector> {
    let topo = space.topology();
    let dim = topo.dim;
    let nv = topo.n_corners();
    let quad = QuadratureRule::gauss2(dim);
    let mut out = BlockVector::zeros(topo.n_nodes(), 1);
    for k in 0..topo.n_elements() {
        let corners = topo.element_coords(k);
        for (xi, &w) in quad.points.iter().zip(&quad.weights) {
            let q = eval_point(dim, &corners, xi, w, topo.elements[k])?;
            let fx = f(q.x);
            for a in 0..nv {
                let mut d = 0.0;
                for c in 0..dim {
                    d += fx[c] * q.grad[a][c];
                }
                out.as_mut_slice()[topo.elem_nodes[k][a]] += q.jxw * d;
            }
        }
    }
    Ok(out)
}

/// `√(Σ_T Σ_q w |u_h(x_q) - exact(x_q)|²)` with the 2-point Gauss rule.
pub fn l2_error(
    space: &FeSpace,
    u: &BlockVector,
    exact: impl Fn(f64, [f64; 3]) -> Vec<f64>,
    t: f64,
) -> Result<f64> {
    let topo = space.topology();
    let nc = space.n_comp();
    if u.len() != space.n_dofs() {
        return Err(Error::dim("l2_error", space.n_dofs(), u.len()));
    }
    let dim = topo.dim;
    let nv = topo.n_corners();
    let quad = QuadratureRule::gauss2(dim);
    let mut s = 0.0;
    for k in 0..topo.n_elements() {
        let corners = topo.element_coords(k);
        for (xi, &w) in quad.points.iter().zip(&quad.weights) {
            let q = eval_point(dim, &corners, xi, w, topo.elements[k])?;
            let ex = exact(t, q.x);
            for c in 0..nc {
                let mut uh = 0.0;
                for a in 0..nv {
                    uh += q.phi[a] * u.get(topo.elem_nodes[k][a], c);
                }
                let d = uh - ex[c];
                s += q.jxw * d * d;
            }
        }
    }
    Ok(s.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{unit_box, uniform_unit_box};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-15
    }

    #[test]
    fn single_square_mass() {
        let s = FeSpace::new(&unit_box(2), 1).unwrap();
        let (m, ml) = assemble_mass(&s).unwrap();
        assert!(close(m.get(0, 0), 1.0 / 9.0));
        assert!(close(m.get(0, 1), 1.0 / 18.0));
        assert!(close(m.get(0, 3), 1.0 / 36.0));
        let total: f64 = ml.diagonal().iter().sum();
        assert!(close(total, 1.0));
    }

    #[test]
    fn interior_lumped_mass() {
        let s = FeSpace::new(&uniform_unit_box(2, 2), 1).unwrap();
        let (_, ml) = assemble_mass(&s).unwrap();
        let center = (0..s.n_nodes())
            .find(|&i| s.coords(i)[0] == 0.5 && s.coords(i)[1] == 0.5)
            .unwrap();
        assert!(close(ml.diagonal()[center], 0.0625));
    }

    #[test]
    fn single_square_stiffness() {
        let s = FeSpace::new(&unit_box(2), 1).unwrap();
        let k = assemble_stiffness(&s, 1.0).unwrap();
        assert!(close(k.get(0, 0), 2.0 / 3.0));
        assert!(close(k.get(0, 1), -1.0 / 6.0));
        assert!(close(k.get(0, 3), -1.0 / 3.0));
        assert!(k.is_symmetric());
    }

    #[test]
    fn convection_boundary_row_sum() {
        let s = FeSpace::new(&unit_box(2), 1).unwrap();
        let c = assemble_convection(&s, 0).unwrap();
        // Corner 1 is (1,0): ∮ φ_1 n_x over the right edge is ½.
        let sum: f64 = c.row(1).1.iter().sum();
        assert!(close(sum, 0.5));
    }

    #[test]
    fn l2_error_examples() {
        let s = FeSpace::new(&uniform_unit_box(2, 2), 1).unwrap();
        let z = s.zeros();
        let e1 = l2_error(&s, &z, |_, _| vec![1.0], 0.0).unwrap();
        assert!((e1 - 1.0).abs() < 1e-14);
        let ex = l2_error(&s, &z, |_, x| vec![x[0]], 0.0).unwrap();
        assert!((ex - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        let u = s.interpolate(|x| vec![1.0 + 2.0 * x[0] - x[1] + 3.0 * x[0] * x[1]]);
        let e = l2_error(&s, &u, |_, x| vec![1.0 + 2.0 * x[0] - x[1] + 3.0 * x[0] * x[1]], 0.0)
            .unwrap();
        assert!(e < 1e-13);
    }
}
