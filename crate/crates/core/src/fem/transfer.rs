//! Grid transfer between consecutive hierarchy levels.

use super::space::FeSpace;
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::mesh::{tree::size_at, ElemState};

/// Prolongation `P` (fine nodes × coarse nodes) embedding the coarse Q1
/// space into the fine one. Fine nodes coinciding with coarse nodes get a
/// single unit entry; every other fine node gets the coarse element's
/// basis values at its position (2, 4 or 8 entries). Rows sum to one.
/// Restriction is `Pᵀ`.
pub fn build_prolongation(coarse: &FeSpace, fine: &FeSpace) -> Result<CsrMatrix> {
    let (cm, fm) = (coarse.mesh(), fine.mesh());
    if !cm.ids_compatible_with(fm) {
        return Err(Error::InvalidMesh("transfer levels do not share a refinement tree".into()));
    }
    let (ct, ft) = (coarse.topology(), fine.topology());
    let dim = ft.dim;
    let nv = ft.n_corners();
    let mut owner = vec![usize::MAX; ft.n_nodes()];
    for (k, nodes) in ft.elem_nodes.iter().enumerate() {
        for &n in &nodes[..nv] {
            if owner[n] == usize::MAX {
                owner[n] = ft.elements[k];
            }
        }
    }
    let mut b = TripletBuilder::with_capacity(ft.n_nodes(), ct.n_nodes(), ft.n_nodes() * 4);
    for i in 0..ft.n_nodes() {
        let tree_node = ft.nodes[i];
        if let Some(j) = ct.local(tree_node) {
            b.add(i, j, 1.0);
            continue;
        }
        let mut e = owner[i];
        while cm.state(e) != ElemState::Active {
            e = fm.element(e).parent.ok_or_else(|| {
                Error::InvalidMesh(format!("fine node {i} is not covered by the coarse mesh"))
            })?;
        }
        let el = fm.element(e);
        let key = fm.node_key(tree_node);
        let h = size_at(el.level);
        let mut lam = [0.0; 3];
        for (a, l) in lam.iter_mut().enumerate().take(dim) {
            *l = fm.axis_ratio(a, el.anchor[a], key[a], el.anchor[a] + h);
        }
        for c in 0..nv {
            let mut w = 1.0;
            for (a, &l) in lam.iter().enumerate().take(dim) {
                w *= if (c >> a) & 1 == 1 { l } else { 1.0 - l };
            }
            if w != 0.0 {
                let j = ct.local(el.nodes[c]).expect("coarse corner is a coarse node");
                b.add(i, j, w);
            }
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::unit_box;

    #[test]
    fn square_stencils() {
        let coarse = unit_box(2);
        let fine = coarse.uniform_refine();
        let cs = FeSpace::new(&coarse, 1).unwrap();
        let fs = FeSpace::new(&fine, 1).unwrap();
        let p = build_prolongation(&cs, &fs).unwrap();
        assert_eq!((p.n_rows(), p.n_cols()), (9, 4));
        let mut counts = [0; 5];
        for i in 0..9 {
            let (cols, vals) = p.row(i);
            counts[cols.len()] += 1;
            let s: f64 = vals.iter().sum();
            assert_eq!(s, 1.0);
            let expect = 1.0 / cols.len() as f64;
            assert!(vals.iter().all(|&v| v == expect));
        }
        assert_eq!(counts, [0, 4, 4, 0, 1]);
    }
}
