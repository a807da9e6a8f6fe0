use mgfem::fem::{assemble_advection, assemble_mass, assemble_stiffness, FeSpace};
use mgfem::linalg::{dense_lu_solve, Backend, BlockVector, CsrMatrix, Reference};
use mgfem::mesh::{build_hierarchy, uniform_unit_box, MeshHierarchy};
use mgfem::solve::{mg_solve, GmresConfig, LinearProblem, MgConfig, SmootherKind};
use proptest::prelude::*;

fn zero_boundary(s: &mut FeSpace) {
    s.set_dirichlet_boundary(|_, _| Some(0.0));
}

fn td_matrix(s: &FeSpace) -> mgfem::Result<CsrMatrix> {
    let (m, _) = assemble_mass(s)?;
    let k = assemble_stiffness(s, 0.01)?;
    let b = assemble_advection(s, [0.0, -1.0, 0.0])?;
    let mut sum = mgfem::linalg::TripletBuilder::new(m.n_rows(), m.n_cols());
    for (mat, f) in [(&m, 1.0 / 0.02), (&k, 1.0), (&b, 1.0)] {
        for i in 0..mat.n_rows() {
            let (c, v) = mat.row(i);
            for (&j, &x) in c.iter().zip(v) {
                sum.add(i, j, f * x);
            }
        }
    }
    Ok(sum.build())
}

fn poisson(h: &MeshHierarchy) -> LinearProblem {
    LinearProblem::new(h, 1, zero_boundary, |s| assemble_stiffness(s, 1.0), SmootherKind::Jacobi, MgConfig::default()).unwrap()
}

fn rel_err(x: &[f64], e: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(e).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let den: f64 = e.iter().map(|b| b * b).sum::<f64>().sqrt();
    num / den
}

fn ones_load(p: &LinearProblem) -> BlockVector {
    let s = p.space();
    let (m, _) = assemble_mass(s).unwrap();
    let mut b = vec![0.0; s.n_dofs()];
    Reference.spmv_flat(1.0, &m, &vec![1.0; s.n_dofs()], 0.0, &mut b).unwrap();
    BlockVector::from_vec(1, b).unwrap()
}

#[test]
fn mg_solve_matches_dense_on_transport_diffusion() {
    let h = build_hierarchy(&uniform_unit_box(2, 4), 1);
    let cfg = MgConfig { rel_tol: 1e-10, ..MgConfig::default() };
    let p = LinearProblem::new(&h, 1, zero_boundary, td_matrix, SmootherKind::Jacobi, cfg).unwrap();
    assert_eq!(p.space().n_dofs(), 289);
    let b = p.rhs(&ones_load(&p)).unwrap();
    let rec = mg_solve(&Reference, &p.mg, &b, None).unwrap();
    assert!(rec.converged, "{rec:?}");
    let exact = dense_lu_solve(&p.matrix().to_dense(), &b).unwrap();
    let e = rel_err(&rec.x, &exact);
    assert!(e < 1e-8, "error {e:e} after {} cycles", rec.iterations);
}

#[test]
fn single_level_with_direct_coarse_is_exact() {
    let h = build_hierarchy(&uniform_unit_box(2, 2), 64);
    assert_eq!(h.n_levels(), 1);
    let mut p = poisson(&h);
    p.mg = std::mem::replace(&mut p.mg, poisson(&h).mg).with_direct_coarse().unwrap();
    let b = p.rhs(&ones_load(&p)).unwrap();
    let mut x = vec![0.0; b.len()];
    p.mg.v_cycle(&Reference, 0, &mut x, &b).unwrap();
    let exact = dense_lu_solve(&p.matrix().to_dense(), &b).unwrap();
    assert!(rel_err(&x, &exact) < 1e-12);
}

#[test]
fn zero_rhs_stays_zero() {
    let h = build_hierarchy(&uniform_unit_box(2, 3), 1);
    let p = poisson(&h);
    let n = p.space().n_dofs();
    let mut x = vec![0.0; n];
    p.mg.v_cycle(&Reference, h.n_levels() - 1, &mut x, &vec![0.0; n]).unwrap();
    assert!(x.iter().all(|&v| v == 0.0));
    let rec = mg_solve(&Reference, &p.mg, &vec![0.0; n], None).unwrap();
    assert_eq!(rec.iterations, 0);
}

#[test]
fn two_level_strip_reduction() {
    let mesh = mgfem::mesh::box_mesh(2, [8, 1, 1], [0.0; 3], [8.0, 1.0, 0.0]).unwrap().uniform_refine();
    let h = build_hierarchy(&mesh, 8);
    assert_eq!(h.n_levels(), 2);
    let p = LinearProblem::new(&h, 1, zero_boundary, |s| assemble_stiffness(s, 1.0), SmootherKind::Jacobi, MgConfig::default()).unwrap();
    let b = p.rhs(&ones_load(&p)).unwrap();
    let exact = dense_lu_solve(&p.matrix().to_dense(), &b).unwrap();
    let mut x = vec![0.0; b.len()];
    let norm = |x: &[f64]| {
        let mut r = b.clone();
        Reference.spmv_flat(-1.0, p.matrix(), x, 1.0, &mut r).unwrap();
        Reference.norm2(&r)
    };
    let mut prev = norm(&x);
    for _ in 0..4 {
        p.mg.v_cycle(&Reference, 1, &mut x, &b).unwrap();
        let now = norm(&x);
        assert!(now / prev < 0.25, "factor {}", now / prev);
        prev = now;
    }
    assert!(rel_err(&x, &exact) < 1e-2);
}

#[test]
fn gmres_iterations_level_independent() {
    let mut its = Vec::new();
    for n in 3..=6 {
        let h = build_hierarchy(&uniform_unit_box(2, n), 1);
        let p = LinearProblem::new(&h, 1, zero_boundary, td_matrix, SmootherKind::Jacobi, MgConfig::default()).unwrap();
        let (_, rec) = p.solve(&Reference, &ones_load(&p), None, &GmresConfig::default()).unwrap();
        assert!(rec.converged);
        assert!(rec.iterations <= 10, "level {n}: {} iterations", rec.iterations);
        its.push(rec.iterations);
    }
    let mut sorted = its.clone();
    sorted.sort();
    let median = (sorted[1] + sorted[2]) as f64 / 2.0;
    assert!(its.iter().all(|&i| (i as f64 - median).abs() <= 2.0), "{its:?}");
}

#[test]
fn mg_cycles_level_independent() {
    let mut its = Vec::new();
    for n in 3..=6 {
        let h = build_hierarchy(&uniform_unit_box(2, n), 1);
        let p = poisson(&h);
        let b = p.rhs(&ones_load(&p)).unwrap();
        let rec = mg_solve(&Reference, &p.mg, &b, None).unwrap();
        assert!(rec.converged);
        its.push(rec.iterations);
    }
    let (lo, hi) = (its.iter().min().unwrap(), its.iter().max().unwrap());
    assert!(hi - lo <= 4, "{its:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn v_cycle_is_linear(
        b1 in prop::collection::vec(-1.0..1.0f64, 81),
        b2 in prop::collection::vec(-1.0..1.0f64, 81),
        alpha in -2.0..2.0f64,
        beta in -2.0..2.0f64,
    ) {
        let h = build_hierarchy(&uniform_unit_box(2, 3), 1);
        let p = poisson(&h);
        let top = h.n_levels() - 1;
        let mask = &p.mg.finest().mask;
        let clean = |b: &[f64]| -> Vec<f64> { b.iter().zip(mask).map(|(&v, &m)| if m { 0.0 } else { v }).collect() };
        let (b1, b2) = (clean(&b1), clean(&b2));
        let run = |b: &[f64]| { let mut x = vec![0.0; b.len()]; p.mg.v_cycle(&Reference, top, &mut x, b).unwrap(); x };
        let combo: Vec<f64> = b1.iter().zip(&b2).map(|(x, y)| alpha * x + beta * y).collect();
        let (x1, x2, xc) = (run(&b1), run(&b2), run(&combo));
        for k in 0..xc.len() {
            prop_assert!((xc[k] - (alpha * x1[k] + beta * x2[k])).abs() < 1e-12);
        }
    }
}

