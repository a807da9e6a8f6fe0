//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use mgfem::apps::elasticity::{block_operator, N_COMP};
use mgfem::apps::navier_stokes::ns_assemble_on;
use mgfem::apps::{
    run_driven_cavity, run_transport_diffusion, NavierStokesConfig, SolverSettings, TransportDiffusionConfig,
    LINEAR_LABELS, NS_LABELS,
};
use mgfem::cli::{parse_config, run};
use mgfem::fem::{
    assemble_advection, assemble_elasticity, assemble_mass, assemble_stiffness, build_prolongation, constrain_system,
    flat_hanging_matrix, FeSpace,
};
use mgfem::linalg::{dense_lu_solve, Backend, CsrMatrix, Reference};
use mgfem::mesh::{
    build_hierarchy, graded_tensor_mesh, hanging_constraints, refine_toward, uniform_unit_box, HangingKind, Pattern,
    DEFAULT_LAYERS,
};
use mgfem::solve::{mg_solve, project_zero_mean, solve_zero_mean, GmresConfig, LinearProblem, MgConfig, SmootherKind};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const ORACLE_TOL: f64 = 1e-8;
/// Iterative solves compared against the dense oracle run to this residual.
const ORACLE_SOLVE_TOL: f64 = 1e-10;

fn rel_diff(x: &[f64], y: &[f64]) -> f64 {
    let num = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let den = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    num / den
}

fn oracle_mg() -> MgConfig {
    MgConfig {
        rel_tol: ORACLE_SOLVE_TOL,
        max_cycles: 500,
        ..MgConfig::default()
    }
}

fn oracle_gmres() -> GmresConfig {
    GmresConfig {
        rel_tol: ORACLE_SOLVE_TOL,
        max_krylov: 200,
        ..GmresConfig::default()
    }
}

/// Compares mg_solve and GMRES+MG with the dense solution; returns the
/// worse relative difference.
fn compare_with_dense(p: &LinearProblem, b: &[f64], exact: &[f64], weights: Option<&[f64]>) -> Result<f64, String> {
    let mg = mg_solve(&Reference, &p.mg, b, None).map_err(|e| e.to_string())?;
    ensure!(mg.converged, "mg_solve did not converge ({} cycles)", mg.iterations);
    let mut xm = mg.x;
    let gm = match weights {
        Some(w) => solve_zero_mean(&Reference, p, b, w, &oracle_gmres()),
        None => p.solve_constrained(&Reference, b, None, &oracle_gmres()),
    }
    .map_err(|e| e.to_string())?;
    ensure!(gm.converged, "GMRES did not converge ({} iterations)", gm.iterations);
    if let Some(w) = weights {
        project_zero_mean(&mut xm, Some(w));
    }
    Ok(rel_diff(&xm, exact).max(rel_diff(&gm.x, exact)))
}

fn td_matrix(s: &FeSpace) -> mgfem::Result<CsrMatrix> {
    let (_, lumped) = assemble_mass(s)?;
    let m = CsrMatrix::from_diagonal(&lumped.diagonal());
    let k = assemble_stiffness(s, 1.0)?;
    let adv = assemble_advection(s, [0.0, -1.0, 0.0])?;
    CsrMatrix::linear_combination(&[(1.0 / 0.02, &m), (0.01, &k), (1.0, &adv)])
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut report = Vec::new();
    for n in 1..=4 {
        let h = build_hierarchy(&uniform_unit_box(2, n), 1);
        let p = LinearProblem::new(
            &h,
            1,
            |s| s.set_dirichlet_boundary(|x, _| Some(x[0] * x[1])),
            td_matrix,
            SmootherKind::Jacobi,
            oracle_mg(),
        )
        .map_err(|e| e.to_string())?;
        let load = p.space().interpolate(|x| vec![(3.0 * x[0]).sin() + x[1]]);
        let b = p.rhs(&load).map_err(|e| e.to_string())?;
        let exact = dense_lu_solve(&p.matrix().to_dense(), &b).map_err(|e| e.to_string())?;
        let d = compare_with_dense(&p, &b, &exact, None)?;
        worst = worst.max(d);
        report.push(format!("td n={n} ({} dofs) {d:.1e}", p.space().n_dofs()));
    }

    let h = build_hierarchy(&uniform_unit_box(3, 1), 64);
    let p = LinearProblem::new(
        &h,
        N_COMP,
        |s| s.set_dirichlet_boundary(|_, _| Some(0.0)),
        |s| block_operator(s, 8e4, 2e4, 0.025),
        SmootherKind::BlockJacobi,
        oracle_mg(),
    )
    .map_err(|e| e.to_string())?;
    let load = p.space().interpolate(|x| vec![0.0, 0.0, 0.0, x[2], -1.0, x[0]]);
    let b = p.rhs(&load).map_err(|e| e.to_string())?;
    let exact = dense_lu_solve(&p.matrix().to_dense(), &b).map_err(|e| e.to_string())?;
    let d = compare_with_dense(&p, &b, &exact, None)?;
    worst = worst.max(d);
    report.push(format!("elasticity 2x2x2 ({} dofs) {d:.1e}", p.space().n_dofs()));

    let h = build_hierarchy(&graded_tensor_mesh(4, 4, 8).map_err(|e| e.to_string())?, 8);
    let mg = MgConfig {
        nu_pre: 4,
        nu_post: 4,
        ..oracle_mg()
    };
    let p = LinearProblem::new(&h, 1, |_| {}, |s| assemble_stiffness(s, 1.0), SmootherKind::StrongBlockJacobi, mg)
        .map_err(|e| e.to_string())?;
    let (_, lumped) = assemble_mass(p.space()).map_err(|e| e.to_string())?;
    let w = lumped.diagonal();
    let p = p.with_zero_mean(w.clone());
    let n = p.space().n_nodes();
    let mut b: Vec<f64> = (0..n)
        .map(|i| {
            let x = p.space().coords(i);
            (2.0 * x[0]).cos() * x[2] - x[1]
        })
        .collect();
    project_zero_mean(&mut b, None);
    // Bordered system: K x + w μ = b, wᵀ x = 0.
    let k = p.matrix().to_dense();
    let mut a = vec![0.0; (n + 1) * (n + 1)];
    for i in 0..n {
        a[i * (n + 1)..i * (n + 1) + n].copy_from_slice(&k[i * n..(i + 1) * n]);
        a[i * (n + 1) + n] = w[i];
        a[n * (n + 1) + i] = w[i];
    }
    let mut bb = b.clone();
    bb.push(0.0);
    let exact = dense_lu_solve(&a, &bb).map_err(|e| e.to_string())?;
    let d = compare_with_dense(&p, &b, &exact[..n], Some(&w))?;
    worst = worst.max(d);
    report.push(format!("pressure 4x4x8 ({n} dofs, {} levels) {d:.1e}", h.n_levels()));

    ensure!(worst <= ORACLE_TOL, "worst relative difference {worst:.2e} > {ORACLE_TOL:e}: {}", report.join("; "));
    Ok(format!("worst {worst:.1e} <= 1e-8; {}", report.join("; ")))
}

fn criterion_2() -> Outcome {
    let mut per_level = Vec::new();
    let mut all = Vec::new();
    for level in 3..=6 {
        let cfg = TransportDiffusionConfig {
            level,
            t_end: 0.2,
            ..Default::default()
        };
        let r = run_transport_diffusion(&Reference, &cfg, &SolverSettings::default()).map_err(|e| e.to_string())?;
        all.extend(r.iterations.iter().copied());
        per_level.push((level, r.iterations));
    }
    let mut sorted = all.clone();
    sorted.sort_unstable();
    let median = sorted[sorted.len() / 2];
    let (lo, hi) = (*sorted.first().unwrap(), *sorted.last().unwrap());
    let summary: Vec<String> = per_level
        .iter()
        .map(|(l, its)| format!("n={l}: {}..{}", its.iter().min().unwrap(), its.iter().max().unwrap()))
        .collect();
    ensure!(
        lo + 2 >= median && hi <= median + 2,
        "iterations {lo}..{hi} leave median {median} +/- 2 ({})",
        summary.join(", ")
    );
    Ok(format!("median {median}, range {lo}..{hi}; {}", summary.join(", ")))
}

/// L2 errors at T = 2 from the first validated run.
const TD_FIXTURE_COARSE: f64 = 9.189_306_936e-4;
const TD_FIXTURE_FINE: f64 = 4.979_279_313e-4;

fn criterion_3() -> Outcome {
    let err_at = |level: usize, dt: f64| -> Result<f64, String> {
        let cfg = TransportDiffusionConfig {
            level,
            dt,
            ..Default::default()
        };
        let r = run_transport_diffusion(&Reference, &cfg, &SolverSettings::default()).map_err(|e| e.to_string())?;
        let last = r.errors.last().unwrap();
        ensure!((last.time - 2.0).abs() < 1e-12, "final time {}", last.time);
        Ok(last.l2)
    };
    let coarse = err_at(4, 0.04)?;
    let fine = err_at(5, 0.02)?;
    let ratio = coarse / fine;
    let msg = format!(
        "e(n=4,dt=0.04)={coarse:.10e}, e(n=5,dt=0.02)={fine:.10e}, coarse/fine={ratio:.3}, fine/coarse={:.3}",
        fine / coarse
    );
    ensure!((1.7..=2.3).contains(&ratio), "ratio outside [1.7, 2.3]: {msg}");
    for (got, want) in [(coarse, TD_FIXTURE_COARSE), (fine, TD_FIXTURE_FINE)] {
        ensure!((got - want).abs() <= 1e-6 * want, "regression fixture {want:e} not reproduced: {msg}");
    }
    Ok(msg)
}

fn criterion_4() -> Outcome {
    let n7 = uniform_unit_box(2, 7).n_nodes();
    ensure!(n7 == 16_641, "level 7 has {n7} nodes");
    let n10 = uniform_unit_box(2, 10).n_nodes();
    ensure!(n10 == 1_050_625, "level 10 has {n10} nodes");
    let s7 = FeSpace::new(&uniform_unit_box(2, 7), 1).map_err(|e| e.to_string())?;
    ensure!(s7.n_dofs() == 16_641, "level 7 space has {} dofs", s7.n_dofs());
    Ok(format!("level 7: {n7} nodes, level 10: {n10} nodes"))
}

/// Node counts and hanging shares of the adaptive elasticity meshes,
/// levels 1 to 6.
const TABLE_NODES: [(Pattern, [usize; 6]); 3] = [
    (Pattern::Face, [729, 2925, 11281, 43861, 172505, 683741]),
    (Pattern::Edge, [729, 1881, 4129, 8569, 17393, 34985]),
    (Pattern::Vertex, [729, 1333, 1937, 2541, 3145, 3749]),
];

fn criterion_5() -> Outcome {
    let mut lines = Vec::new();
    let mut counts: BTreeMap<&str, (Vec<usize>, Vec<f64>)> = BTreeMap::new();
    for (pattern, expected) in TABLE_NODES {
        // Face refinement reaches 680k nodes at level 6; stop at 5.
        let top = if pattern == Pattern::Face { 5 } else { 6 };
        let name = match pattern {
            Pattern::Face => "face",
            Pattern::Edge => "edge",
            Pattern::Vertex => "vertex",
        };
        let (mut nodes, mut frac) = (Vec::new(), Vec::new());
        for level in 1..=top {
            let m = refine_toward(&uniform_unit_box(3, 3), &pattern.default_target(3), DEFAULT_LAYERS, level);
            let n = m.n_nodes();
            let edge_hanging = hanging_constraints(&m)
                .iter()
                .filter(|c| c.kind == HangingKind::Edge)
                .count();
            ensure!(n == expected[level - 1], "{name} level {level}: {n} nodes, table {}", expected[level - 1]);
            nodes.push(n);
            frac.push(100.0 * edge_hanging as f64 / n as f64);
        }
        counts.insert(name, (nodes, frac));
    }
    let (edge_nodes, edge_frac) = &counts["edge"];
    let factors: Vec<f64> = edge_nodes.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    // Level 1 is the uniform start mesh; the band applies once refinement is
    // local (the table's own 1 -> 2 factor is 2.58).
    let adaptive = &factors[1..];
    ensure!(
        adaptive.iter().all(|f| (1.8..=2.3).contains(f)),
        "edge growth factors {factors:.3?} leave [1.8, 2.3]"
    );
    lines.push(format!("edge growth {:.3?} (1->2: {:.3})", adaptive, factors[0]));
    let (vertex_nodes, vertex_frac) = &counts["vertex"];
    let steps: Vec<usize> = vertex_nodes.windows(2).map(|w| w[1] - w[0]).collect();
    ensure!(
        steps.iter().all(|&s| s.abs_diff(steps[0]) * 20 <= steps[0]),
        "vertex increments {steps:?} not near-constant"
    );
    lines.push(format!("vertex increments {steps:?}"));
    for (name, frac) in [("edge", edge_frac), ("vertex", vertex_frac)] {
        ensure!(frac.windows(2).all(|w| w[1] > w[0]), "{name} hanging share {frac:.2?} not increasing");
        let last = *frac.last().unwrap();
        ensure!((10.0..=15.0).contains(&last), "{name} hanging share {last:.2}% outside 10-15%");
        lines.push(format!("{name} hanging % {frac:.2?}"));
    }
    Ok(lines.join("; "))
}

fn sparse_product(a: &CsrMatrix, b: &CsrMatrix) -> CsrMatrix {
    let mut t = mgfem::linalg::TripletBuilder::new(a.n_rows(), b.n_cols());
    for i in 0..a.n_rows() {
        let (ac, av) = a.row(i);
        for (&k, &x) in ac.iter().zip(av) {
            let (bc, bv) = b.row(k);
            for (&j, &y) in bc.iter().zip(bv) {
                t.add(i, j, x * y);
            }
        }
    }
    t.build()
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    let mesh = refine_toward(&uniform_unit_box(3, 3), &Pattern::Vertex.default_target(3), DEFAULT_LAYERS, 3);
    let h = build_hierarchy(&mesh, 64);
    let spaces: Vec<FeSpace> = h
        .levels
        .iter()
        .map(|m| FeSpace::new(m, 1))
        .collect::<mgfem::Result<_>>()
        .map_err(|e| e.to_string())?;

    // R = Pᵀ bit for bit, P preserves constants.
    let p = LinearProblem::new(&h, 1, |_| {}, |s| assemble_stiffness(s, 1.0), SmootherKind::Jacobi, MgConfig::default())
        .map_err(|e| e.to_string())?;
    for (l, lev) in p.mg.levels.iter().enumerate().skip(1) {
        let pl = lev.p_from_below.as_ref().unwrap();
        ensure!(lev.restriction() == Some(&pl.transpose()), "level {l}: R differs from P^T");
        let mut ones = vec![0.0; pl.n_rows()];
        Reference
            .spmv_flat(1.0, pl, &vec![1.0; pl.n_cols()], 0.0, &mut ones)
            .map_err(|e| e.to_string())?;
        let dev = ones.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        ensure!(dev <= 1e-14, "level {l}: P 1 deviates by {dev:e}");
        let direct = build_prolongation(&spaces[l - 1], &spaces[l]).map_err(|e| e.to_string())?;
        ensure!(direct == *pl, "level {l}: stored P differs from a fresh build");
    }
    lines.push(format!("R = P^T and P 1 = 1 on {} levels", h.n_levels()));

    // H idempotent and constant-preserving.
    let fine = spaces.last().unwrap();
    let hm = fine.hanging_matrix();
    ensure!(fine.n_hanging() > 0, "test mesh has no hanging nodes");
    let hh = sparse_product(hm, hm);
    let d = hh.max_abs_diff(hm);
    ensure!(d <= 1e-15, "H H - H = {d:e}");
    let mut h1 = vec![0.0; hm.n_rows()];
    Reference
        .spmv_flat(1.0, hm, &vec![1.0; hm.n_cols()], 0.0, &mut h1)
        .map_err(|e| e.to_string())?;
    let dev = h1.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    ensure!(dev <= 1e-15, "H 1 deviates by {dev:e}");
    lines.push(format!("H idempotent, H 1 = 1 ({} hanging)", fine.n_hanging()));

    // Constraining keeps symmetric matrices symmetric.
    for nc in [1, 3] {
        let s = FeSpace::new(&mesh, nc).map_err(|e| e.to_string())?;
        let a = if nc == 1 {
            assemble_stiffness(&s, 1.0)
        } else {
            assemble_elasticity(&s, 8e4, 2e4)
        }
        .map_err(|e| e.to_string())?;
        ensure!(a.is_symmetric(), "assembled matrix ({nc} comp) not symmetric");
        let c = constrain_system(&a, &flat_hanging_matrix(&s)).map_err(|e| e.to_string())?;
        ensure!(c.is_symmetric(), "constrained matrix ({nc} comp) not symmetric");
    }
    lines.push("constrain_system symmetric".into());

    // Convection row sums at interior velocity nodes.
    let ops = ns_assemble_on(
        &graded_tensor_mesh(2, 2, 4).map_err(|e| e.to_string())?,
        0.01,
        [0.0, 1.0, 0.0],
        &MgConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for c in &ops.conv {
        for i in (0..ops.velocity.n_nodes()).filter(|&i| !ops.velocity.is_boundary_node(i)) {
            worst = worst.max(c.row(i).1.iter().sum::<f64>().abs());
        }
    }
    ensure!(worst < 1e-13, "C_d interior row sum {worst:e}");
    lines.push(format!("C_d interior row sums {worst:.1e}"));

    // Rigid-body modes of the elasticity operator.
    let s = FeSpace::new(&mesh, 3).map_err(|e| e.to_string())?;
    let k = assemble_elasticity(&s, 8e4, 2e4).map_err(|e| e.to_string())?;
    let kmax = k.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let modes: [fn([f64; 3]) -> [f64; 3]; 6] = [
        |_| [1.0, 0.0, 0.0],
        |_| [0.0, 1.0, 0.0],
        |_| [0.0, 0.0, 1.0],
        |x| [-x[1], x[0], 0.0],
        |x| [0.0, -x[2], x[1]],
        |x| [x[2], 0.0, -x[0]],
    ];
    let mut worst: f64 = 0.0;
    for mode in modes {
        let r = s.interpolate(|x| mode(x).to_vec());
        let mut kr = vec![0.0; r.len()];
        Reference.spmv_flat(1.0, &k, r.as_slice(), 0.0, &mut kr).map_err(|e| e.to_string())?;
        let rel = kr.iter().fold(0.0f64, |m, v| m.max(v.abs())) / (kmax * r.max_abs());
        worst = worst.max(rel);
    }
    ensure!(worst <= 1e-12, "rigid-body residual {worst:e}");
    lines.push(format!("rigid-body modes {worst:.1e}"));
    Ok(lines.join("; "))
}

fn criterion_7() -> Outcome {
    let cfg = NavierStokesConfig {
        re: 100.0,
        dt: 1e-3,
        t_end: 0.2,
        cells: [8, 8, 16],
        ..Default::default()
    };
    let r = run_driven_cavity(&Reference, &cfg, &SolverSettings::navier_stokes()).map_err(|e| e.to_string())?;
    let d = &r.diagnostics;
    ensure!(d.len() == 200, "{} steps", d.len());
    let energy: Vec<f64> = d.iter().map(|x| x.kinetic_energy).collect();
    ensure!(energy.iter().all(|e| e.is_finite()), "non-finite energy");
    ensure!(
        energy.windows(2).all(|w| w[1] >= w[0]),
        "kinetic energy not monotone"
    );
    let early = energy[49] - energy[0];
    let late = energy[199] - energy[150];
    ensure!(late < early, "energy not levelling off: first 50 steps +{early:e}, last 50 +{late:e}");
    let div0 = d[0].divergence;
    let div_max = d.iter().map(|x| x.divergence).fold(0.0, f64::max);
    ensure!(div_max <= 10.0 * div0, "divergence {div_max:e} > 10x first step {div0:e}");
    let mean = d.iter().map(|x| x.pressure_mean.abs()).fold(0.0, f64::max);
    ensure!(mean <= 1e-12, "pressure mean {mean:e}");
    let ident = d.iter().map(|x| x.nodal_identity_error).fold(0.0, f64::max);
    ensure!(ident == 0.0, "nodal identity error {ident:e}");
    let its = d.iter().map(|x| x.gmres_iterations).max().unwrap();
    ensure!(its <= 10, "pressure GMRES needed {its} iterations");
    Ok(format!(
        "energy {:.4e} -> {:.4e}, max |mean p| {mean:.1e}, identity error {ident}, max GMRES {its}, divergence max/first {:.2}",
        energy[0],
        energy[199],
        div_max / div0
    ))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

/// Timing rows without the wall-clock column.
fn timing_schema(bytes: &[u8]) -> Vec<(String, String)> {
    String::from_utf8_lossy(bytes)
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[2].to_string())
        })
        .collect()
}

fn criterion_8() -> Outcome {
    let configs = [
        "problem = transport-diffusion\ntd.level = 4\ntd.t_end = 0.4\noutput.snapshot_stride = 10\n",
        "problem = elasticity\nelasticity.level = 2\nelasticity.t_end = 0.1\noutput.snapshot_stride = 2\n",
        "problem = driven-cavity\nns.re = 100\nns.dt = 1e-3\nns.t_end = 0.02\nns.cells = 4,4,8\noutput.snapshot_stride = 10\n",
    ];
    let mut compared = 0;
    for text in configs {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let mut cfg = parse_config(text).map_err(|e| e.to_string())?;
            cfg.out_dir = dir.path().to_path_buf();
            run(&cfg).map_err(|e| e.to_string())?;
            outputs.push(read_dir_sorted(dir.path()));
        }
        ensure!(outputs[0].len() == outputs[1].len(), "different file sets");
        for ((na, a), (nb, b)) in outputs[0].iter().zip(&outputs[1]) {
            ensure!(na == nb, "file sets differ: {na} vs {nb}");
            if na == "timing.csv" {
                // Wall-clock seconds differ by nature; labels and counts may not.
                ensure!(timing_schema(a) == timing_schema(b), "timing.csv labels or counts differ");
            } else {
                ensure!(a == b, "{na} differs between runs");
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} VTK/CSV files byte-identical across two runs (timing.csv: labels and counts)"))
}

fn criterion_9() -> Outcome {
    let td = run_transport_diffusion(
        &Reference,
        &TransportDiffusionConfig {
            level: 3,
            t_end: 0.1,
            ..Default::default()
        },
        &SolverSettings::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure!(td.timing.labels() == LINEAR_LABELS, "linear labels {:?}", td.timing.labels());
    let get = |r: &mgfem::apps::TimingReport, l: &str| r.get(l).unwrap().seconds;
    ensure!(get(&td.timing, "copy") == 0.0, "copy bucket nonzero");
    let parts = get(&td.timing, "init") + get(&td.timing, "rhs") + get(&td.timing, "solve");
    ensure!((get(&td.timing, "sum") - parts).abs() <= 1e-6, "linear sum mismatch");

    let ns = run_driven_cavity(
        &Reference,
        &NavierStokesConfig {
            re: 100.0,
            dt: 1e-3,
            t_end: 5e-3,
            cells: [2, 2, 4],
            ..Default::default()
        },
        &SolverSettings::navier_stokes(),
    )
    .map_err(|e| e.to_string())?;
    let r = &ns.timing;
    ensure!(r.labels() == NS_LABELS, "NS labels {:?}", r.labels());
    ensure!(get(r, "copy") == 0.0, "copy bucket nonzero");
    for (total, parts) in [
        ("mom-rhs", &["mom-rhs-nonlin", "mom-rhs-p", "mom-rhs-visc"][..]),
        ("momentum", &["mom-rhs", "mom-solve"][..]),
        ("pres", &["pres-rhs", "pres-solve"][..]),
        ("pres-up", &["pres-up.rhs", "pres-up.solve"][..]),
        ("sum", &["momentum", "pres", "pres-up"][..]),
    ] {
        let s: f64 = parts.iter().map(|p| get(r, p)).sum();
        ensure!(get(r, total) >= s - 1e-6, "{total} smaller than its parts");
        if total != "mom-rhs" {
            ensure!((get(r, total) - s).abs() <= 1e-6, "{total} != sum of {parts:?}");
        }
    }
    let mut csv = Vec::new();
    mgfem::cli::write_timing(r, &mut csv).map_err(|e| e.to_string())?;
    let csv = String::from_utf8(csv).unwrap();
    let labels: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    ensure!(labels == NS_LABELS, "CSV labels {labels:?}");
    ensure!(csv.starts_with("label,seconds,count\n"), "CSV header");
    Ok(format!("linear {:?}; navier-stokes {} labels, copy = 0", LINEAR_LABELS, NS_LABELS.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", criterion_1),
        ("multigrid mesh robustness", criterion_2),
        ("transport-diffusion accuracy", criterion_3),
        ("mesh and dof counts", criterion_4),
        ("adaptive refinement structure", criterion_5),
        ("operator identities", criterion_6),
        ("navier-stokes desk-scale run", criterion_7),
        ("determinism", criterion_8),
        ("timing report schema", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|a| a == &id) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

