//! Solver-level properties: elimination against the monolithic system,
//! agreement between the two methods, and boundary data handling.

use std::sync::Arc;

use mvmfem::assembly::{LoadData, RhsVectors};
use mvmfem::hybridization::{build_reduced_system, invert_vertex_blocks};
use mvmfem::mms::{exact_fields, trig_fields_2d, ExactSolution};
use mvmfem::study::{check_invariants, discrete_l2_norm, evaluate_solution};
use mvmfem::{BoundaryTag, SimplicialMesh, Solution, StokesProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn problem(dim: usize, n: usize, mu: f64) -> StokesProblem {
    StokesProblem::new(Arc::new(SimplicialMesh::structured(dim, n).unwrap()), mu).unwrap()
}

fn rhs_for(problem: &StokesProblem, exact: &ExactSolution, with_boundary: bool) -> RhsVectors {
    problem
        .load(&LoadData {
            g: &exact.g,
            p0: with_boundary.then_some(&exact.p0 as _),
            q0: with_boundary.then_some(&exact.q0 as _),
            degree: 8,
        })
        .unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn elimination_matches_augmented_solve() {
    for (dim, n, mu) in [(2, 4, 1.0), (3, 2, 1.0), (2, 5, 0.37)] {
        let pb = problem(dim, n, mu);
        let exact = exact_fields(dim, mu);
        let rhs = rhs_for(&pb, &exact, false);
        let mv = pb.solve_multipoint(&rhs, TOL).unwrap();
        let aug = pb.solve_augmented(&rhs, TOL).unwrap();
        for (name, a, b) in [
            ("r", &mv.r, &aug.r),
            ("q", &mv.q, &aug.q),
            ("p", &mv.p, &aug.p),
        ] {
            let d = max_abs_diff(a, b);
            assert!(d <= 1e-10, "{dim}D n={n}: {name} differs by {d:e}");
        }
        assert!(mv.n_dof < aug.n_dof);
    }
}

#[test]
fn schur_complement_matches_matrix_free_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (dim, n) in [(2, 4), (3, 2)] {
        let pb = problem(dim, n, 0.8);
        let inv = invert_vertex_blocks(&pb.a_h).unwrap();
        let zero = RhsVectors {
            f_r: vec![0.0; pb.space_r.n_dofs()],
            f_q: vec![0.0; pb.space_q.n_dofs()],
            f_p: vec![0.0; pb.space_p.n_dofs()],
        };
        let red = build_reduced_system(&pb.b_r, &pb.b_q, &inv, &zero).unwrap();
        assert!(red.s.asymmetry() < 1e-12);
        for k in 0..100 {
            let x = random_vec(&mut rng, pb.space_q.n_dofs());
            let sx = red.s.matvec(&x);
            assert!(dot(&x, &sx) >= -1e-12 * dot(&x, &x));
            if k < 5 {
                let oracle = pb.b_r.matvec(&inv.apply(&pb.b_r.matvec_transpose(&x)));
                let scale = oracle.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                assert!(max_abs_diff(&sx, &oracle) <= 1e-12 * scale);
            }
        }
    }
}

#[test]
fn reduced_operator_is_local() {
    // largest row length, reached once a facet has an interior vertex star
    for (dim, ns, bound) in [(2, [4, 8, 16, 32], 29), (3, [2, 3, 4, 5], 197)] {
        let mut widest = 0;
        for n in ns {
            let pb = problem(dim, n, 1.0);
            let inv = invert_vertex_blocks(&pb.a_h).unwrap();
            let zero = RhsVectors {
                f_r: vec![0.0; pb.space_r.n_dofs()],
                f_q: vec![0.0; pb.space_q.n_dofs()],
                f_p: vec![0.0; pb.space_p.n_dofs()],
            };
            let s = build_reduced_system(&pb.b_r, &pb.b_q, &inv, &zero)
                .unwrap()
                .s;
            let w = (0..s.n_rows()).map(|i| s.row(i).0.len()).max().unwrap();
            assert!(w <= bound, "{dim}D n={n}: {w}");
            widest = widest.max(w);
        }
        assert_eq!(widest, bound);
    }
}

#[test]
fn multipoint_system_is_smaller() {
    for (dim, ns) in [(2, [2, 4, 8]), (3, [1, 2, 3])] {
        for n in ns {
            let pb = problem(dim, n, 1.0);
            let exact = exact_fields(dim, 1.0);
            let rhs = rhs_for(&pb, &exact, false);
            let tf = pb.solve_three_field(&rhs, TOL).unwrap();
            let mv = pb.solve_multipoint(&rhs, TOL).unwrap();
            assert_eq!(
                tf.n_dof,
                pb.space_r.n_dofs() + pb.space_q.n_dofs() + pb.space_p.n_dofs()
            );
            assert_eq!(mv.n_dof, pb.space_q.n_dofs() + pb.space_p.n_dofs());
            assert!(mv.n_dof < tf.n_dof);
        }
    }
}

#[test]
fn block_inverse_is_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (dim, n) in [(2, 3), (3, 2)] {
        let pb = problem(dim, n, 2.5);
        let inv = invert_vertex_blocks(&pb.a_h).unwrap();
        let x = random_vec(&mut rng, pb.space_r.n_dofs());
        let y = inv.apply(&pb.a_h.apply(&x));
        assert!(max_abs_diff(&x, &y) < 1e-11);
    }
}

#[test]
fn reduced_load_carries_vorticity_load() {
    // with f_r != 0 the reconstruction must still satisfy the first block row
    let pb = problem(2, 4, 1.0);
    let exact = trig_fields_2d(1.0);
    let rhs = rhs_for(&pb, &exact, true);
    assert!(rhs.f_r.iter().any(|v| v.abs() > 1e-6));
    let mv = pb.solve_multipoint(&rhs, TOL).unwrap();
    let lhs: Vec<f64> = pb
        .a_h
        .apply(&mv.r)
        .iter()
        .zip(pb.b_r.matvec_transpose(&mv.q))
        .map(|(a, b)| a - b)
        .collect();
    let norm = |v: &[f64]| dot(v, v).sqrt();
    let residual: Vec<f64> = lhs.iter().zip(&rhs.f_r).map(|(a, b)| a - b).collect();
    let bound = 1e-11 * (norm(&rhs.f_r) + norm(&pb.b_r.matvec_transpose(&mv.q)) + 1.0);
    assert!(norm(&residual) <= bound, "{:e}", norm(&residual));
    let aug = pb.solve_augmented(&rhs, TOL).unwrap();
    assert!(max_abs_diff(&mv.r, &aug.r) < 1e-10);
}

fn invariants(dim: usize, n: usize) -> (StokesProblem, Solution, Solution) {
    let pb = problem(dim, n, 1.0);
    let exact = exact_fields(dim, 1.0);
    let rhs = rhs_for(&pb, &exact, false);
    let tf = pb.solve_three_field(&rhs, TOL).unwrap();
    let mv = pb.solve_multipoint(&rhs, TOL).unwrap();
    (pb, tf, mv)
}

#[test]
fn pressure_and_curl_agree_between_methods() {
    for (dim, n) in [(2, 4), (2, 8), (3, 2), (3, 3)] {
        let (pb, tf, mv) = invariants(dim, n);
        let inv = check_invariants(&pb, &tf, &mv).unwrap();
        assert!(
            inv.p_diff <= 1e-9 * inv.p_norm.max(1.0),
            "{dim}D n={n}: {inv:?}"
        );
        assert!(
            inv.curl_diff <= 1e-9 * inv.curl_norm.max(1.0),
            "{dim}D n={n}: {inv:?}"
        );
        match dim {
            2 => assert!(inv.r_diff.unwrap() <= 1e-9 * inv.r_norm),
            _ => assert!(inv.r_diff.is_none()),
        }
        // velocities do differ; the invariance is not vacuous
        assert!(inv.q_diff > 1e-8, "{dim}D n={n}: {inv:?}");
    }
}

#[test]
fn velocity_difference_is_second_order_in_2d() {
    let diffs: Vec<(f64, f64)> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let (pb, tf, mv) = invariants(2, n);
            let d: Vec<f64> = tf.q.iter().zip(&mv.q).map(|(a, b)| a - b).collect();
            (pb.mesh.mesh_size(), discrete_l2_norm(&pb.space_q, &d))
        })
        .collect();
    for w in diffs.windows(2) {
        let rate = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
        assert!((rate - 2.0).abs() <= 0.3, "rate {rate}");
    }
}

fn trig_errors(n: usize, flip_vorticity_load: bool) -> [f64; 3] {
    let pb = problem(2, n, 1.0);
    let exact = trig_fields_2d(1.0);
    let mut rhs = rhs_for(&pb, &exact, true);
    if flip_vorticity_load {
        rhs.f_r.iter_mut().for_each(|v| *v = -*v);
    }
    let sol = pb.solve_multipoint(&rhs, TOL).unwrap();
    let (r, q, p, _, _) = evaluate_solution(&pb, &exact, &sol);
    [r.value, q.value, p.value]
}

#[test]
fn nonzero_boundary_data_converges() {
    let coarse = trig_errors(8, false);
    let fine = trig_errors(16, false);
    for k in 0..3 {
        let rate = (coarse[k] / fine[k]).log2();
        assert!(rate > 0.85, "field {k}: {coarse:?} -> {fine:?}");
    }
    assert!(
        fine[0] < 2e-2 && fine[1] < 0.2 && fine[2] < 0.15,
        "{fine:?}"
    );
    // the opposite sign of the tangential velocity term does not converge
    let wrong = trig_errors(16, true);
    assert!(wrong[0] > 0.5 && wrong[1] > 0.5, "{wrong:?}");
}

#[test]
fn essential_velocity_boundary() {
    for dim in [2, 3] {
        let n = if dim == 2 { 6 } else { 2 };
        let mut mesh = SimplicialMesh::structured(dim, n).unwrap();
        mesh.tag_boundary(BoundaryTag::Q, |x| x[0] < 0.5);
        let mesh = Arc::new(mesh);
        let flagged: Vec<usize> = (0..mesh.n_facets())
            .filter(|&f| mesh.facet_tag(f) == Some(BoundaryTag::Q))
            .collect();
        assert!(!flagged.is_empty());
        assert!(flagged.iter().all(|&f| mesh.is_boundary_facet(f)));

        let pb = StokesProblem::new(mesh.clone(), 1.0).unwrap();
        let free = problem(dim, n, 1.0);
        let exact = exact_fields(dim, 1.0);
        let rhs = rhs_for(&pb, &exact, false);
        let tf = pb.solve_three_field(&rhs, TOL).unwrap();
        let mv = pb.solve_multipoint(&rhs, TOL).unwrap();
        for s in [&tf, &mv] {
            for &f in &flagged {
                assert!(s.q[f].abs() < 1e-14);
            }
            let r_flags = pb.space_r.essential();
            assert!(r_flags.iter().any(|&b| b));
            for (v, _) in s.r.iter().zip(r_flags).filter(|(_, &b)| b) {
                assert!(v.abs() < 1e-14);
            }
        }
        let inv = check_invariants(&pb, &tf, &mv).unwrap();
        assert!(inv.p_diff <= 1e-9 * inv.p_norm.max(1.0), "{inv:?}");
        assert!(inv.curl_diff <= 1e-9 * inv.curl_norm.max(1.0), "{inv:?}");

        if dim == 2 {
            // the trigonometric solution has vanishing normal velocity and
            // vorticity on the whole boundary, so tagging must not hurt it
            let trig = trig_fields_2d(1.0);
            let tagged = pb
                .solve_multipoint(&rhs_for(&pb, &trig, true), TOL)
                .unwrap();
            let untagged = free
                .solve_multipoint(&rhs_for(&free, &trig, true), TOL)
                .unwrap();
            let (r0, q0, p0, _, _) = evaluate_solution(&free, &trig, &untagged);
            let (r1, q1, p1, _, _) = evaluate_solution(&pb, &trig, &tagged);
            for (a, b) in [(r1, r0), (q1, q0), (p1, p0)] {
                assert!(a.value < 2.0 * b.value, "{a:?} vs {b:?}");
            }
        }
    }
}
