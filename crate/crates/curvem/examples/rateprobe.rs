//! Scratch probe for acceptance thresholds (not part of the test suite).

use curvem::assembly::{assemble, AssembleConfig, InterfaceStabilization};
use curvem::geometry::ParamWarp;
use curvem::meshgen::{square_circle_interface, InterfaceGeometry, InterfaceMeshOptions};
use curvem::post::{
    convergence_study, error_norms, interpolant_h1_error, interpolant_oracle,
    norm_1s_interpolation_gap, patch_test_error, solve_problem, u_pi_h1_error,
};
use curvem::problem::{interface_jump_problem, patch_poly, smooth_sin_problem};
use curvem::solver::SolverKind;
use nalgebra::Point2;

fn main() {
    // --- criterion 4: one-sided vs two-sided on the kappa-jump problem, k=2
    let k = 2;
    let mut cfg = AssembleConfig::new(k);
    let opts = InterfaceMeshOptions {
        kappa_in: 1.0,
        kappa_out: 100.0,
        ..Default::default()
    };
    let mut radius = 0.3;
    let mut meshes = Vec::new();
    for n in [4usize, 8, 16, 32] {
        let (m, r) = square_circle_interface(n, 0.3, &opts, &cfg.quad).unwrap();
        radius = r;
        meshes.push(m);
    }
    let problem = interface_jump_problem(Point2::new(0.5, 0.5), radius, 1.0, 100.0);
    println!("criterion 4 (k=2):");
    for m in &meshes {
        cfg.stab_mode = InterfaceStabilization::OneSidedOnJumps;
        let r1 = solve_problem(m, &problem, &cfg, SolverKind::Direct).unwrap();
        let e1 = error_norms(m, &r1.system, &r1.solution, problem.exact.as_ref().unwrap())
            .unwrap()
            .e_h1;
        cfg.stab_mode = InterfaceStabilization::TwoSided;
        let r2 = solve_problem(m, &problem, &cfg, SolverKind::Direct).unwrap();
        let e2 = error_norms(m, &r2.system, &r2.solution, problem.exact.as_ref().unwrap())
            .unwrap()
            .e_h1;
        println!("  one-sided {e1:.4e}  two-sided {e2:.4e}  ratio {:.4}", e1 / e2);
    }

    // --- criterion 5: chords declared curved vs declared straight
    println!("criterion 5 (k=1,2, smooth, kappa=1, one-sided-all):");
    for k in [1usize, 2] {
        let mut cfg5 = AssembleConfig::new(k);
        cfg5.stab_mode = InterfaceStabilization::OneSidedAll;
        let smooth = smooth_sin_problem(1.0, 0.0);
        let mut es = Vec::new();
        for geom in [
            InterfaceGeometry::ChordsDeclaredCurved,
            InterfaceGeometry::ChordsDeclaredStraight,
        ] {
            let o = InterfaceMeshOptions {
                geometry: geom,
                ..Default::default()
            };
            let (m, _) = square_circle_interface(4, 0.3, &o, &cfg5.quad).unwrap();
            let run = solve_problem(&m, &smooth, &cfg5, SolverKind::Direct).unwrap();
            let e = error_norms(&m, &run.system, &run.solution, smooth.exact.as_ref().unwrap())
                .unwrap()
                .e_h1;
            es.push(e);
        }
        println!(
            "  k={k}: curved-declared {:.6e} straight {:.6e} diff {:.2e}",
            es[0],
            es[1],
            (es[0] - es[1]).abs()
        );
    }
    // kappa-jump chords one-sided: SPD check
    {
        let cfg5 = AssembleConfig::new(2);
        let o = InterfaceMeshOptions {
            kappa_in: 1.0,
            kappa_out: 100.0,
            geometry: InterfaceGeometry::ChordsDeclaredCurved,
            ..Default::default()
        };
        let (m, r) = square_circle_interface(4, 0.3, &o, &cfg5.quad).unwrap();
        let pj = interface_jump_problem(Point2::new(0.5, 0.5), r, 1.0, 100.0);
        let run = solve_problem(&m, &pj, &cfg5, SolverKind::Direct).unwrap();
        println!(
            "  jump chords one-sided: SPD ok, min pivot {:.3e}",
            run.report.min_pivot.unwrap()
        );
    }

    // --- criterion 7: interpolation chain rates
    println!("criterion 7:");
    for k in 1..=3usize {
        let cfg7 = AssembleConfig::new(k);
        for (name, kout) in [("smooth", 1.0), ("jump", 100.0)] {
            let o = InterfaceMeshOptions {
                kappa_in: 1.0,
                kappa_out: kout,
                ..Default::default()
            };
            let mut hs = Vec::new();
            let mut gi = Vec::new();
            let mut gp = Vec::new();
            let mut gap = Vec::new();
            for n in [4usize, 8, 16] {
                let (m, r) = square_circle_interface(n, 0.3, &o, &cfg7.quad).unwrap();
                let prob = if kout > 1.0 {
                    interface_jump_problem(Point2::new(0.5, 0.5), r, 1.0, kout)
                } else {
                    smooth_sin_problem(1.0, 0.0)
                };
                let sys = assemble(&m, &prob, &cfg7).unwrap();
                let oracle = interpolant_oracle(&m, &sys, prob.exact.as_ref().unwrap()).unwrap();
                let h = m.elements.iter().map(|e| e.diameter).fold(0.0f64, f64::max);
                hs.push(h);
                gi.push(
                    interpolant_h1_error(&m, &sys, &oracle, prob.exact.as_ref().unwrap())
                        .unwrap(),
                );
                gp.push(u_pi_h1_error(&m, &sys, &oracle, prob.exact.as_ref().unwrap()).unwrap());
                gap.push(norm_1s_interpolation_gap(&m, &sys, &oracle));
            }
            let slope = |v: &Vec<f64>| {
                let n = v.len();
                ((v[0] / v[n - 1]).ln()) / ((hs[0] / hs[n - 1]).ln())
            };
            println!(
                "  k={k} {name}: |u-Pi uI| slope {:.2}, |u-upi| slope {:.2}, ||uI-upi||_1S slope {:.2}",
                slope(&gi),
                slope(&gp),
                slope(&gap)
            );
        }
    }

    // --- criterion 9: parametrization independence
    println!("criterion 9:");
    for k in [1usize, 2] {
        let cfg9 = AssembleConfig::new(k);
        let mut es = Vec::new();
        for warp in [ParamWarp::Identity, ParamWarp::Cubic] {
            let o = InterfaceMeshOptions {
                robin_top: true,
                warp,
                ..Default::default()
            };
            let (m, _) = square_circle_interface(4, 0.3, &o, &cfg9.quad).unwrap();
            es.push(patch_test_error(&m, &patch_poly(k), 1.0, &cfg9).unwrap());
        }
        println!(
            "  patch k={k}: identity {:.2e} cubic {:.2e} diff {:.2e}",
            es[0],
            es[1],
            (es[0] - es[1]).abs()
        );
    }
    {
        let cfg9 = AssembleConfig::new(2);
        let mut es = Vec::new();
        for warp in [ParamWarp::Identity, ParamWarp::Cubic] {
            let o = InterfaceMeshOptions {
                kappa_in: 1.0,
                kappa_out: 100.0,
                warp,
                ..Default::default()
            };
            let (m, r) = square_circle_interface(32, 0.3, &o, &cfg9.quad).unwrap();
            let prob = interface_jump_problem(Point2::new(0.5, 0.5), r, 1.0, 100.0);
            let run = solve_problem(&m, &prob, &cfg9, SolverKind::Direct).unwrap();
            es.push(
                error_norms(&m, &run.system, &run.solution, prob.exact.as_ref().unwrap())
                    .unwrap()
                    .e_h1,
            );
        }
        println!(
            "  convergence finest k=2: identity {:.6e} cubic {:.6e} rel diff {:.2e}",
            es[0],
            es[1],
            (es[0] - es[1]).abs() / es[0]
        );
    }

    // --- CG on a real study level
    let study = convergence_study(
        &meshes[..2],
        &problem,
        &AssembleConfig::new(2),
        SolverKind::ConjugateGradient,
    )
    .unwrap();
    println!("CG study sanity: slope {:.2}", study.slope_h1);
}
