//! SPD linear solvers: sparse LDLT (direct, default) and Jacobi-
//! preconditioned conjugate gradients (iterative, selectable).

use sprs::{CsMat, FillInReduction};
use sprs_ldl::Ldl;

use crate::assembly::ReducedSystem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Direct,
    ConjugateGradient,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Solution on the free slots.
    pub free_solution: Vec<f64>,
    pub rel_residual: f64,
    pub n_free: usize,
    pub iterations: Option<usize>,
    /// Smallest pivot of the LDLT diagonal (direct solves).
    pub min_pivot: Option<f64>,
}

fn spmv(mat: &CsMat<f64>, x: &[f64], y: &mut [f64]) {
    y.fill(0.0);
    for (v, (i, j)) in mat.iter() {
        y[i] += v * x[j];
    }
}

fn residual_norm(mat: &CsMat<f64>, x: &[f64], b: &[f64]) -> f64 {
    let mut ax = vec![0.0; b.len()];
    spmv(mat, x, &mut ax);
    let rn: f64 = ax
        .iter()
        .zip(b)
        .map(|(a, bb)| (bb - a) * (bb - a))
        .sum::<f64>()
        .sqrt();
    let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bn > 0.0 {
        rn / bn
    } else {
        rn
    }
}

/// Direct symmetric factorization. Errors with the offending pivot index
/// when the reduced matrix is not positive definite (broken mesh
/// assumptions or a stabilization-masking bug).
pub fn solve_direct(sys: &ReducedSystem) -> Result<SolveReport> {
    let n = sys.n();
    if n == 0 {
        return Ok(SolveReport {
            free_solution: Vec::new(),
            rel_residual: 0.0,
            n_free: 0,
            iterations: None,
            min_pivot: None,
        });
    }
    if n == 1 {
        // sprs-ldl's workspace stack requires n > 1
        let mut a = 0.0;
        for (v, (i, j)) in sys.matrix.iter() {
            if i == 0 && j == 0 {
                a += v;
            }
        }
        if a <= 0.0 {
            return Err(Error::Numerical(format!(
                "reduced system not positive definite: pivot {a:.3e} at index 0"
            )));
        }
        return Ok(SolveReport {
            free_solution: vec![sys.rhs[0] / a],
            rel_residual: 0.0,
            n_free: 1,
            iterations: None,
            min_pivot: Some(a),
        });
    }
    let ldl = Ldl::new()
        .check_symmetry(sprs::SymmetryCheck::DontCheckSymmetry)
        .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
        .numeric(sys.matrix.view())
        .map_err(|e| Error::Numerical(format!("LDLT factorization failed: {e}")))?;
    let (min_pivot, min_idx) = ldl
        .d()
        .iter()
        .enumerate()
        .map(|(i, &d)| (d, i))
        .fold((f64::INFINITY, 0), |acc, (d, i)| {
            if d < acc.0 {
                (d, i)
            } else {
                acc
            }
        });
    if min_pivot <= 0.0 {
        return Err(Error::Numerical(format!(
            "reduced system not positive definite: pivot {min_pivot:.3e} at index {min_idx}"
        )));
    }
    let x = ldl.solve(&sys.rhs);
    let rel = residual_norm(&sys.matrix, &x, &sys.rhs);
    Ok(SolveReport {
        free_solution: x,
        rel_residual: rel,
        n_free: n,
        iterations: None,
        min_pivot: Some(min_pivot),
    })
}

/// Conjugate gradients with diagonal preconditioning, stopping at relative
/// residual 1e-12 (or it errors after the iteration cap).
pub fn solve_cg(sys: &ReducedSystem) -> Result<SolveReport> {
    let n = sys.n();
    let b = &sys.rhs;
    let mut diag = vec![0.0; n];
    for (v, (i, j)) in sys.matrix.iter() {
        if i == j {
            diag[i] += v;
        }
    }
    if diag.iter().any(|&d| d <= 0.0) {
        return Err(Error::Numerical(
            "non-positive diagonal entry; system is not SPD".into(),
        ));
    }
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bn == 0.0 {
        return Ok(SolveReport {
            free_solution: x,
            rel_residual: 0.0,
            n_free: n,
            iterations: Some(0),
            min_pivot: None,
        });
    }
    let mut ap = vec![0.0; n];
    let max_iter = 40 * n + 200;
    for it in 0..max_iter {
        spmv(&sys.matrix, &p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Numerical(format!(
                "CG direction with non-positive curvature at iteration {it}; system is not SPD"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rn: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rn / bn < 1e-12 {
            return Ok(SolveReport {
                free_solution: x,
                rel_residual: rn / bn,
                n_free: n,
                iterations: Some(it + 1),
                min_pivot: None,
            });
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Numerical(format!(
        "CG failed to reach 1e-12 within {max_iter} iterations"
    )))
}

pub fn solve_spd(sys: &ReducedSystem, kind: SolverKind) -> Result<SolveReport> {
    match kind {
        SolverKind::Direct => solve_direct(sys),
        SolverKind::ConjugateGradient => solve_cg(sys),
    }
}

/// Reinflate a reduced solution into the full slot vector (prescribed
/// Dirichlet values at constrained slots).
pub fn full_solution(
    dof_map: &crate::assembly::DofMap,
    sys: &ReducedSystem,
    report: &SolveReport,
) -> Vec<f64> {
    let mut u = sys.prescribed.clone();
    for (slot, f) in dof_map.free_index.iter().enumerate() {
        if let Some(fi) = f {
            u[slot] = report.free_solution[*fi];
        }
    }
    u
}
