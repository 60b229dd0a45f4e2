//! Local stiffness (consistency + dofi-dofi stabilization), load and
//! Robin boundary contributions.

use nalgebra::{DMatrix, DVector, Point2, Vector2};

use crate::error::Result;
use crate::geometry::{directed_edge_point, EdgeGeometry, Mesh, QuadConfig};

use super::projectors::LocalOperators;
use super::trace::BoundaryData;

/// Local element contributions to the global system.
pub struct LocalSystem {
    /// Symmetric N x N stiffness: kappa (Pi' G Pi + R' M R).
    pub stiffness: DMatrix<f64>,
    /// Load vector (f, T phi_i).
    pub load: DVector<f64>,
    /// Affine right-hand-side vector produced by a known curved Dirichlet
    /// trace: the global rhs receives -dirichlet_rhs.
    pub dirichlet_rhs: DVector<f64>,
    /// Robin edge mass (zero when no Robin edge touches the element).
    pub robin_matrix: DMatrix<f64>,
    /// Robin load including affine corrections.
    pub robin_rhs: DVector<f64>,
}

/// kappa-weighted stiffness with the stabilization restricted to the slots
/// enabled in `mask` (all slots when `None`). Returns the matrix and the
/// affine vector coming from prescribed trace data (zero for element
/// classes without one).
pub fn local_stiffness(
    ops: &LocalOperators,
    kappa: f64,
    mask: Option<&[bool]>,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = ops.layout.len();
    let consistency = ops.pi_nabla.transpose() * &ops.stiffness_gram * &ops.pi_nabla;
    let mut residual = DMatrix::identity(n, n) - &ops.pi_nabla_gen;
    if let Some(mask) = mask {
        debug_assert_eq!(mask.len(), n);
        for (i, &on) in mask.iter().enumerate() {
            if !on {
                residual.row_mut(i).fill(0.0);
            }
        }
    }
    let stab = residual.transpose() * &residual;
    let k_mat = (consistency + stab) * kappa;

    let mut rhs = DVector::zeros(n);
    let off = &ops.pi_nabla_offset;
    if off.amax() > 0.0 {
        // residual of the Dirichlet lifting (all free slots zero) is
        // -D*offset; the masked residual transpose applies the mask.
        let cons_aff = ops.pi_nabla.transpose() * (&ops.stiffness_gram * off);
        let stab_aff = residual.transpose() * (-(&ops.d_matrix * off));
        rhs = (cons_aff + stab_aff) * kappa;
    }
    (k_mat, rhs)
}

/// Load vector: F = T' (moments of f against the monomials), with
/// T = Pi_nabla for k = 1 and T = Pi0_{k-2} for k >= 2.
pub fn local_load(
    mesh: &Mesh,
    ops: &LocalOperators,
    f: &dyn Fn(Point2<f64>) -> f64,
    order: usize,
    cfg: &QuadConfig,
) -> Result<DVector<f64>> {
    let k = ops.layout.k;
    let (pts, wts) = mesh.interior_quadrature(ops.element, order, cfg)?;
    let cols = if k == 1 {
        3
    } else {
        crate::poly2d::dim_pk(k as i64 - 2, 2)
    };
    let mut b = DVector::zeros(cols);
    for (p, &w) in pts.iter().zip(&wts) {
        let fv = f(*p);
        if fv == 0.0 {
            continue;
        }
        let vals = ops.basis.eval(*p);
        for j in 0..cols {
            b[j] += w * fv * vals[j];
        }
    }
    let op = if k == 1 {
        ops.pi_nabla.clone()
    } else {
        ops.pi0.as_ref().expect("k >= 2").clone()
    };
    Ok(op.transpose() * b)
}

/// Edge mass matrix and load for one Robin edge (loop position `pos`).
/// rho = 0 gives the Neumann limit. The affine part of the traces (known
/// curved Dirichlet data elsewhere on the element) folds into the rhs.
pub fn local_robin(
    mesh: &Mesh,
    ops: &LocalOperators,
    pos: usize,
    rho: &dyn Fn(Point2<f64>) -> f64,
    g_r: &dyn Fn(Point2<f64>, Vector2<f64>) -> f64,
    bdata: BoundaryData,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = ops.layout.len();
    let mut mass = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    let rule = &ops.boundary_rules[pos];
    let trace = &ops.traces[pos];
    let el = &mesh.elements[ops.element];
    let de = &el.edge_loop[pos];
    let edge = &mesh.edges[de.edge];
    for (ni, ((p, t), &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let s = match &edge.geometry {
            EdgeGeometry::Straight => *t,
            EdgeGeometry::Curved(seg) => {
                let (t0, t1) = seg.t_range();
                super::trace::traversal_fraction(de, *t, t0, t1)
            }
        };
        let tv = trace.eval(s, *p, bdata);
        let r = rho(*p);
        let g = g_r(*p, rule.normals[ni]);
        for &(i, ci) in &tv.terms {
            rhs[i] += w * (g - r * tv.offset) * ci;
            if r != 0.0 {
                for &(j, cj) in &tv.terms {
                    mass[(i, j)] += w * r * ci * cj;
                }
            }
        }
    }
    (mass, rhs)
}

/// Trace of a generator vector at traversal fraction `s` of the element's
/// edge at loop position `pos`.
pub fn trace_value(
    mesh: &Mesh,
    ops: &LocalOperators,
    pos: usize,
    s: f64,
    gens: &DVector<f64>,
    bdata: BoundaryData,
) -> Result<f64> {
    let el = &mesh.elements[ops.element];
    let de = &el.edge_loop[pos];
    let p = directed_edge_point(mesh, de, s)?;
    Ok(ops.traces[pos].eval(s, p, bdata).value(gens))
}
