//! Local projection operators: the generator matrix D, the H1-seminorm
//! projector onto P_k fixed by the boundary mean, and the L2 projector
//! onto P_{k-2} read off the moment slots.

use nalgebra::{DMatrix, DVector, Point2};

use crate::error::{Error, Result};
use crate::geometry::quadrature::BoundaryQuadRule;
use crate::geometry::{monomial_moments, Mesh, QuadConfig};
use crate::poly2d::{
    dim_pk, mass_moments, multi_indices, stiffness_gram, ElementMoments, ScaledMonomialBasis,
};

use super::layout::{build_layout, GeneratorLayout, Slot};
use super::trace::{build_traces, BoundaryData, EdgeTrace};

/// Everything needed to evaluate projections and local forms on one
/// element. Immutable after construction.
pub struct LocalOperators {
    pub element: usize,
    pub layout: GeneratorLayout,
    pub basis: ScaledMonomialBasis,
    pub moments: ElementMoments,
    /// Generator values of each basis monomial (N x pi_k).
    pub d_matrix: DMatrix<f64>,
    /// Generators -> coefficients of the H1 projection (pi_k x N).
    pub pi_nabla: DMatrix<f64>,
    /// Affine part contributed by prescribed Dirichlet trace data.
    pub pi_nabla_offset: DVector<f64>,
    /// D * pi_nabla: the projector expressed on generators (N x N).
    pub pi_nabla_gen: DMatrix<f64>,
    /// Generators -> coefficients of the L2 projection onto P_{k-2}.
    pub pi0: Option<DMatrix<f64>>,
    /// ∫ ∇m_a · ∇m_b (unmodified).
    pub stiffness_gram: DMatrix<f64>,
    pub boundary_rules: Vec<BoundaryQuadRule>,
    pub traces: Vec<EdgeTrace>,
    pub tg_points: Vec<Point2<f64>>,
    pub area: f64,
    pub perimeter: f64,
}

impl LocalOperators {
    pub fn build(
        mesh: &Mesh,
        element: usize,
        k: usize,
        cfg: &QuadConfig,
        dirichlet_data: BoundaryData,
    ) -> Result<LocalOperators> {
        Self::build_perturbed(mesh, element, k, cfg, dirichlet_data, 0.0)
    }

    /// `tgp_perturbation` shifts the trace generator points by that
    /// fraction of the chord; nonzero only in negative-control runs.
    pub fn build_perturbed(
        mesh: &Mesh,
        element: usize,
        k: usize,
        cfg: &QuadConfig,
        dirichlet_data: BoundaryData,
        tgp_perturbation: f64,
    ) -> Result<LocalOperators> {
        let el = &mesh.elements[element];
        let layout = build_layout(mesh, element, k)?;
        let basis = ScaledMonomialBasis::new(el.centroid, el.diameter, k);
        let moments = monomial_moments(mesh, element, &basis, 2 * k, cfg)?;
        let area = moments.area();
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::Geometry(format!(
                "element {element}: invalid area {area}"
            )));
        }
        let boundary_rules = mesh.element_boundary_rules(element, cfg)?;
        let traces_built = build_traces(mesh, element, &layout, tgp_perturbation)?;
        let traces = traces_built.edges;
        let tg_pts = traces_built.tg_points;
        let perimeter: f64 = boundary_rules.iter().map(|r| r.arclength()).sum();

        let n = layout.len();
        let pk = basis.dim();

        // D: generator values of the monomials
        let mass_km2 = if k >= 2 {
            Some(mass_moments(&basis, &moments, k - 2))
        } else {
            None
        };
        let mut d_matrix = DMatrix::zeros(n, pk);
        for (i, slot) in layout.slots.iter().enumerate() {
            match slot {
                Slot::Vertex(v) => d_matrix
                    .row_mut(i)
                    .copy_from_slice(basis.eval(mesh.vertices[*v]).as_slice()),
                Slot::EdgeGl { edge, node } => {
                    let p = crate::geometry::mesh::edge_gl_points(mesh, *edge, k)?[*node];
                    d_matrix.row_mut(i).copy_from_slice(basis.eval(p).as_slice());
                }
                Slot::Tgp { node, .. } => {
                    // rows use the fictitious tg points themselves
                    let p = tg_pts[*node];
                    d_matrix.row_mut(i).copy_from_slice(basis.eval(p).as_slice());
                }
                Slot::Moment { ax, ay } => {
                    let m = mass_km2.as_ref().expect("moment slots imply k >= 2");
                    let j = crate::poly2d::multi_index_position(*ax, *ay);
                    for b in 0..pk {
                        d_matrix[(i, b)] = m[(b, j)] / area;
                    }
                }
            }
        }

        // Pi_nabla: solve [G with mean row] C = [B | b_offset]
        let g_nabla = stiffness_gram(&basis, &moments);
        let mut g_sys = g_nabla.clone();
        // replace the m_0 row by the boundary-mean condition
        for b in 0..pk {
            let (bx, by) = basis.indices()[b];
            let mut v = 0.0;
            for rule in &boundary_rules {
                for ((p, _), &w) in rule.nodes.iter().zip(&rule.weights) {
                    v += w * basis.eval_single(bx, by, *p);
                }
            }
            g_sys[(0, b)] = v / perimeter;
        }

        let mut rhs = DMatrix::zeros(pk, n);
        let mut rhs_off = DVector::zeros(pk);
        // boundary terms: row 0 = mean of the trace, rows a = ∮ v ∂m_a/∂n
        let el_loop = &el.edge_loop;
        for (pos, rule) in boundary_rules.iter().enumerate() {
            let trace = &traces[pos];
            let de = &el_loop[pos];
            let edge = &mesh.edges[de.edge];
            for (ni, ((p, t), &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                let s = match &edge.geometry {
                    crate::geometry::EdgeGeometry::Straight => *t,
                    crate::geometry::EdgeGeometry::Curved(seg) => {
                        let (t0, t1) = seg.t_range();
                        super::trace::traversal_fraction(de, *t, t0, t1)
                    }
                };
                let tv = trace.eval(s, *p, dirichlet_data);
                let grads = basis.grad(*p);
                let normal = rule.normals[ni];
                // mean row
                for &(slot, c) in &tv.terms {
                    rhs[(0, slot)] += w * c / perimeter;
                }
                rhs_off[0] += w * tv.offset / perimeter;
                for (a, ga) in grads.iter().enumerate().skip(1) {
                    let dn = ga.dot(&normal) * w;
                    for &(slot, c) in &tv.terms {
                        rhs[(a, slot)] += dn * c;
                    }
                    rhs_off[a] += dn * tv.offset;
                }
            }
        }
        // volume terms: -∫ v Δm_a from the moment slots (exact)
        if k >= 2 {
            for a in 1..pk {
                let (ax, ay) = basis.indices()[a];
                for (bpos, c) in basis.laplacian_coeffs(ax, ay) {
                    let (bx, by) = basis.indices()[bpos];
                    // find the moment slot carrying (1/|P|) ∫ v m_b
                    let slot = layout
                        .moment_slots()
                        .find(|&s| {
                            matches!(layout.slots[s], Slot::Moment { ax: mx, ay: my } if mx == bx && my == by)
                        })
                        .expect("laplacian degree fits the moment slots");
                    rhs[(a, slot)] -= c * area;
                }
            }
        }

        let lu = g_sys.lu();
        let pi_nabla = lu.solve(&rhs).ok_or_else(|| {
            Error::Numerical(format!(
                "element {element}: singular projector system (mesh assumption violated?)"
            ))
        })?;
        let pi_nabla_offset = lu
            .solve(&rhs_off)
            .ok_or_else(|| Error::Numerical("projector offset solve failed".into()))?;

        let pi_nabla_gen = &d_matrix * &pi_nabla;

        // Pi^0_{k-2} from the moment slots
        let pi0 = if k >= 2 {
            let pkm2 = dim_pk(k as i64 - 2, 2);
            let m = mass_km2.as_ref().unwrap();
            let h = m.view((0, 0), (pkm2, pkm2)).into_owned();
            let mut rhs0 = DMatrix::zeros(pkm2, n);
            for (j, (ax, ay)) in multi_indices(k - 2).into_iter().enumerate() {
                let slot = layout
                    .moment_slots()
                    .find(|&s| {
                        matches!(layout.slots[s], Slot::Moment { ax: mx, ay: my } if mx == ax && my == ay)
                    })
                    .expect("moment slot");
                rhs0[(j, slot)] = area;
            }
            let c = h.lu().solve(&rhs0).ok_or_else(|| {
                Error::Numerical(format!("element {element}: singular mass system"))
            })?;
            Some(c)
        } else {
            None
        };

        Ok(LocalOperators {
            element,
            layout,
            basis,
            moments,
            d_matrix,
            pi_nabla,
            pi_nabla_offset,
            pi_nabla_gen,
            pi0,
            stiffness_gram: g_nabla,
            boundary_rules,
            traces,
            tg_points: tg_pts,
            area,
            perimeter,
        })
    }

    /// Coefficients of Pi_nabla applied to a generator vector (includes the
    /// Dirichlet offset when the element has a known curved trace).
    pub fn project_h1(&self, gens: &DVector<f64>) -> DVector<f64> {
        &self.pi_nabla * gens + &self.pi_nabla_offset
    }

    /// L2 projection onto P_{k-2}; errors at k = 1 by contract.
    pub fn project_l2_km2(&self, gens: &DVector<f64>) -> Result<DVector<f64>> {
        match &self.pi0 {
            Some(c) => Ok(c * gens),
            None => Err(Error::Contract(
                "Pi0_{k-2} requires k >= 2; the k = 1 load path uses Pi_nabla".into(),
            )),
        }
    }
}
