//! Boundary trace evaluation as affine functionals of the generator slots.
//!
//! On straight edges the trace is the degree-k Lagrange interpolant of the
//! endpoint and Gauss-Lobatto slot values. On a curved edge it is the
//! restriction of the unique 2-D polynomial of P_k that matches the slot
//! values at the edge endpoints and the trace generator points. On a
//! curved Dirichlet edge the trace is the prescribed boundary function
//! itself. Endpoints lying on a curved Dirichlet edge contribute known
//! boundary values instead of slots.

use nalgebra::{DMatrix, Point2};

use crate::error::{Error, Result};
use crate::geometry::quadrature::gauss_lobatto_interior;
use crate::geometry::{tg_points, DirectedEdge, Mesh};
use crate::poly2d::{dim_pk, ScaledMonomialBasis};

use super::layout::{ElementClass, GeneratorLayout, Slot};

/// Value of a linear functional of the generators plus a known offset
/// stemming from prescribed Dirichlet data.
#[derive(Debug, Clone)]
pub struct AffineValue {
    pub terms: Vec<(usize, f64)>,
    pub offset: f64,
}

impl AffineValue {
    pub fn value(&self, gens: &nalgebra::DVector<f64>) -> f64 {
        self.terms.iter().map(|&(i, c)| c * gens[i]).sum::<f64>() + self.offset
    }
}

#[derive(Debug, Clone)]
enum TraceSource {
    Slot(usize),
    /// Known boundary value at this point, evaluated through the Dirichlet
    /// data when present (zero otherwise).
    Boundary(Point2<f64>),
}

#[derive(Debug, Clone)]
pub enum EdgeTrace {
    /// 1-D Lagrange interpolation in the traversal parameter s in [0, 1].
    Lagrange {
        nodes_s: Vec<f64>,
        sources: Vec<TraceSourceOpaque>,
    },
    /// Restriction of the 2-D interpolating polynomial over the ideal
    /// triangle nodes; evaluated at physical points.
    PolyK {
        /// V^{-1} with V_(i j) = m_j(node_i); trace(x) = Σ_i u_i (V^{-T} φ(x))_i
        vinv: DMatrix<f64>,
        basis: ScaledMonomialBasis,
        sources: Vec<TraceSourceOpaque>,
    },
    /// Prescribed trace ψ on a curved Dirichlet edge.
    Known,
}

/// Newtype keeping TraceSource private to this module.
#[derive(Debug, Clone)]
pub struct TraceSourceOpaque(TraceSource);

/// Boundary data used to resolve known values; `None` means ψ = 0.
pub type BoundaryData<'a> = Option<&'a dyn Fn(Point2<f64>) -> f64>;

impl EdgeTrace {
    /// Evaluate the trace functional at traversal fraction `s` (straight
    /// edges) / physical point `p` (all kinds).
    pub fn eval(&self, s: f64, p: Point2<f64>, bdata: BoundaryData) -> AffineValue {
        match self {
            EdgeTrace::Lagrange { nodes_s, sources } => {
                let mut terms = Vec::with_capacity(sources.len());
                let mut offset = 0.0;
                for (i, src) in sources.iter().enumerate() {
                    // Lagrange basis at node i evaluated in s
                    let mut l = 1.0;
                    for (j, &sj) in nodes_s.iter().enumerate() {
                        if j != i {
                            l *= (s - sj) / (nodes_s[i] - sj);
                        }
                    }
                    match &src.0 {
                        TraceSource::Slot(k) => terms.push((*k, l)),
                        TraceSource::Boundary(q) => {
                            offset += l * bdata.map_or(0.0, |g| g(*q));
                        }
                    }
                }
                AffineValue { terms, offset }
            }
            EdgeTrace::PolyK {
                vinv,
                basis,
                sources,
            } => {
                let phi = basis.eval(p);
                let lag = vinv.transpose() * phi;
                let mut terms = Vec::with_capacity(sources.len());
                let mut offset = 0.0;
                for (i, src) in sources.iter().enumerate() {
                    match &src.0 {
                        TraceSource::Slot(k) => terms.push((*k, lag[i])),
                        TraceSource::Boundary(q) => {
                            offset += lag[i] * bdata.map_or(0.0, |g| g(*q));
                        }
                    }
                }
                AffineValue { terms, offset }
            }
            EdgeTrace::Known => AffineValue {
                terms: Vec::new(),
                offset: bdata.map_or(0.0, |g| g(p)),
            },
        }
    }
}

/// Trace evaluators for each directed edge of an element, plus the trace
/// generator points of the curved edge (when it carries slots).
pub struct ElementTraces {
    pub edges: Vec<EdgeTrace>,
    pub tg_points: Vec<Point2<f64>>,
}

pub fn build_traces(
    mesh: &Mesh,
    element: usize,
    layout: &GeneratorLayout,
    tgp_perturbation: f64,
) -> Result<ElementTraces> {
    let el = &mesh.elements[element];
    let k = layout.k;
    let gl = gauss_lobatto_interior(k)?;
    let mut traces = Vec::with_capacity(el.edge_loop.len());
    let mut tgp_pts = Vec::new();

    let vertex_source = |v: usize| -> TraceSourceOpaque {
        match layout.vertex_slot.get(&v) {
            Some(&slot) => TraceSourceOpaque(TraceSource::Slot(slot)),
            None => TraceSourceOpaque(TraceSource::Boundary(mesh.vertices[v])),
        }
    };

    for (pos, de) in el.edge_loop.iter().enumerate() {
        let e = &mesh.edges[de.edge];
        if !e.is_declared_curved() {
            // straight edge: endpoints + canonical GL nodes
            let (from, to) = if de.forward { (e.v0, e.v1) } else { (e.v1, e.v0) };
            let mut nodes_s = vec![0.0, 1.0];
            let mut sources = vec![vertex_source(from), vertex_source(to)];
            for (node, &xi) in gl.iter().enumerate() {
                // canonical position along v0 -> v1, expressed in traversal s
                let canon = 0.5 * (xi + 1.0);
                nodes_s.push(if de.forward { canon } else { 1.0 - canon });
                let slot = layout
                    .slots
                    .iter()
                    .position(|s| matches!(s, Slot::EdgeGl { edge, node: n } if *edge == de.edge && *n == node))
                    .ok_or_else(|| Error::Contract("missing GL slot".into()))?;
                sources.push(TraceSourceOpaque(TraceSource::Slot(slot)));
            }
            traces.push(EdgeTrace::Lagrange { nodes_s, sources });
            continue;
        }

        // declared-curved edge
        if layout.class == ElementClass::CurvedDirichlet {
            traces.push(EdgeTrace::Known);
            continue;
        }
        debug_assert_eq!(Some(pos), layout.curved_pos);
        let a = mesh.vertices[e.v0];
        let b = mesh.vertices[e.v1];
        let pts = tg_points_of_edge_for_element(mesh, de.edge, k, tgp_perturbation, element)?;
        let chord = (b - a).norm();
        let basis = ScaledMonomialBasis::new(nalgebra::center(&a, &b), chord, k);
        let n = dim_pk(k as i64, 2);
        let mut nodes = Vec::with_capacity(n);
        nodes.push(a);
        nodes.push(b);
        nodes.extend(pts.iter().copied());
        let mut v = DMatrix::zeros(n, n);
        for (i, q) in nodes.iter().enumerate() {
            v.row_mut(i).copy_from_slice(basis.eval(*q).as_slice());
        }
        let vinv = v.clone().try_inverse().ok_or_else(|| {
            Error::Numerical(
                "trace interpolation system singular on ideal-triangle node set".into(),
            )
        })?;
        let mut sources = vec![vertex_source(e.v0), vertex_source(e.v1)];
        for node in 0..pts.len() {
            let slot = layout
                .slots
                .iter()
                .position(|s| matches!(s, Slot::Tgp { edge, node: m } if *edge == de.edge && *m == node))
                .ok_or_else(|| Error::Contract("missing tgp slot".into()))?;
            sources.push(TraceSourceOpaque(TraceSource::Slot(slot)));
        }
        tgp_pts = pts;
        traces.push(EdgeTrace::PolyK {
            vinv,
            basis,
            sources,
        });
    }

    // a curved Dirichlet element still needs its tg points for nothing;
    // classes 1/3 store them for the D matrix
    if layout.tgp_range.1 > 0 && tgp_pts.is_empty() {
        return Err(Error::Contract("layout expects tgp slots but none built".into()));
    }

    Ok(ElementTraces {
        edges: traces,
        tg_points: tgp_pts,
    })
}

/// Trace generator points of the curved edge, optionally perturbed
/// (validation hook for negative controls). The perturbation depends on
/// the consuming element, deliberately breaking the shared-edge
/// determinism the method relies on; a self-consistent shift would leave
/// the node set unisolvent and the patch test green.
pub fn tg_points_of_edge(
    mesh: &Mesh,
    edge: usize,
    k: usize,
    perturbation: f64,
) -> Result<Vec<Point2<f64>>> {
    tg_points_of_edge_for_element(mesh, edge, k, perturbation, 0)
}

pub fn tg_points_of_edge_for_element(
    mesh: &Mesh,
    edge: usize,
    k: usize,
    perturbation: f64,
    element: usize,
) -> Result<Vec<Point2<f64>>> {
    let e = &mesh.edges[edge];
    let a = mesh.vertices[e.v0];
    let b = mesh.vertices[e.v1];
    let mut pts = tg_points(a, b, e.curve(), k)?;
    if perturbation != 0.0 {
        let chord = (b - a).norm();
        for (i, p) in pts.iter_mut().enumerate() {
            // deterministic pseudo-random direction per point and element
            let ang = (edge * 37 + i * 101 + element * 13) as f64;
            p.x += perturbation * chord * ang.sin();
            p.y += perturbation * chord * (1.3 * ang).cos();
        }
    }
    Ok(pts)
}

/// Apply a DirectedEdge traversal fraction to get the matching curve
/// parameter s used by rules built for that element.
pub fn traversal_fraction(de: &DirectedEdge, t: f64, t0: f64, t1: f64) -> f64 {
    let s = (t - t0) / (t1 - t0);
    if de.forward {
        s
    } else {
        1.0 - s
    }
}
