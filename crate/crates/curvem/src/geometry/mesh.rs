//! Curved-polygon meshes: topology, validation and per-element geometry.

use std::collections::BTreeMap;

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::curve::CurveSegment;
use crate::geometry::quadrature::{
    curved_edge_rule, gauss_legendre_01, straight_edge_rule, BoundaryQuadRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Declared {
    Straight,
    Curved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Interior,
    Dirichlet,
    Robin,
}

#[derive(Debug, Clone)]
pub enum EdgeGeometry {
    Straight,
    Curved(CurveSegment),
}

/// Mesh edge with canonical orientation v0 < v1. The curve of a curved
/// edge runs from vertex v0 (at t0) to vertex v1 (at t1), so both adjacent
/// elements derive identical trace generator data.
#[derive(Debug, Clone)]
pub struct MeshEdge {
    pub v0: usize,
    pub v1: usize,
    pub geometry: EdgeGeometry,
    pub declared: Declared,
    pub boundary: BoundaryKind,
}

impl MeshEdge {
    pub fn straight(v0: usize, v1: usize, boundary: BoundaryKind) -> Self {
        Self {
            v0,
            v1,
            geometry: EdgeGeometry::Straight,
            declared: Declared::Straight,
            boundary,
        }
    }

    pub fn curved(v0: usize, v1: usize, seg: CurveSegment, boundary: BoundaryKind) -> Self {
        Self {
            v0,
            v1,
            geometry: EdgeGeometry::Curved(seg),
            declared: Declared::Curved,
            boundary,
        }
    }

    pub fn is_declared_curved(&self) -> bool {
        self.declared == Declared::Curved
    }

    pub fn curve(&self) -> Option<&CurveSegment> {
        match &self.geometry {
            EdgeGeometry::Curved(seg) => Some(seg),
            EdgeGeometry::Straight => None,
        }
    }
}

/// Edge reference inside an element loop; `forward` means traversal from
/// v0 to v1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectedEdge {
    pub edge: usize,
    pub forward: bool,
}

/// Input description of one element.
#[derive(Debug, Clone)]
pub struct ElementSpec {
    pub edge_loop: Vec<DirectedEdge>,
    pub region: u32,
}

#[derive(Debug, Clone)]
pub struct Element {
    pub edge_loop: Vec<DirectedEdge>,
    pub region: u32,
    /// Start vertex of each directed edge, counterclockwise.
    pub vertex_loop: Vec<usize>,
    pub diameter: f64,
    pub centroid: Point2<f64>,
    pub area: f64,
    pub perimeter: f64,
    /// Fan apex for interior quadrature; `None` when no valid star center
    /// was found (interior rules will refuse to run).
    pub star_center: Option<Point2<f64>>,
    /// Star-shapedness diagnostic: (min distance star center -> boundary) / diameter.
    pub rho_ratio: f64,
    /// Assumption-B diagnostic: min edge arclength / diameter.
    pub min_edge_ratio: f64,
}

impl Element {
    /// Loop position of the declared-curved edge, if any.
    pub fn curved_loop_pos(&self, mesh: &Mesh) -> Option<usize> {
        self.edge_loop
            .iter()
            .position(|de| mesh.edges[de.edge].is_declared_curved())
    }
}

/// Quadrature configuration shared by all geometric integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Gauss points per curved edge.
    pub curved_edge_points: usize,
    /// Gauss points per straight edge.
    pub straight_edge_points: usize,
}

impl QuadConfig {
    /// Default for order k: over-integrates curved edges far below
    /// discretization error at desk scale.
    pub fn for_order(k: usize) -> Self {
        Self {
            curved_edge_points: (4 * k + 4).max(16),
            straight_edge_points: (k + 2).max(8),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point2<f64>>,
    pub edges: Vec<MeshEdge>,
    pub elements: Vec<Element>,
    /// Diffusion coefficient per region id.
    pub kappa: BTreeMap<u32, f64>,
    /// Elements adjacent to each edge (1 for boundary, 2 for interior).
    pub edge_elements: Vec<Vec<usize>>,
    pub edge_lengths: Vec<f64>,
}

impl Mesh {
    pub fn build(
        vertices: Vec<Point2<f64>>,
        mut edges: Vec<MeshEdge>,
        elements: Vec<ElementSpec>,
        kappa: BTreeMap<u32, f64>,
        cfg: &QuadConfig,
    ) -> Result<Mesh> {
        let nv = vertices.len();
        for (i, e) in edges.iter_mut().enumerate() {
            if e.v0 >= nv || e.v1 >= nv {
                return Err(Error::Mesh(format!("edge {i}: vertex index out of range")));
            }
            if e.v0 >= e.v1 {
                return Err(Error::Mesh(format!(
                    "edge {i}: canonical orientation requires v0 < v1 (got {} >= {})",
                    e.v0, e.v1
                )));
            }
            match (&e.declared, &mut e.geometry) {
                (Declared::Straight, EdgeGeometry::Curved(_)) => {
                    return Err(Error::Mesh(format!(
                        "edge {i}: declared straight but has curved geometry"
                    )));
                }
                (Declared::Curved, g @ EdgeGeometry::Straight) => {
                    // normalize: a straight edge declared curved is carried
                    // as a Line curve so the tgp machinery applies uniformly
                    *g = EdgeGeometry::Curved(CurveSegment::line(
                        vertices[e.v0],
                        vertices[e.v1],
                    ));
                }
                _ => {}
            }
            if let Some(seg) = e.curve() {
                let chord = (vertices[e.v1] - vertices[e.v0]).norm();
                let tol = 1e-12 * chord.max(1.0);
                if (seg.start() - vertices[e.v0]).norm() > tol
                    || (seg.end() - vertices[e.v1]).norm() > tol
                {
                    return Err(Error::Mesh(format!(
                        "edge {i}: curve endpoints do not match vertices"
                    )));
                }
            }
        }

        let edge_lengths: Vec<f64> = edges
            .iter()
            .map(|e| edge_arclength(&vertices, e, cfg))
            .collect::<Result<_>>()?;

        // adjacency and direction bookkeeping
        let mut edge_elements: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
        let mut edge_dirs: Vec<Vec<bool>> = vec![Vec::new(); edges.len()];
        for (ei, spec) in elements.iter().enumerate() {
            for de in &spec.edge_loop {
                if de.edge >= edges.len() {
                    return Err(Error::Mesh(format!(
                        "element {ei}: edge index {} out of range",
                        de.edge
                    )));
                }
                edge_elements[de.edge].push(ei);
                edge_dirs[de.edge].push(de.forward);
            }
        }
        for (i, (e, adj)) in edges.iter().zip(&edge_elements).enumerate() {
            match (e.boundary, adj.len()) {
                (BoundaryKind::Interior, 2) => {
                    if edge_dirs[i][0] == edge_dirs[i][1] {
                        return Err(Error::Mesh(format!(
                            "edge {i}: interior edge traversed in the same direction by both elements"
                        )));
                    }
                }
                (BoundaryKind::Interior, n) => {
                    return Err(Error::Mesh(format!(
                        "edge {i}: interior edge used by {n} elements (expected 2)"
                    )));
                }
                (BoundaryKind::Dirichlet | BoundaryKind::Robin, 1) => {}
                (b, n) => {
                    return Err(Error::Mesh(format!(
                        "edge {i}: {b:?} edge used by {n} elements (expected 1)"
                    )));
                }
            }
        }
        // interface edges (kappa jump) must be interior
        for (i, e) in edges.iter().enumerate() {
            if e.boundary != BoundaryKind::Interior && edge_elements[i].len() == 2 {
                return Err(Error::Mesh(format!("edge {i}: boundary-tagged interior edge")));
            }
        }

        let mut built = Vec::with_capacity(elements.len());
        for (ei, spec) in elements.into_iter().enumerate() {
            built.push(build_element(&vertices, &edges, &edge_lengths, spec, ei, cfg)?);
        }

        for (ei, el) in built.iter().enumerate() {
            if !kappa.contains_key(&el.region) {
                return Err(Error::Mesh(format!(
                    "element {ei}: region {} has no kappa value",
                    el.region
                )));
            }
        }
        for (region, &k) in &kappa {
            if k <= 0.0 {
                return Err(Error::Mesh(format!(
                    "region {region}: kappa must be positive (got {k})"
                )));
            }
        }

        Ok(Mesh {
            vertices,
            edges,
            elements: built,
            kappa,
            edge_elements,
            edge_lengths,
        })
    }

    pub fn kappa_of(&self, element: usize) -> f64 {
        self.kappa[&self.elements[element].region]
    }

    /// Whether an interior curved edge separates regions with different
    /// kappa values.
    pub fn is_kappa_jump_edge(&self, edge: usize) -> bool {
        let adj = &self.edge_elements[edge];
        adj.len() == 2 && (self.kappa_of(adj[0]) - self.kappa_of(adj[1])).abs() > 0.0
    }

    /// Boundary quadrature rules for every directed edge of an element, with
    /// outward normals for that element.
    pub fn element_boundary_rules(
        &self,
        element: usize,
        cfg: &QuadConfig,
    ) -> Result<Vec<BoundaryQuadRule>> {
        let el = &self.elements[element];
        el.edge_loop
            .iter()
            .map(|de| self.directed_edge_rule(de, cfg))
            .collect()
    }

    pub fn directed_edge_rule(
        &self,
        de: &DirectedEdge,
        cfg: &QuadConfig,
    ) -> Result<BoundaryQuadRule> {
        let e = &self.edges[de.edge];
        match &e.geometry {
            EdgeGeometry::Straight => {
                let (a, b) = if de.forward {
                    (self.vertices[e.v0], self.vertices[e.v1])
                } else {
                    (self.vertices[e.v1], self.vertices[e.v0])
                };
                Ok(straight_edge_rule(a, b, cfg.straight_edge_points))
            }
            EdgeGeometry::Curved(seg) => {
                curved_edge_rule(seg, cfg.curved_edge_points, de.forward)
            }
        }
    }

    /// Interior quadrature points/weights by fan decomposition from the
    /// element's star center. Straight pieces get Duffy triangle rules of
    /// the requested polynomial order; the curved sector gets a blended rule.
    pub fn interior_quadrature(
        &self,
        element: usize,
        order: usize,
        cfg: &QuadConfig,
    ) -> Result<(Vec<Point2<f64>>, Vec<f64>)> {
        let el = &self.elements[element];
        let center = el.star_center.ok_or_else(|| Error::MeshQuality {
            element,
            detail: "no valid star center for the interior fan rule".into(),
        })?;
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        for de in &el.edge_loop {
            let e = &self.edges[de.edge];
            match &e.geometry {
                EdgeGeometry::Straight => {
                    let (a, b) = if de.forward {
                        (self.vertices[e.v0], self.vertices[e.v1])
                    } else {
                        (self.vertices[e.v1], self.vertices[e.v0])
                    };
                    let (p, w) =
                        crate::geometry::quadrature::triangle_rule(center, a, b, order);
                    pts.extend(p);
                    wts.extend(w);
                }
                EdgeGeometry::Curved(seg) => {
                    let n_s = cfg.curved_edge_points.max((order + 3) / 2);
                    let n_r = (order + 3) / 2;
                    let (p, w) = crate::geometry::quadrature::sector_rule(
                        center,
                        seg,
                        n_s,
                        n_r.max(2),
                    )?;
                    pts.extend(p);
                    wts.extend(w);
                }
            }
        }
        Ok((pts, wts))
    }
}

fn edge_arclength(vertices: &[Point2<f64>], e: &MeshEdge, cfg: &QuadConfig) -> Result<f64> {
    match &e.geometry {
        EdgeGeometry::Straight => Ok((vertices[e.v1] - vertices[e.v0]).norm()),
        EdgeGeometry::Curved(seg) => {
            Ok(curved_edge_rule(seg, cfg.curved_edge_points, true)?.arclength())
        }
    }
}

/// Dense polyline sampling of a directed edge (including both endpoints),
/// used for visibility tests, diameters and diagnostics.
fn sample_directed_edge(
    vertices: &[Point2<f64>],
    edges: &[MeshEdge],
    de: &DirectedEdge,
    n: usize,
) -> Vec<Point2<f64>> {
    let e = &edges[de.edge];
    match &e.geometry {
        EdgeGeometry::Straight => {
            let (a, b) = if de.forward {
                (vertices[e.v0], vertices[e.v1])
            } else {
                (vertices[e.v1], vertices[e.v0])
            };
            (0..=n)
                .map(|i| a + (b - a) * (i as f64 / n as f64))
                .collect()
        }
        EdgeGeometry::Curved(seg) => {
            let (t0, t1) = seg.t_range();
            (0..=n)
                .map(|i| {
                    let s = i as f64 / n as f64;
                    let s = if de.forward { s } else { 1.0 - s };
                    seg.eval(t0 + s * (t1 - t0)).expect("in-range parameter")
                })
                .collect()
        }
    }
}

fn build_element(
    vertices: &[Point2<f64>],
    edges: &[MeshEdge],
    edge_lengths: &[f64],
    spec: ElementSpec,
    index: usize,
    cfg: &QuadConfig,
) -> Result<Element> {
    let n = spec.edge_loop.len();
    if n < 2 {
        return Err(Error::Mesh(format!("element {index}: fewer than 2 edges")));
    }
    // loop closure and vertex chain
    let mut vertex_loop = Vec::with_capacity(n);
    for (i, de) in spec.edge_loop.iter().enumerate() {
        let e = &edges[de.edge];
        let (from, to) = if de.forward { (e.v0, e.v1) } else { (e.v1, e.v0) };
        let next = &spec.edge_loop[(i + 1) % n];
        let en = &edges[next.edge];
        let next_from = if next.forward { en.v0 } else { en.v1 };
        if to != next_from {
            return Err(Error::Mesh(format!(
                "element {index}: boundary loop not closed at position {i}"
            )));
        }
        vertex_loop.push(from);
    }
    let curved_count = spec
        .edge_loop
        .iter()
        .filter(|de| edges[de.edge].is_declared_curved())
        .count();
    if curved_count > 1 {
        return Err(Error::Mesh(format!(
            "element {index}: {curved_count} curved edges (at most one allowed)"
        )));
    }

    // raw moments of 1, x, y via the divergence theorem around the loop
    let mut area = 0.0;
    let mut mx = 0.0;
    let mut my = 0.0;
    for de in &spec.edge_loop {
        let rule = directed_rule_raw(vertices, edges, de, cfg)?;
        for ((p, _), (&w, nrm)) in rule.nodes.iter().zip(rule.weights.iter().zip(&rule.normals)) {
            area += w * nrm.x * p.x;
            mx += w * nrm.x * 0.5 * p.x * p.x;
            my += w * nrm.x * p.x * p.y;
        }
    }
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::Mesh(format!(
            "element {index}: non-positive area {area} (loop must be counterclockwise and simple)"
        )));
    }
    let centroid = Point2::new(mx / area, my / area);

    // boundary samples for diameter / star tests
    let samples: Vec<Vec<Point2<f64>>> = spec
        .edge_loop
        .iter()
        .map(|de| sample_directed_edge(vertices, edges, de, 16))
        .collect();
    let flat: Vec<Point2<f64>> = samples.iter().flatten().copied().collect();
    let mut diameter: f64 = 0.0;
    for i in 0..flat.len() {
        for j in (i + 1)..flat.len() {
            diameter = diameter.max((flat[i] - flat[j]).norm());
        }
    }

    let margin = |c: Point2<f64>| -> f64 {
        let mut m = f64::INFINITY;
        for chain in &samples {
            for pair in chain.windows(2) {
                let (p, q) = (pair[0], pair[1]);
                let d = q - p;
                let len = d.norm();
                if len <= 1e-300 {
                    continue;
                }
                let cross = d.x * (c.y - p.y) - d.y * (c.x - p.x);
                m = m.min(cross / len);
            }
        }
        m
    };

    let mut star_center = None;
    let mut rho = margin(centroid);
    if rho > 1e-9 * diameter {
        star_center = Some(centroid);
    } else {
        // fall back to a Chebyshev-like center of the chordal polygon:
        // coarse grid search refined around the best candidate
        let (mut lo, mut hi) = (flat[0], flat[0]);
        for p in &flat {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let mut best = (rho, centroid);
        let mut span = hi - lo;
        let mut origin = lo;
        for _pass in 0..3 {
            let grid = 24;
            for i in 0..=grid {
                for j in 0..=grid {
                    let c = Point2::new(
                        origin.x + span.x * i as f64 / grid as f64,
                        origin.y + span.y * j as f64 / grid as f64,
                    );
                    let m = margin(c);
                    if m > best.0 {
                        best = (m, c);
                    }
                }
            }
            span /= 4.0;
            origin = best.1 - span / 2.0;
        }
        if best.0 > 1e-9 * diameter {
            star_center = Some(best.1);
            rho = best.0;
        }
    }

    let perimeter: f64 = spec.edge_loop.iter().map(|de| edge_lengths[de.edge]).sum();
    let min_edge = spec
        .edge_loop
        .iter()
        .map(|de| edge_lengths[de.edge])
        .fold(f64::INFINITY, f64::min);

    Ok(Element {
        edge_loop: spec.edge_loop,
        region: spec.region,
        vertex_loop,
        diameter,
        centroid,
        area,
        perimeter,
        star_center,
        rho_ratio: rho.max(0.0) / diameter,
        min_edge_ratio: min_edge / diameter,
    })
}

fn directed_rule_raw(
    vertices: &[Point2<f64>],
    edges: &[MeshEdge],
    de: &DirectedEdge,
    cfg: &QuadConfig,
) -> Result<BoundaryQuadRule> {
    let e = &edges[de.edge];
    match &e.geometry {
        EdgeGeometry::Straight => {
            let (a, b) = if de.forward {
                (vertices[e.v0], vertices[e.v1])
            } else {
                (vertices[e.v1], vertices[e.v0])
            };
            Ok(straight_edge_rule(a, b, cfg.straight_edge_points.max(4)))
        }
        EdgeGeometry::Curved(seg) => curved_edge_rule(seg, cfg.curved_edge_points, de.forward),
    }
}

/// Perimeter by dense parameter sampling, independent of the Gauss rules.
/// Used as a cross-oracle in tests.
pub fn perimeter_by_sampling(mesh: &Mesh, element: usize, samples_per_edge: usize) -> f64 {
    let el = &mesh.elements[element];
    let mut total = 0.0;
    for de in &el.edge_loop {
        let pts = sample_directed_edge(&mesh.vertices, &mesh.edges, de, samples_per_edge);
        for pair in pts.windows(2) {
            total += (pair[1] - pair[0]).norm();
        }
    }
    total
}

/// Convenience: evaluate a directed edge at traversal fraction s in [0, 1].
pub fn directed_edge_point(mesh: &Mesh, de: &DirectedEdge, s: f64) -> Result<Point2<f64>> {
    let e = &mesh.edges[de.edge];
    match &e.geometry {
        EdgeGeometry::Straight => {
            let (a, b) = if de.forward {
                (mesh.vertices[e.v0], mesh.vertices[e.v1])
            } else {
                (mesh.vertices[e.v1], mesh.vertices[e.v0])
            };
            Ok(a + (b - a) * s)
        }
        EdgeGeometry::Curved(seg) => {
            let (t0, t1) = seg.t_range();
            let s = if de.forward { s } else { 1.0 - s };
            seg.eval(t0 + s * (t1 - t0))
        }
    }
}

/// Build the interior Gauss-Lobatto points of a straight edge in canonical
/// (v0 -> v1) order.
pub fn edge_gl_points(mesh: &Mesh, edge: usize, k: usize) -> Result<Vec<Point2<f64>>> {
    let e = &mesh.edges[edge];
    let a = mesh.vertices[e.v0];
    let b = mesh.vertices[e.v1];
    Ok(crate::geometry::quadrature::gauss_lobatto_interior(k)?
        .into_iter()
        .map(|xi| a + (b - a) * (0.5 * (xi + 1.0)))
        .collect())
}

/// Midpoint-split refinement of all straight edges of a single-element
/// mesh; used by the diagnostics-monotonicity test.
pub fn split_straight_edges(mesh: &Mesh, cfg: &QuadConfig) -> Result<Mesh> {
    assert_eq!(mesh.elements.len(), 1, "test helper for single elements");
    let el = &mesh.elements[0];
    let mut vertices = mesh.vertices.clone();
    let mut edges: Vec<MeshEdge> = Vec::new();
    let mut edge_loop = Vec::new();
    for de in &el.edge_loop {
        let e = &mesh.edges[de.edge];
        match &e.geometry {
            EdgeGeometry::Straight => {
                let mid = nalgebra::center(&vertices[e.v0], &vertices[e.v1]);
                let mid_id = vertices.len();
                vertices.push(mid);
                let (from, to) = if de.forward { (e.v0, e.v1) } else { (e.v1, e.v0) };
                for (a, b) in [(from, mid_id), (mid_id, to)] {
                    let (v0, v1) = (a.min(b), a.max(b));
                    edge_loop.push(DirectedEdge {
                        edge: edges.len(),
                        forward: v0 == a,
                    });
                    edges.push(MeshEdge::straight(v0, v1, e.boundary));
                }
            }
            EdgeGeometry::Curved(seg) => {
                edge_loop.push(DirectedEdge {
                    edge: edges.len(),
                    forward: de.forward,
                });
                edges.push(MeshEdge {
                    v0: e.v0,
                    v1: e.v1,
                    geometry: EdgeGeometry::Curved(seg.clone()),
                    declared: e.declared,
                    boundary: e.boundary,
                });
            }
        }
    }
    // vertex ids changed arbitrarily; remap edges so v0 < v1 holds (the
    // split above already guarantees it)
    Mesh::build(
        vertices,
        edges,
        vec![ElementSpec {
            edge_loop,
            region: el.region,
        }],
        mesh.kappa.clone(),
        cfg,
    )
}

/// Gauss-Legendre rule (points, weights) on [0,1] re-exported for callers
/// that sample edge traces.
pub fn unit_interval_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_legendre_01(n)
}

#[derive(Debug, Clone, Serialize)]
pub struct MeshDiagnostics {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_elements: usize,
    pub n_curved_edges: usize,
    pub h_max: f64,
    pub min_rho_ratio: f64,
    pub min_edge_ratio: f64,
    pub elements_without_star_center: usize,
}

pub fn diagnostics(mesh: &Mesh) -> MeshDiagnostics {
    MeshDiagnostics {
        n_vertices: mesh.vertices.len(),
        n_edges: mesh.edges.len(),
        n_elements: mesh.elements.len(),
        n_curved_edges: mesh
            .edges
            .iter()
            .filter(|e| e.is_declared_curved())
            .count(),
        h_max: mesh
            .elements
            .iter()
            .map(|e| e.diameter)
            .fold(0.0, f64::max),
        min_rho_ratio: mesh
            .elements
            .iter()
            .map(|e| e.rho_ratio)
            .fold(f64::INFINITY, f64::min),
        min_edge_ratio: mesh
            .elements
            .iter()
            .map(|e| e.min_edge_ratio)
            .fold(f64::INFINITY, f64::min),
        elements_without_star_center: mesh
            .elements
            .iter()
            .filter(|e| e.star_center.is_none())
            .count(),
    }
}
