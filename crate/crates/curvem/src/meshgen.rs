//! Built-in mesh generators: uniform square grids, square grids cut by a
//! circular material interface, and polygonal disks with curved boundary
//! edges.

use std::collections::BTreeMap;
use std::collections::HashMap;

use nalgebra::Point2;

use crate::error::{Error, Result};
use crate::geometry::{
    BoundaryKind, CurveSegment, Declared, DirectedEdge, EdgeGeometry, ElementSpec, Mesh, MeshEdge,
    ParamWarp, QuadConfig,
};

/// How the generated interface arcs are represented; the chord variants
/// exist for idle-generator control runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceGeometry {
    /// Circular arcs declared curved.
    Arcs,
    /// Each arc replaced by its chord but still declared curved
    /// (idle trace generators).
    ChordsDeclaredCurved,
    /// Chords declared straight (classical polygonal control).
    ChordsDeclaredStraight,
}

#[derive(Debug, Clone, Copy)]
pub struct InterfaceMeshOptions {
    pub kappa_in: f64,
    pub kappa_out: f64,
    /// Tag the top side (y = 1) Robin instead of Dirichlet.
    pub robin_top: bool,
    pub geometry: InterfaceGeometry,
    /// Reparametrization applied to every generated arc.
    pub warp: ParamWarp,
}

impl Default for InterfaceMeshOptions {
    fn default() -> Self {
        InterfaceMeshOptions {
            kappa_in: 1.0,
            kappa_out: 1.0,
            robin_top: false,
            geometry: InterfaceGeometry::Arcs,
            warp: ParamWarp::Identity,
        }
    }
}

/// Uniform n x n grid on the unit square, all-straight edges, Dirichlet
/// boundary.
pub fn square_straight(n: usize, kappa: f64, cfg: &QuadConfig) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::Config("square_straight: n must be >= 1".into()));
    }
    let h = 1.0 / n as f64;
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let vertices: Vec<Point2<f64>> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| Point2::new(i as f64 * h, j as f64 * h)))
        .collect();
    let mut edges = Vec::new();
    let mut edge_id = HashMap::new();
    let mut add_edge = |a: usize, b: usize, boundary: BoundaryKind, edges: &mut Vec<MeshEdge>| {
        let key = (a.min(b), a.max(b));
        *edge_id.entry(key).or_insert_with(|| {
            edges.push(MeshEdge::straight(key.0, key.1, boundary));
            edges.len() - 1
        })
    };
    let mut elements = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            let tag = |on_boundary: bool| {
                if on_boundary {
                    BoundaryKind::Dirichlet
                } else {
                    BoundaryKind::Interior
                }
            };
            let e0 = add_edge(a, b, tag(j == 0), &mut edges);
            let e1 = add_edge(b, c, tag(i + 1 == n), &mut edges);
            let e2 = add_edge(c, d, tag(j + 1 == n), &mut edges);
            let e3 = add_edge(d, a, tag(i == 0), &mut edges);
            let de = |e: usize, from: usize, edges: &Vec<MeshEdge>| DirectedEdge {
                edge: e,
                forward: edges[e].v0 == from,
            };
            elements.push(ElementSpec {
                edge_loop: vec![
                    de(e0, a, &edges),
                    de(e1, b, &edges),
                    de(e2, c, &edges),
                    de(e3, d, &edges),
                ],
                region: 0,
            });
        }
    }
    let mut kmap = BTreeMap::new();
    kmap.insert(0, kappa);
    Mesh::build(vertices, edges, elements, kmap, cfg)
}

/// Square grid with a circular interface of radius `r` around the square
/// center. Cut cells split into an inside part and an outside part joined
/// by one circular arc each; region 0 is inside the circle, region 1
/// outside. If the circle passes too close to a grid vertex the radius is
/// jittered and the construction retried (the final radius is returned).
pub fn square_circle_interface(
    n: usize,
    r: f64,
    opts: &InterfaceMeshOptions,
    cfg: &QuadConfig,
) -> Result<(Mesh, f64)> {
    if n < 2 {
        return Err(Error::Config("square_circle_interface: n must be >= 2".into()));
    }
    if !(0.0 < r && r < 0.5) {
        return Err(Error::Config(
            "square_circle_interface: radius must be in (0, 0.5)".into(),
        ));
    }
    let mut radius = r;
    let mut last_err = None;
    for _attempt in 0..8 {
        match try_square_circle(n, radius, opts, cfg) {
            Ok(mesh) => return Ok((mesh, radius)),
            Err(e @ Error::Mesh(_)) | Err(e @ Error::Geometry(_)) => {
                last_err = Some(e);
                radius *= 1.0 + 7.3e-4; // jitter and retry
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Mesh("interface mesh generation failed".into())))
}

fn try_square_circle(
    n: usize,
    r: f64,
    opts: &InterfaceMeshOptions,
    cfg: &QuadConfig,
) -> Result<Mesh> {
    let h = 1.0 / n as f64;
    let center = Point2::new(0.5, 0.5);
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices: Vec<Point2<f64>> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| Point2::new(i as f64 * h, j as f64 * h)))
        .collect();

    // circle crossings per grid segment, keyed by (vertex a, vertex b)
    // with a < b; crossings stored as (parameter, new vertex id) sorted
    // along a -> b
    let guard = 0.03; // minimal distance of a crossing from a segment endpoint
    let mut seg_crossings: HashMap<(usize, usize), Vec<(f64, usize)>> = HashMap::new();
    let mut add_segment = |a: usize, b: usize, vertices: &mut Vec<Point2<f64>>| -> Result<()> {
        let (pa, pb) = (vertices[a], vertices[b]);
        let d = pb - pa;
        let f = pa - center;
        // |f + u d|^2 = r^2
        let qa = d.dot(&d);
        let qb = 2.0 * f.dot(&d);
        let qc = f.dot(&f) - r * r;
        let disc = qb * qb - 4.0 * qa * qc;
        let mut roots = Vec::new();
        if disc > 0.0 {
            let sq = disc.sqrt();
            for u in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                if u > -guard && u < 1.0 + guard {
                    if !(guard..=1.0 - guard).contains(&u) {
                        return Err(Error::Geometry(
                            "interface passes too close to a grid vertex".into(),
                        ));
                    }
                    roots.push(u);
                }
            }
        } else if disc > -1e-12 * qa {
            return Err(Error::Geometry("interface nearly tangent to a grid segment".into()));
        }
        if roots.len() == 2 && (roots[1] - roots[0]).abs() < 2.0 * guard {
            return Err(Error::Geometry("interface nearly tangent to a grid segment".into()));
        }
        let mut list = Vec::new();
        for u in roots {
            let p = pa + d * u;
            let id = vertices.len();
            vertices.push(p);
            list.push((u, id));
        }
        list.sort_by(|x, y| x.0.total_cmp(&y.0));
        seg_crossings.insert((a, b), list);
        Ok(())
    };
    for j in 0..=n {
        for i in 0..n {
            add_segment(vid(i, j), vid(i + 1, j), &mut vertices)?;
        }
    }
    for j in 0..n {
        for i in 0..=n {
            add_segment(vid(i, j), vid(i, j + 1), &mut vertices)?;
        }
    }

    let boundary_tag = |a: Point2<f64>, b: Point2<f64>| -> BoundaryKind {
        let eps = 1e-12;
        let on = |v: f64, w: f64, t: f64| (v - t).abs() < eps && (w - t).abs() < eps;
        if on(a.y, b.y, 1.0) {
            if opts.robin_top {
                return BoundaryKind::Robin;
            }
            return BoundaryKind::Dirichlet;
        }
        if on(a.y, b.y, 0.0) || on(a.x, b.x, 0.0) || on(a.x, b.x, 1.0) {
            BoundaryKind::Dirichlet
        } else {
            BoundaryKind::Interior
        }
    };

    let mut edges: Vec<MeshEdge> = Vec::new();
    let mut edge_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut straight_edge =
        |a: usize, b: usize, vertices: &Vec<Point2<f64>>, edges: &mut Vec<MeshEdge>| -> usize {
            let key = (a.min(b), a.max(b));
            *edge_of.entry(key).or_insert_with(|| {
                edges.push(MeshEdge::straight(
                    key.0,
                    key.1,
                    boundary_tag(vertices[key.0], vertices[key.1]),
                ));
                edges.len() - 1
            })
        };

    // pieces (ccw) of one cell side given its segment and traversal direction
    struct Piece {
        from: usize,
        to: usize,
    }
    let pieces_of = |a: usize, b: usize| -> Vec<Piece> {
        // segment key is canonical; traversal may reverse it
        let key = (a.min(b), a.max(b));
        let crossings = &seg_crossings[&key];
        let mut chain: Vec<usize> = Vec::with_capacity(crossings.len() + 2);
        chain.push(key.0);
        chain.extend(crossings.iter().map(|&(_, id)| id));
        chain.push(key.1);
        if a != key.0 {
            chain.reverse();
        }
        chain
            .windows(2)
            .map(|w| Piece { from: w[0], to: w[1] })
            .collect()
    };

    let mut elements: Vec<ElementSpec> = Vec::new();
    let mut arc_edges: HashMap<(usize, usize), usize> = HashMap::new();

    for j in 0..n {
        for i in 0..n {
            let corners = [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)];
            let mut pieces: Vec<Piece> = Vec::new();
            for s in 0..4 {
                pieces.extend(pieces_of(corners[s], corners[(s + 1) % 4]));
            }
            let crossing_nodes: Vec<usize> = pieces
                .iter()
                .map(|p| p.from)
                .filter(|&v| v > vid(n, n))
                .collect();
            match crossing_nodes.len() {
                0 => {
                    // uncut cell
                    let cc = Point2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                    let region = if (cc - center).norm() < r { 0 } else { 1 };
                    let edge_loop = pieces
                        .iter()
                        .map(|p| {
                            let e = straight_edge(p.from, p.to, &vertices, &mut edges);
                            DirectedEdge {
                                edge: e,
                                forward: edges[e].v0 == p.from,
                            }
                        })
                        .collect();
                    elements.push(ElementSpec { edge_loop, region });
                }
                2 => {
                    // split into the chain from crossing A to crossing B and
                    // the complementary chain; close each with the arc
                    let start = pieces
                        .iter()
                        .position(|p| crossing_nodes.contains(&p.from))
                        .unwrap();
                    let m = pieces.len();
                    let rotated: Vec<&Piece> =
                        (0..m).map(|t| &pieces[(start + t) % m]).collect();
                    let second = rotated[1..]
                        .iter()
                        .position(|p| crossing_nodes.contains(&p.from))
                        .unwrap()
                        + 1;
                    let chain1: Vec<&Piece> = rotated[..second].to_vec();
                    let chain2: Vec<&Piece> = rotated[second..].to_vec();
                    let node_a = chain1[0].from; // first crossing
                    let node_b = chain2[0].from; // second crossing

                    let arc_key = (node_a.min(node_b), node_a.max(node_b));
                    let arc_edge = match arc_edges.get(&arc_key) {
                        Some(&e) => e,
                        None => {
                            let e = make_interface_edge(
                                arc_key.0,
                                arc_key.1,
                                &vertices,
                                center,
                                r,
                                opts,
                                Point2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h),
                                h,
                            )?;
                            edges.push(e);
                            arc_edges.insert(arc_key, edges.len() - 1);
                            edges.len() - 1
                        }
                    };

                    for chain in [chain1, chain2] {
                        let from = chain[0].from;
                        let to = chain.last().unwrap().to;
                        // region from the side of the chain's midpiece
                        let mid = &chain[chain.len() / 2];
                        let pm = nalgebra::center(&vertices[mid.from], &vertices[mid.to]);
                        let region = if (pm - center).norm() < r { 0 } else { 1 };
                        let mut edge_loop: Vec<DirectedEdge> = chain
                            .iter()
                            .map(|p| {
                                let e = straight_edge(p.from, p.to, &vertices, &mut edges);
                                DirectedEdge {
                                    edge: e,
                                    forward: edges[e].v0 == p.from,
                                }
                            })
                            .collect();
                        // close with the arc from `to` back to `from`
                        edge_loop.push(DirectedEdge {
                            edge: arc_edge,
                            forward: edges[arc_edge].v0 == to,
                        });
                        let _ = from;
                        elements.push(ElementSpec { edge_loop, region });
                    }
                }
                c => {
                    return Err(Error::Mesh(format!(
                        "cell ({i},{j}): {c} interface crossings (expected 0 or 2); \
                         refine the grid or change the radius"
                    )));
                }
            }
        }
    }

    let mut kmap = BTreeMap::new();
    kmap.insert(0, opts.kappa_in);
    kmap.insert(1, opts.kappa_out);
    Mesh::build(vertices, edges, elements, kmap, cfg)
}

#[allow(clippy::too_many_arguments)]
fn make_interface_edge(
    v0: usize,
    v1: usize,
    vertices: &[Point2<f64>],
    center: Point2<f64>,
    r: f64,
    opts: &InterfaceMeshOptions,
    cell_center: Point2<f64>,
    h: f64,
) -> Result<MeshEdge> {
    let (pa, pb) = (vertices[v0], vertices[v1]);
    match opts.geometry {
        InterfaceGeometry::ChordsDeclaredStraight => {
            Ok(MeshEdge::straight(v0, v1, BoundaryKind::Interior))
        }
        InterfaceGeometry::ChordsDeclaredCurved => Ok(MeshEdge {
            v0,
            v1,
            geometry: EdgeGeometry::Curved(
                CurveSegment::line(pa, pb).with_warp(ParamWarp::Identity),
            ),
            declared: Declared::Curved,
            boundary: BoundaryKind::Interior,
        }),
        InterfaceGeometry::Arcs => {
            let da = pa - center;
            let db = pb - center;
            let th_a = da.y.atan2(da.x);
            let mut th_b = db.y.atan2(db.x);
            // shorter branch; cut-cell arcs always subtend less than pi
            while th_b - th_a > std::f64::consts::PI {
                th_b -= 2.0 * std::f64::consts::PI;
            }
            while th_b - th_a < -std::f64::consts::PI {
                th_b += 2.0 * std::f64::consts::PI;
            }
            let seg = CurveSegment::arc(center, r, th_a, th_b).with_warp(opts.warp);
            // sanity: the arc midpoint must lie within the generating cell
            let m = seg.midpoint_sample();
            if (m.x - cell_center.x).abs() > 0.75 * h || (m.y - cell_center.y).abs() > 0.75 * h {
                return Err(Error::Geometry(
                    "interface arc leaves its generating cell".into(),
                ));
            }
            Ok(MeshEdge {
                v0,
                v1,
                geometry: EdgeGeometry::Curved(seg),
                declared: Declared::Curved,
                boundary: BoundaryKind::Interior,
            })
        }
    }
}

/// Boundary tagging for the disk generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskBoundary {
    AllDirichlet,
    AllRobin,
    /// Upper half (angle in (0, pi)) Robin, lower half Dirichlet. Keeps
    /// the rho = 0 Neumann limit well-posed.
    MixedUpperRobin,
}

/// Polygonal disk of radius 1 centered at the origin: n radial layers,
/// 6n angular sectors; outer boundary edges are circular arcs declared
/// curved, everything else straight.
pub fn disk_boundary(
    n: usize,
    boundary: DiskBoundary,
    kappa: f64,
    warp: ParamWarp,
    cfg: &QuadConfig,
) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::Config("disk_boundary: n must be >= 1".into()));
    }
    let n_theta = 6 * n;
    let mut vertices = vec![Point2::new(0.0, 0.0)];
    let vid = |ring: usize, i: usize| 1 + (ring - 1) * n_theta + (i % n_theta);
    for ring in 1..=n {
        let radius = ring as f64 / n as f64;
        for i in 0..n_theta {
            let th = 2.0 * std::f64::consts::PI * i as f64 / n_theta as f64;
            vertices.push(Point2::new(radius * th.cos(), radius * th.sin()));
        }
    }

    let mut edges: Vec<MeshEdge> = Vec::new();
    let mut edge_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut get_edge = |a: usize, b: usize, e: MeshEdge, edges: &mut Vec<MeshEdge>| -> usize {
        let key = (a.min(b), a.max(b));
        *edge_of.entry(key).or_insert_with(|| {
            edges.push(e);
            edges.len() - 1
        })
    };

    let outer_tag = |i: usize| -> BoundaryKind {
        match boundary {
            DiskBoundary::AllDirichlet => BoundaryKind::Dirichlet,
            DiskBoundary::AllRobin => BoundaryKind::Robin,
            DiskBoundary::MixedUpperRobin => {
                let mid = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n_theta as f64;
                if mid < std::f64::consts::PI {
                    BoundaryKind::Robin
                } else {
                    BoundaryKind::Dirichlet
                }
            }
        }
    };

    let mut elements = Vec::new();
    // innermost triangles (when n == 1 their outer side is the curved boundary)
    for i in 0..n_theta {
        let (o, a, b) = (0, vid(1, i), vid(1, i + 1));
        let e0 = get_edge(o, a, MeshEdge::straight(0, a, BoundaryKind::Interior), &mut edges);
        let outer: MeshEdge = if n == 1 {
            arc_edge(a.min(b), a.max(b), &vertices, outer_tag(i), warp)
        } else {
            MeshEdge::straight(a.min(b), a.max(b), BoundaryKind::Interior)
        };
        let e1 = get_edge(a, b, outer, &mut edges);
        let e2 = get_edge(b, o, MeshEdge::straight(0, b, BoundaryKind::Interior), &mut edges);
        let de = |e: usize, from: usize, edges: &Vec<MeshEdge>| DirectedEdge {
            edge: e,
            forward: edges[e].v0 == from,
        };
        elements.push(ElementSpec {
            edge_loop: vec![de(e0, o, &edges), de(e1, a, &edges), de(e2, b, &edges)],
            region: 0,
        });
    }
    // ring quads
    for ring in 1..n {
        for i in 0..n_theta {
            let a = vid(ring, i);
            let b = vid(ring + 1, i);
            let c = vid(ring + 1, i + 1);
            let d = vid(ring, i + 1);
            let e0 = get_edge(a, b, MeshEdge::straight(a.min(b), a.max(b), BoundaryKind::Interior), &mut edges);
            let outer: MeshEdge = if ring + 1 == n {
                arc_edge(b.min(c), b.max(c), &vertices, outer_tag(i), warp)
            } else {
                MeshEdge::straight(b.min(c), b.max(c), BoundaryKind::Interior)
            };
            let e1 = get_edge(b, c, outer, &mut edges);
            let e2 = get_edge(c, d, MeshEdge::straight(c.min(d), c.max(d), BoundaryKind::Interior), &mut edges);
            let e3 = get_edge(d, a, MeshEdge::straight(a.min(d), a.max(d), BoundaryKind::Interior), &mut edges);
            let de = |e: usize, from: usize, edges: &Vec<MeshEdge>| DirectedEdge {
                edge: e,
                forward: edges[e].v0 == from,
            };
            elements.push(ElementSpec {
                edge_loop: vec![
                    de(e0, a, &edges),
                    de(e1, b, &edges),
                    de(e2, c, &edges),
                    de(e3, d, &edges),
                ],
                region: 0,
            });
        }
    }

    let mut kmap = BTreeMap::new();
    kmap.insert(0, kappa);
    Mesh::build(vertices, edges, elements, kmap, cfg)
}

fn arc_edge(
    v0: usize,
    v1: usize,
    vertices: &[Point2<f64>],
    boundary: BoundaryKind,
    warp: ParamWarp,
) -> MeshEdge {
    let pa = vertices[v0];
    let pb = vertices[v1];
    let r = pa.coords.norm();
    let th_a = pa.y.atan2(pa.x);
    let mut th_b = pb.y.atan2(pb.x);
    while th_b - th_a > std::f64::consts::PI {
        th_b -= 2.0 * std::f64::consts::PI;
    }
    while th_b - th_a < -std::f64::consts::PI {
        th_b += 2.0 * std::f64::consts::PI;
    }
    MeshEdge {
        v0,
        v1,
        geometry: EdgeGeometry::Curved(
            CurveSegment::arc(Point2::new(0.0, 0.0), r, th_a, th_b).with_warp(warp),
        ),
        declared: Declared::Curved,
        boundary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::diagnostics;

    #[test]
    fn square_grid_counts() {
        let cfg = QuadConfig::for_order(1);
        let mesh = square_straight(3, 1.0, &cfg).unwrap();
        assert_eq!(mesh.vertices.len(), 16);
        assert_eq!(mesh.elements.len(), 9);
        let area: f64 = mesh.elements.iter().map(|e| e.area).sum();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interface_mesh_is_consistent() {
        let cfg = QuadConfig::for_order(2);
        let (mesh, radius) =
            square_circle_interface(4, 0.3, &InterfaceMeshOptions::default(), &cfg).unwrap();
        // total area preserved
        let area: f64 = mesh.elements.iter().map(|e| e.area).sum();
        assert!((area - 1.0).abs() < 1e-10, "area {area}");
        // inside region area approximates the disk (chordal polygon error only)
        let inside: f64 = mesh
            .elements
            .iter()
            .filter(|e| e.region == 0)
            .map(|e| e.area)
            .sum();
        assert!((inside - std::f64::consts::PI * radius * radius).abs() < 1e-9);
        // every interface edge is a curved arc between distinct regions
        for (ei, e) in mesh.edges.iter().enumerate() {
            if e.is_declared_curved() {
                let adj = &mesh.edge_elements[ei];
                assert_eq!(adj.len(), 2);
                assert_ne!(mesh.elements[adj[0]].region, mesh.elements[adj[1]].region);
            }
        }
        let d = diagnostics(&mesh);
        assert!(d.n_curved_edges > 0);
        assert_eq!(d.elements_without_star_center, 0);
        assert!(d.min_rho_ratio > 0.05, "rho ratio {}", d.min_rho_ratio);
    }

    #[test]
    fn interface_element_count_scales_quadratically() {
        let cfg = QuadConfig::for_order(1);
        let (m1, _) =
            square_circle_interface(4, 0.3, &InterfaceMeshOptions::default(), &cfg).unwrap();
        let (m2, _) =
            square_circle_interface(8, 0.3, &InterfaceMeshOptions::default(), &cfg).unwrap();
        let ratio = m2.elements.len() as f64 / m1.elements.len() as f64;
        assert!(ratio > 2.5 && ratio < 5.0, "ratio {ratio}");
    }

    #[test]
    fn disk_mesh_closes_and_has_curved_boundary() {
        let cfg = QuadConfig::for_order(2);
        let mesh = disk_boundary(2, DiskBoundary::AllDirichlet, 1.0, ParamWarp::Identity, &cfg)
            .unwrap();
        let area: f64 = mesh.elements.iter().map(|e| e.area).sum();
        assert!(
            (area - std::f64::consts::PI).abs() < 1e-10,
            "disk area {area} vs {}",
            std::f64::consts::PI
        );
        let curved = mesh.edges.iter().filter(|e| e.is_declared_curved()).count();
        assert_eq!(curved, 12);
        for e in &mesh.edges {
            if e.is_declared_curved() {
                assert_eq!(e.boundary, BoundaryKind::Dirichlet);
            }
        }
    }

    #[test]
    fn mixed_disk_has_robin_and_dirichlet_arcs() {
        let cfg = QuadConfig::for_order(1);
        let mesh =
            disk_boundary(2, DiskBoundary::MixedUpperRobin, 1.0, ParamWarp::Identity, &cfg)
                .unwrap();
        let robin = mesh
            .edges
            .iter()
            .filter(|e| e.boundary == BoundaryKind::Robin)
            .count();
        let dirichlet = mesh
            .edges
            .iter()
            .filter(|e| e.boundary == BoundaryKind::Dirichlet)
            .count();
        assert_eq!(robin, 6);
        assert_eq!(dirichlet, 6);
    }
}
