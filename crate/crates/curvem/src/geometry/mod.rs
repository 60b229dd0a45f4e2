//! Geometry kernel: parametric curves, curved-polygon meshes, trace
//! generator points and quadrature.

pub mod curve;
pub mod mesh;
pub mod moments;
pub mod quadrature;
pub mod tgp;

pub use curve::{CurveKind, CurveSegment, ParamWarp};
pub use mesh::{
    diagnostics, directed_edge_point, edge_gl_points, perimeter_by_sampling,
    split_straight_edges, BoundaryKind, Declared, DirectedEdge, EdgeGeometry, Element,
    ElementSpec, Mesh, MeshDiagnostics, MeshEdge, QuadConfig,
};
pub use moments::monomial_moments;
pub use quadrature::{
    curved_edge_rule, gauss_legendre, gauss_legendre_01, gauss_lobatto_interior,
    straight_edge_rule, BoundaryQuadRule,
};
pub use tgp::{ideal_apex, tg_points};
