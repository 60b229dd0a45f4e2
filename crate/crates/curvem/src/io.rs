//! File formats: `curvem-mesh/1` mesh documents, `curvem-field/1` field
//! dumps, and CSV rate tables. All JSON-syntax, UTF-8; floating point is
//! serialized in shortest round-trip form so a written mesh reads back
//! bitwise identical.

use std::collections::BTreeMap;

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use crate::assembly::AssembledSystem;
use crate::error::{Error, Result};
use crate::geometry::{
    BoundaryKind, CurveSegment, Declared, DirectedEdge, EdgeGeometry, ElementSpec, Mesh, MeshEdge,
    QuadConfig,
};
use crate::post::RateRow;

pub const MESH_FORMAT: &str = "curvem-mesh/1";
pub const FIELD_FORMAT: &str = "curvem-field/1";

#[derive(Serialize, Deserialize)]
struct MeshFile {
    format: String,
    vertices: Vec<[f64; 2]>,
    curves: Vec<CurveSegment>,
    edges: Vec<EdgeFile>,
    elements: Vec<ElementFile>,
    /// region id (as string key) -> kappa
    kappa: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
struct EdgeFile {
    v0: usize,
    v1: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curve: Option<usize>,
    declared: Declared,
    boundary: BoundaryKind,
}

#[derive(Serialize, Deserialize)]
struct ElementFile {
    /// 1-based signed edge ids: positive = forward (v0 -> v1).
    edges: Vec<i64>,
    region: u32,
}

pub fn mesh_to_json(mesh: &Mesh) -> Result<String> {
    let mut curves = Vec::new();
    let mut edges = Vec::new();
    for e in &mesh.edges {
        let curve = match &e.geometry {
            EdgeGeometry::Straight => None,
            EdgeGeometry::Curved(seg) => {
                curves.push(seg.clone());
                Some(curves.len() - 1)
            }
        };
        edges.push(EdgeFile {
            v0: e.v0,
            v1: e.v1,
            curve,
            declared: e.declared,
            boundary: e.boundary,
        });
    }
    let elements = mesh
        .elements
        .iter()
        .map(|el| ElementFile {
            edges: el
                .edge_loop
                .iter()
                .map(|de| {
                    let id = de.edge as i64 + 1;
                    if de.forward {
                        id
                    } else {
                        -id
                    }
                })
                .collect(),
            region: el.region,
        })
        .collect();
    let file = MeshFile {
        format: MESH_FORMAT.to_string(),
        vertices: mesh.vertices.iter().map(|p| [p.x, p.y]).collect(),
        curves,
        edges,
        elements,
        kappa: mesh
            .kappa
            .iter()
            .map(|(r, v)| (r.to_string(), *v))
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn mesh_from_json(text: &str, cfg: &QuadConfig) -> Result<Mesh> {
    let file: MeshFile = serde_json::from_str(text)?;
    if file.format != MESH_FORMAT {
        return Err(Error::Io(format!(
            "unsupported mesh format {:?} (expected {MESH_FORMAT})",
            file.format
        )));
    }
    let vertices: Vec<Point2<f64>> = file
        .vertices
        .iter()
        .map(|&[x, y]| Point2::new(x, y))
        .collect();
    let mut edges = Vec::with_capacity(file.edges.len());
    for (i, ef) in file.edges.iter().enumerate() {
        let geometry = match ef.curve {
            None => EdgeGeometry::Straight,
            Some(ci) => EdgeGeometry::Curved(
                file.curves
                    .get(ci)
                    .ok_or_else(|| Error::Io(format!("edge {i}: curve index {ci} out of range")))?
                    .clone(),
            ),
        };
        edges.push(MeshEdge {
            v0: ef.v0,
            v1: ef.v1,
            geometry,
            declared: ef.declared,
            boundary: ef.boundary,
        });
    }
    let mut elements = Vec::with_capacity(file.elements.len());
    for (i, el) in file.elements.iter().enumerate() {
        let mut edge_loop = Vec::with_capacity(el.edges.len());
        for &signed in &el.edges {
            if signed == 0 {
                return Err(Error::Io(format!("element {i}: edge id 0 (ids are 1-based)")));
            }
            let edge = signed.unsigned_abs() as usize - 1;
            edge_loop.push(DirectedEdge {
                edge,
                forward: signed > 0,
            });
        }
        elements.push(ElementSpec {
            edge_loop,
            region: el.region,
        });
    }
    let mut kappa = BTreeMap::new();
    for (key, v) in file.kappa {
        let region: u32 = key
            .parse()
            .map_err(|_| Error::Io(format!("kappa key {key:?} is not a region id")))?;
        kappa.insert(region, v);
    }
    Mesh::build(vertices, edges, elements, kappa, cfg)
}

#[derive(Serialize, Deserialize)]
struct FieldFile {
    format: String,
    k: usize,
    elements: Vec<FieldElement>,
}

#[derive(Serialize, Deserialize)]
struct FieldElement {
    /// Boundary polyline (curved edges sampled), closed implicitly.
    polygon: Vec<[f64; 2]>,
    /// Monomial-basis anchor of the coefficients.
    center: [f64; 2],
    scale: f64,
    region: u32,
    /// Coefficients of Pi_nabla u_h in the scaled monomial basis,
    /// degree-lex order.
    coeffs: Vec<f64>,
}

/// Per-element dump of the computable solution representative.
pub fn field_to_json(mesh: &Mesh, system: &AssembledSystem, solution: &[f64]) -> Result<String> {
    let mut elements = Vec::with_capacity(mesh.elements.len());
    for (ei, loc) in system.locals.iter().enumerate() {
        let gens = nalgebra::DVector::from_iterator(
            loc.globals.len(),
            loc.globals.iter().map(|&g| solution[g]),
        );
        let coeffs = loc.ops.project_h1(&gens);
        let mut polygon = Vec::new();
        for de in &mesh.elements[ei].edge_loop {
            let samples = match mesh.edges[de.edge].geometry {
                EdgeGeometry::Straight => 1,
                EdgeGeometry::Curved(_) => 12,
            };
            for s in 0..samples {
                let p =
                    crate::geometry::directed_edge_point(mesh, de, s as f64 / samples as f64)?;
                polygon.push([p.x, p.y]);
            }
        }
        elements.push(FieldElement {
            polygon,
            center: [loc.ops.basis.center().x, loc.ops.basis.center().y],
            scale: loc.ops.basis.scale(),
            region: mesh.elements[ei].region,
            coeffs: coeffs.iter().copied().collect(),
        });
    }
    let file = FieldFile {
        format: FIELD_FORMAT.to_string(),
        k: system.config.k,
        elements,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// CSV rate table with fixed 17-significant-digit float formatting so
/// identical runs produce identical bytes.
pub fn rate_table_csv(rows: &[RateRow]) -> String {
    let mut out = String::from("k,h,ndof,e_H1,e_L2,rate_H1,rate_L2\n");
    for r in rows {
        let fmt = |v: f64| format!("{:.16e}", v);
        let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            fmt(r.h),
            r.ndof,
            fmt(r.e_h1),
            fmt(r.e_l2),
            opt(r.rate_h1),
            opt(r.rate_l2),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen::{square_circle_interface, InterfaceMeshOptions};

    #[test]
    fn mesh_round_trip_is_bitwise() {
        let cfg = QuadConfig::for_order(2);
        let opts = InterfaceMeshOptions {
            kappa_in: 1.0,
            kappa_out: 100.0,
            robin_top: true,
            ..Default::default()
        };
        let (mesh, _) = square_circle_interface(4, 0.3, &opts, &cfg).unwrap();
        let json = mesh_to_json(&mesh).unwrap();
        let back = mesh_from_json(&json, &cfg).unwrap();
        assert_eq!(mesh.vertices.len(), back.vertices.len());
        for (a, b) in mesh.vertices.iter().zip(&back.vertices) {
            assert!(a.x.to_bits() == b.x.to_bits() && a.y.to_bits() == b.y.to_bits());
        }
        let json2 = mesh_to_json(&back).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn bad_format_is_rejected() {
        let cfg = QuadConfig::for_order(1);
        assert!(mesh_from_json("{\"format\":\"other/9\"}", &cfg).is_err());
    }
}
