//! Generator layouts: the ordered value slots that identify a local VEM
//! function on each element type.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryKind, Mesh};
use crate::poly2d::{dim_pk, multi_indices};

/// Element taxonomy by its (at most one) declared-curved edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementClass {
    /// All edges straight: classical VEM.
    Straight,
    /// Curved edge shared with another element.
    CurvedInterior,
    /// Curved edge on the Dirichlet boundary: the trace there is known
    /// data, so the edge carries no slots at all.
    CurvedDirichlet,
    /// Curved edge on the Robin boundary.
    CurvedRobin,
}

impl ElementClass {
    pub fn tag(&self) -> u8 {
        match self {
            ElementClass::Straight => 0,
            ElementClass::CurvedInterior => 1,
            ElementClass::CurvedDirichlet => 2,
            ElementClass::CurvedRobin => 3,
        }
    }
}

/// One generator slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// Value at a mesh vertex (global vertex id).
    Vertex(usize),
    /// Value at the `node`-th interior Gauss-Lobatto point of a straight
    /// edge, counted in canonical (v0 -> v1) order.
    EdgeGl { edge: usize, node: usize },
    /// Value at the `node`-th trace generator point of the curved edge.
    Tgp { edge: usize, node: usize },
    /// Scaled moment (1/|P|) ∫_P v m_(ax,ay).
    Moment { ax: u32, ay: u32 },
}

/// Ordered slot list of one element: vertices counterclockwise, then
/// per-edge Gauss-Lobatto values, then trace generator values of the
/// curved edge, then moments in multi-index order.
#[derive(Debug, Clone)]
pub struct GeneratorLayout {
    pub k: usize,
    pub class: ElementClass,
    pub slots: Vec<Slot>,
    /// Loop position of the declared-curved edge.
    pub curved_pos: Option<usize>,
    /// slot index by vertex id (vertices excluded from the layout are absent).
    pub vertex_slot: BTreeMap<usize, usize>,
    /// First tgp slot and count.
    pub tgp_range: (usize, usize),
    /// First moment slot and count.
    pub moment_range: (usize, usize),
}

impl GeneratorLayout {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn tgp_slots(&self) -> std::ops::Range<usize> {
        self.tgp_range.0..self.tgp_range.0 + self.tgp_range.1
    }

    pub fn moment_slots(&self) -> std::ops::Range<usize> {
        self.moment_range.0..self.moment_range.0 + self.moment_range.1
    }
}

pub fn build_layout(mesh: &Mesh, element: usize, k: usize) -> Result<GeneratorLayout> {
    if !(1..=3).contains(&k) {
        return Err(Error::Contract(format!("order k = {k} not in 1..=3")));
    }
    let el = &mesh.elements[element];
    let curved_pos = el.curved_loop_pos(mesh);
    let class = match curved_pos {
        None => ElementClass::Straight,
        Some(pos) => {
            let e = &mesh.edges[el.edge_loop[pos].edge];
            match e.boundary {
                BoundaryKind::Interior => ElementClass::CurvedInterior,
                BoundaryKind::Dirichlet => ElementClass::CurvedDirichlet,
                BoundaryKind::Robin => ElementClass::CurvedRobin,
            }
        }
    };

    // vertices excluded from the layout: endpoints of a curved Dirichlet edge
    let mut excluded = Vec::new();
    if class == ElementClass::CurvedDirichlet {
        let e = &mesh.edges[el.edge_loop[curved_pos.unwrap()].edge];
        excluded.push(e.v0);
        excluded.push(e.v1);
    }

    let mut slots = Vec::new();
    let mut vertex_slot = BTreeMap::new();
    for &v in &el.vertex_loop {
        if excluded.contains(&v) {
            continue;
        }
        vertex_slot.insert(v, slots.len());
        slots.push(Slot::Vertex(v));
    }

    if k >= 2 {
        for de in &el.edge_loop {
            let e = &mesh.edges[de.edge];
            if e.is_declared_curved() {
                continue;
            }
            for node in 0..(k - 1) {
                slots.push(Slot::EdgeGl {
                    edge: de.edge,
                    node,
                });
            }
        }
    }

    let mut tgp_range = (slots.len(), 0);
    if matches!(
        class,
        ElementClass::CurvedInterior | ElementClass::CurvedRobin
    ) {
        let edge = el.edge_loop[curved_pos.unwrap()].edge;
        let n_tgp = dim_pk(k as i64, 2) - 2;
        tgp_range = (slots.len(), n_tgp);
        for node in 0..n_tgp {
            slots.push(Slot::Tgp { edge, node });
        }
    }

    let mut moment_range = (slots.len(), 0);
    if k >= 2 {
        let idx = multi_indices(k - 2);
        moment_range = (slots.len(), idx.len());
        for (ax, ay) in idx {
            slots.push(Slot::Moment { ax, ay });
        }
    }

    Ok(GeneratorLayout {
        k,
        class,
        slots,
        curved_pos,
        vertex_slot,
        tgp_range,
        moment_range,
    })
}
