//! Global generator numbering, interface stabilization ownership,
//! Dirichlet constraints, and accumulation of the sparse SPD system.

use nalgebra::Point2;
use sprs::{CsMat, TriMat};

use crate::element::{local_load, local_robin, local_stiffness, LocalOperators, Slot};
use crate::error::{Error, Result};
use crate::geometry::{edge_gl_points, BoundaryKind, Mesh, QuadConfig};
use crate::poly2d::{dim_pk, multi_index_position, multi_indices};
use crate::problem::ProblemData;

/// Global slot numbering: vertices first, then per-edge slots by edge id
/// (Gauss-Lobatto values on straight edges, trace generator values on
/// curved non-Dirichlet edges), then per-element moments.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub k: usize,
    pub n_slots: usize,
    pub vertex_slot: Vec<usize>,
    pub edge_slots: Vec<Vec<usize>>,
    pub moment_slots: Vec<Vec<usize>>,
    /// For each slot, the nodal point it is constrained at (Dirichlet
    /// closure), or None when free.
    pub constrained_at: Vec<Option<Point2<f64>>>,
    pub n_free: usize,
    /// slot -> index in the reduced (free) system
    pub free_index: Vec<Option<usize>>,
}

pub fn number_generators(mesh: &Mesh, k: usize) -> Result<DofMap> {
    if !(1..=3).contains(&k) {
        return Err(Error::Contract(format!("order k = {k} not in 1..=3")));
    }
    let mut next = 0usize;
    let vertex_slot: Vec<usize> = (0..mesh.vertices.len())
        .map(|_| {
            let s = next;
            next += 1;
            s
        })
        .collect();

    let mut edge_slots = Vec::with_capacity(mesh.edges.len());
    for e in &mesh.edges {
        let count = if e.is_declared_curved() {
            if e.boundary == BoundaryKind::Dirichlet {
                0 // the trace there is known data
            } else {
                dim_pk(k as i64, 2) - 2
            }
        } else if k >= 2 {
            k - 1
        } else {
            0
        };
        let slots: Vec<usize> = (0..count)
            .map(|_| {
                let s = next;
                next += 1;
                s
            })
            .collect();
        edge_slots.push(slots);
    }

    let n_moment = if k >= 2 { dim_pk(k as i64 - 2, 2) } else { 0 };
    let mut moment_slots = Vec::with_capacity(mesh.elements.len());
    for _ in &mesh.elements {
        let slots: Vec<usize> = (0..n_moment)
            .map(|_| {
                let s = next;
                next += 1;
                s
            })
            .collect();
        moment_slots.push(slots);
    }

    // Dirichlet closure: every vertex of a Dirichlet edge is constrained;
    // GL slots of straight Dirichlet edges are constrained at their nodes.
    let mut constrained_at: Vec<Option<Point2<f64>>> = vec![None; next];
    for (ei, e) in mesh.edges.iter().enumerate() {
        if e.boundary != BoundaryKind::Dirichlet {
            continue;
        }
        constrained_at[vertex_slot[e.v0]] = Some(mesh.vertices[e.v0]);
        constrained_at[vertex_slot[e.v1]] = Some(mesh.vertices[e.v1]);
        if !e.is_declared_curved() && k >= 2 {
            let pts = edge_gl_points(mesh, ei, k)?;
            for (j, &slot) in edge_slots[ei].iter().enumerate() {
                constrained_at[slot] = Some(pts[j]);
            }
        }
    }

    let mut free_index = vec![None; next];
    let mut n_free = 0;
    for (slot, c) in constrained_at.iter().enumerate() {
        if c.is_none() {
            free_index[slot] = Some(n_free);
            n_free += 1;
        }
    }

    Ok(DofMap {
        k,
        n_slots: next,
        vertex_slot,
        edge_slots,
        moment_slots,
        constrained_at,
        n_free,
        free_index,
    })
}

impl DofMap {
    /// Global slot of a local layout slot.
    pub fn global_of(&self, element: usize, slot: &Slot) -> usize {
        match slot {
            Slot::Vertex(v) => self.vertex_slot[*v],
            Slot::EdgeGl { edge, node } | Slot::Tgp { edge, node } => {
                self.edge_slots[*edge][*node]
            }
            Slot::Moment { ax, ay } => {
                let pos = multi_index_position(*ax, *ay);
                self.moment_slots[element][pos]
            }
        }
    }

    pub fn globals_of_layout(
        &self,
        element: usize,
        layout: &crate::element::GeneratorLayout,
    ) -> Vec<usize> {
        layout
            .slots
            .iter()
            .map(|s| self.global_of(element, s))
            .collect()
    }
}

/// How shared curved-interface tgp slots are stabilized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceStabilization {
    /// Stabilize tgp of kappa-jump interfaces in exactly one element;
    /// equal-kappa interfaces keep the standard two-sided stabilization.
    OneSidedOnJumps,
    /// Stabilize the tgp of every shared curved edge in one element only.
    /// With two-sided stabilization a shared idle generator couples its
    /// neighbors through a spurious penalty; one-sided stabilization lets
    /// it eliminate exactly.
    OneSidedAll,
    /// Stabilize everything in every element (control runs).
    TwoSided,
}

/// Which adjacent element owns the one-sided stabilization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OwnerPolicy {
    SmallerId,
    LargerKappa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OwnerKind {
    /// Not a shared curved edge: every element stabilizes its own slots.
    NotShared,
    Both,
    Single(usize),
}

#[derive(Debug, Clone)]
pub struct StabilizationOwnership {
    pub owner: Vec<OwnerKind>,
}

pub fn choose_stab_owner(
    mesh: &Mesh,
    policy: OwnerPolicy,
    mode: InterfaceStabilization,
) -> StabilizationOwnership {
    let owner = mesh
        .edges
        .iter()
        .enumerate()
        .map(|(ei, e)| {
            if !e.is_declared_curved() || mesh.edge_elements[ei].len() != 2 {
                return OwnerKind::NotShared;
            }
            let (a, b) = (mesh.edge_elements[ei][0], mesh.edge_elements[ei][1]);
            let pick = match policy {
                OwnerPolicy::SmallerId => a.min(b),
                OwnerPolicy::LargerKappa => {
                    if mesh.kappa_of(a) >= mesh.kappa_of(b) {
                        a
                    } else {
                        b
                    }
                }
            };
            match mode {
                InterfaceStabilization::TwoSided => OwnerKind::Both,
                InterfaceStabilization::OneSidedAll => OwnerKind::Single(pick),
                InterfaceStabilization::OneSidedOnJumps => {
                    if mesh.is_kappa_jump_edge(ei) {
                        OwnerKind::Single(pick)
                    } else {
                        OwnerKind::Both
                    }
                }
            }
        })
        .collect();
    StabilizationOwnership { owner }
}

/// Assembly configuration.
#[derive(Debug, Clone, Copy)]
pub struct AssembleConfig {
    pub k: usize,
    pub quad: QuadConfig,
    /// Polynomial order of the interior rule used for (f, T v).
    pub load_quad_order: usize,
    pub stab_mode: InterfaceStabilization,
    pub owner_policy: OwnerPolicy,
    /// Validation hook: relative perturbation of the trace generator
    /// points (negative controls only; keep 0 in real runs).
    pub tgp_perturbation: f64,
}

impl AssembleConfig {
    pub fn new(k: usize) -> Self {
        AssembleConfig {
            k,
            quad: QuadConfig::for_order(k),
            load_quad_order: 2 * k + 4,
            stab_mode: InterfaceStabilization::OneSidedOnJumps,
            owner_policy: OwnerPolicy::SmallerId,
            tgp_perturbation: 0.0,
        }
    }
}

/// One element's cached operators plus its local-to-global map.
pub struct ElementLocal {
    pub ops: LocalOperators,
    pub globals: Vec<usize>,
    pub kappa: f64,
}

/// Assembled (unconstrained) global system together with everything needed
/// for constraint reduction and post-processing.
pub struct AssembledSystem {
    pub dof_map: DofMap,
    /// a_h on all slots (consistency + stabilization), no Robin terms.
    pub stiffness: CsMat<f64>,
    /// Robin boundary mass on all slots.
    pub robin: CsMat<f64>,
    /// Load + Robin load - Dirichlet-lifting contributions, on all slots.
    pub rhs: Vec<f64>,
    pub locals: Vec<ElementLocal>,
    pub ownership: StabilizationOwnership,
    pub config: AssembleConfig,
}

pub fn assemble(mesh: &Mesh, problem: &ProblemData, cfg: &AssembleConfig) -> Result<AssembledSystem> {
    let k = cfg.k;
    let dof_map = number_generators(mesh, k)?;
    let ownership = choose_stab_owner(mesh, cfg.owner_policy, cfg.stab_mode);

    let n = dof_map.n_slots;
    let mut a_tri = TriMat::new((n, n));
    let mut r_tri = TriMat::new((n, n));
    let mut rhs = vec![0.0; n];
    let mut locals = Vec::with_capacity(mesh.elements.len());

    for ei in 0..mesh.elements.len() {
        let kappa = mesh.kappa_of(ei);
        let g_d = &problem.g_d;
        let ops = LocalOperators::build_perturbed(
            mesh,
            ei,
            k,
            &cfg.quad,
            Some(&**g_d),
            cfg.tgp_perturbation,
        )?;

        // stabilization mask: drop tgp slots of non-owned interface edges
        let mut mask = vec![true; ops.layout.len()];
        for (i, slot) in ops.layout.slots.iter().enumerate() {
            if let Slot::Tgp { edge, .. } = slot {
                if let OwnerKind::Single(owner) = ownership.owner[*edge] {
                    if owner != ei {
                        mask[i] = false;
                    }
                }
            }
        }

        let (k_loc, dirichlet_rhs) = local_stiffness(&ops, kappa, Some(&mask));
        let mut f_loc = local_load(mesh, &ops, &*problem.f, cfg.load_quad_order, &cfg.quad)?;

        // Robin contributions, edge by edge
        let el = &mesh.elements[ei];
        let mut m_robin = None;
        for (pos, de) in el.edge_loop.iter().enumerate() {
            if mesh.edges[de.edge].boundary != BoundaryKind::Robin {
                continue;
            }
            let (m_r, f_r) = local_robin(
                mesh,
                &ops,
                pos,
                &*problem.rho,
                &*problem.g_r,
                Some(&**g_d),
            );
            m_robin = Some(match m_robin {
                None => m_r,
                Some(acc) => acc + m_r,
            });
            f_loc += f_r;
        }

        let globals = dof_map.globals_of_layout(ei, &ops.layout);

        // NaN/Inf guard with element context
        let finite = k_loc.iter().all(|v| v.is_finite())
            && f_loc.iter().all(|v| v.is_finite())
            && dirichlet_rhs.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Numerical(format!(
                "element {ei}: non-finite entries in local system"
            )));
        }

        for (i, &gi) in globals.iter().enumerate() {
            rhs[gi] += f_loc[i] - dirichlet_rhs[i];
            for (j, &gj) in globals.iter().enumerate() {
                let v = k_loc[(i, j)];
                if v != 0.0 {
                    a_tri.add_triplet(gi, gj, v);
                }
            }
        }
        if let Some(m) = &m_robin {
            for (i, &gi) in globals.iter().enumerate() {
                for (j, &gj) in globals.iter().enumerate() {
                    let v = m[(i, j)];
                    if v != 0.0 {
                        r_tri.add_triplet(gi, gj, v);
                    }
                }
            }
        }

        locals.push(ElementLocal {
            ops,
            globals,
            kappa,
        });
    }

    Ok(AssembledSystem {
        dof_map,
        stiffness: a_tri.to_csr(),
        robin: r_tri.to_csr(),
        rhs,
        locals,
        ownership,
        config: *cfg,
    })
}

impl AssembledSystem {
    /// Values of the constrained slots from the Dirichlet data.
    pub fn constrained_values(&self, problem: &ProblemData) -> Vec<(usize, f64)> {
        self.dof_map
            .constrained_at
            .iter()
            .enumerate()
            .filter_map(|(slot, p)| p.map(|pt| (slot, (problem.g_d)(pt))))
            .collect()
    }

    /// Reduced SPD system over the free slots: (A+R)_ff x = b_f - (A+R)_fc g.
    pub fn reduce(&self, problem: &ProblemData) -> ReducedSystem {
        let n_free = self.dof_map.n_free;
        let mut full_values = vec![0.0; self.dof_map.n_slots];
        for (slot, v) in self.constrained_values(problem) {
            full_values[slot] = v;
        }
        let mut tri = TriMat::new((n_free, n_free));
        let mut rhs: Vec<f64> = self
            .dof_map
            .free_index
            .iter()
            .enumerate()
            .filter_map(|(slot, f)| f.map(|_| self.rhs[slot]))
            .collect();

        for mat in [&self.stiffness, &self.robin] {
            for (v, (i, j)) in mat.iter() {
                match (self.dof_map.free_index[i], self.dof_map.free_index[j]) {
                    (Some(fi), Some(fj)) => tri.add_triplet(fi, fj, *v),
                    (Some(fi), None) => rhs[fi] -= *v * full_values[j],
                    _ => {}
                }
            }
        }

        ReducedSystem {
            matrix: tri.to_csr(),
            rhs,
            prescribed: full_values,
        }
    }

    /// Energy product g' A g with A the unconstrained a_h matrix.
    pub fn energy_product(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut total = 0.0;
        for (val, (i, j)) in self.stiffness.iter() {
            total += val * u[i] * v[j];
        }
        total
    }

    /// Residual ||(A+R) u - b|| / ||b|| over the free slots for a full
    /// slot vector `u` (Galerkin-orthogonality proxy).
    pub fn free_residual(&self, u: &[f64], problem: &ProblemData) -> f64 {
        let red = self.reduce(problem);
        let n = red.rhs.len();
        let mut x = vec![0.0; n];
        for (slot, f) in self.dof_map.free_index.iter().enumerate() {
            if let Some(fi) = f {
                x[*fi] = u[slot];
            }
        }
        let mut r = red.rhs.clone();
        for (v, (i, j)) in red.matrix.iter() {
            r[i] -= v * x[j];
        }
        let bn = red.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if bn > 0.0 {
            rn / bn
        } else {
            rn
        }
    }
}

/// Reduced system plus the prescribed values needed to reinflate a full
/// slot vector after solving.
pub struct ReducedSystem {
    pub matrix: CsMat<f64>,
    pub rhs: Vec<f64>,
    /// Full-slot vector holding the prescribed Dirichlet values (zeros at
    /// free slots).
    pub prescribed: Vec<f64>,
}

impl ReducedSystem {
    pub fn n(&self) -> usize {
        self.rhs.len()
    }
}

/// Coordinate-format text export (one "i j value" line per stored entry)
/// for external verification.
pub fn export_coordinate_format(mat: &CsMat<f64>) -> String {
    let mut out = String::new();
    for (v, (i, j)) in mat.iter() {
        out.push_str(&format!("{} {} {:.17e}\n", i, j, v));
    }
    out
}

/// Helper shared by tests: indices of the moment slots of an element in
/// the canonical multi-index order.
pub fn moment_positions(k: usize) -> Vec<(u32, u32)> {
    if k >= 2 {
        multi_indices(k - 2)
    } else {
        Vec::new()
    }
}
