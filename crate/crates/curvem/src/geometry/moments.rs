//! Exact polynomial moments over curved polygons via divergence-theorem
//! reduction to boundary integrals.

use crate::error::Result;
use crate::geometry::mesh::{Mesh, QuadConfig};
use crate::poly2d::{dim_pk, multi_indices, ElementMoments, ScaledMonomialBasis};

/// ∫_P m_a dA for all |a| <= max_degree, computed edge by edge as
/// ∮ F_a · n ds with F_a = (h/(ax+1) m_(ax+1, ay), 0).
///
/// Exact to round-off on straight edges; on curved edges the error is the
/// (tiny) Gauss error of the configured curved-edge rule.
pub fn monomial_moments(
    mesh: &Mesh,
    element: usize,
    basis: &ScaledMonomialBasis,
    max_degree: usize,
    cfg: &QuadConfig,
) -> Result<ElementMoments> {
    let rules = mesh.element_boundary_rules(element, cfg)?;
    Ok(monomial_moments_from_rules(&rules, basis, max_degree))
}

/// Same reduction when the caller already has boundary rules in hand.
pub fn monomial_moments_from_rules(
    rules: &[crate::geometry::quadrature::BoundaryQuadRule],
    basis: &ScaledMonomialBasis,
    max_degree: usize,
) -> ElementMoments {
    let idx = multi_indices(max_degree);
    let h = basis.scale();
    let mut vals = vec![0.0; dim_pk(max_degree as i64, 2)];
    for rule in rules {
        for ((p, _), (&w, n)) in rule
            .nodes
            .iter()
            .zip(rule.weights.iter().zip(&rule.normals))
        {
            let wnx = w * n.x;
            if wnx == 0.0 {
                continue;
            }
            let s = basis.local(*p);
            for (pos, &(ax, ay)) in idx.iter().enumerate() {
                // F · n with F_x = h/(ax+1) * m_(ax+1, ay)
                let m = s.x.powi(ax as i32 + 1) * s.y.powi(ay as i32);
                vals[pos] += wnx * h / (ax as f64 + 1.0) * m;
            }
        }
    }
    ElementMoments::new(max_degree, vals)
}
