//! Quadrature rules: 1-D Gauss rules, boundary rules on (possibly curved)
//! edges, and triangle/sector rules for element interiors.

use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};
use crate::geometry::curve::CurveSegment;

/// Gauss-Legendre nodes and weights on [-1, 1], exact for degree 2n-1.
/// Computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to [0, 1].
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|wi| 0.5 * wi).collect(),
    )
}

/// Interior Gauss-Lobatto nodes on [-1, 1] for a degree-k edge trace:
/// the k-1 nodes strictly inside the edge (endpoints excluded).
pub fn gauss_lobatto_interior(k: usize) -> Result<Vec<f64>> {
    match k {
        1 => Ok(vec![]),
        2 => Ok(vec![0.0]),
        3 => {
            let a = 1.0 / 5.0f64.sqrt();
            Ok(vec![-a, a])
        }
        _ => Err(Error::Contract(format!(
            "order k = {k} not supported (k must be 1, 2 or 3)"
        ))),
    }
}

/// Quadrature rule along one edge of an element boundary.
///
/// Weights carry the arclength measure; normals are unit and point out of
/// the element the rule was built for.
#[derive(Debug, Clone)]
pub struct BoundaryQuadRule {
    /// (physical point, curve parameter)
    pub nodes: Vec<(Point2<f64>, f64)>,
    pub weights: Vec<f64>,
    pub normals: Vec<Vector2<f64>>,
}

impl BoundaryQuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn arclength(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Rule on a straight edge from `p0` to `p1` (traversal order as given);
/// the outward normal is to the right of the traversal direction.
pub fn straight_edge_rule(p0: Point2<f64>, p1: Point2<f64>, n: usize) -> BoundaryQuadRule {
    let (ts, ws) = gauss_legendre_01(n);
    let d = p1 - p0;
    let len = d.norm();
    let normal = Vector2::new(d.y, -d.x) / len;
    let nodes = ts.iter().map(|&t| (p0 + d * t, t)).collect();
    let weights = ws.iter().map(|&w| w * len).collect();
    BoundaryQuadRule {
        nodes,
        weights,
        normals: vec![normal; n],
    }
}

/// Rule on a curved edge. `forward = false` means the element traverses the
/// curve from t1 to t0; nodes stay at the same parameters but normals flip
/// so they point out of that element.
pub fn curved_edge_rule(seg: &CurveSegment, n: usize, forward: bool) -> Result<BoundaryQuadRule> {
    let (t0, t1) = seg.t_range();
    let (ts, ws) = gauss_legendre(n);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for (&xi, &w) in ts.iter().zip(&ws) {
        let t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * xi;
        let p = seg.eval(t)?;
        let tang = seg.tangent(t)?;
        let speed = tang.norm();
        if speed <= 1e-14 {
            return Err(Error::Geometry(format!(
                "degenerate tangent at parameter {t} of curved edge"
            )));
        }
        let sign = if forward { 1.0 } else { -1.0 };
        nodes.push((p, t));
        weights.push(w * speed * 0.5 * (t1 - t0));
        normals.push(Vector2::new(tang.y, -tang.x) * (sign / speed));
    }
    Ok(BoundaryQuadRule {
        nodes,
        weights,
        normals,
    })
}

/// Collapsed-square (Duffy) rule on the triangle (a, b, c), exact for
/// polynomials of total degree <= `order`.
pub fn triangle_rule(
    a: Point2<f64>,
    b: Point2<f64>,
    c: Point2<f64>,
    order: usize,
) -> (Vec<Point2<f64>>, Vec<f64>) {
    let nu = (order + 3) / 2; // integrand picks up one extra power of u
    let nv = (order + 2) / 2;
    let nv = nv.max(1);
    let (us, wu) = gauss_legendre_01(nu);
    let (vs, wv) = gauss_legendre_01(nv);
    let two_area = ((b - a).x * (c - a).y - (b - a).y * (c - a).x).abs();
    let mut pts = Vec::with_capacity(nu * nv);
    let mut wts = Vec::with_capacity(nu * nv);
    for (&u, &w1) in us.iter().zip(&wu) {
        for (&v, &w2) in vs.iter().zip(&wv) {
            let q = a + (b - a) * u + (c - b) * (u * v);
            pts.push(q);
            wts.push(w1 * w2 * u * two_area);
        }
    }
    (pts, wts)
}

/// Blended rule on the curved sector spanned by apex `c` and the curve
/// `seg` (traversed forward): x(s, r) = c + r (γ(t(s)) - c).
/// `n_s` controls resolution along the curve, `n_r` across.
pub fn sector_rule(
    c: Point2<f64>,
    seg: &CurveSegment,
    n_s: usize,
    n_r: usize,
) -> Result<(Vec<Point2<f64>>, Vec<f64>)> {
    let (t0, t1) = seg.t_range();
    let span = t1 - t0;
    let (ss, ws) = gauss_legendre_01(n_s);
    let (rs, wr) = gauss_legendre_01(n_r);
    let mut pts = Vec::with_capacity(n_s * n_r);
    let mut wts = Vec::with_capacity(n_s * n_r);
    for (&s, &w1) in ss.iter().zip(&ws) {
        let t = t0 + span * s;
        let g = seg.eval(t)?;
        let dg = seg.tangent(t)?;
        let rel = g - c;
        let jac_s = span * (dg.x * rel.y - dg.y * rel.x);
        for (&r, &w2) in rs.iter().zip(&wr) {
            pts.push(c + rel * r);
            wts.push(w1 * w2 * r * jac_s.abs());
        }
    }
    Ok((pts, wts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..=24 {
            let (x, w) = gauss_legendre(n);
            assert_eq!(x.len(), n);
            // integrate x^d over [-1,1] for all exact degrees
            for d in 0..=(2 * n - 1) {
                let num: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(d as i32)).sum();
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!(
                    (num - exact).abs() < 1e-13,
                    "n={n} d={d}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn straight_rule_weights_sum_to_length() {
        let r = straight_edge_rule(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), 2);
        assert!((r.arclength() - 1.0).abs() < 1e-15);
        assert_eq!(r.normals[0], Vector2::new(0.0, -1.0));
    }

    #[test]
    fn quarter_circle_arclength_and_normals() {
        let seg = CurveSegment::arc(Point2::new(0.0, 0.0), 1.0, 0.0, PI / 2.0);
        let r = curved_edge_rule(&seg, 16, true).unwrap();
        assert!((r.arclength() - PI / 2.0).abs() < 1e-12);
        // element = the disk: ccw traversal of the arc has the disk on the
        // left, so outward normals point radially outward: n · x = |x| = 1.
        for ((p, _), n) in r.nodes.iter().zip(&r.normals) {
            assert!((n.norm() - 1.0).abs() < 1e-13);
            assert!((n.dot(&p.coords) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_rule_exactness() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(1.0, 0.0);
        let c = Point2::new(0.0, 1.0);
        let (pts, wts) = triangle_rule(a, b, c, 4);
        let total: f64 = wts.iter().sum();
        assert!((total - 0.5).abs() < 1e-14);
        // ∫ x^2 y^2 over the unit simplex = 2!2!/6! = 1/180
        let v: f64 = pts
            .iter()
            .zip(&wts)
            .map(|(p, &w)| w * p.x * p.x * p.y * p.y)
            .sum();
        assert!((v - 1.0 / 180.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn sector_rule_quarter_disk_area() {
        let seg = CurveSegment::arc(Point2::new(0.0, 0.0), 1.0, 0.0, PI / 2.0);
        let (_, wts) = sector_rule(Point2::new(0.0, 0.0), &seg, 16, 4).unwrap();
        let total: f64 = wts.iter().sum();
        assert!((total - PI / 4.0).abs() < 1e-12);
    }
}
