//! Trace generator points for curved edges.
//!
//! The points are the Lagrange nodes of order k on an "ideal triangle"
//! whose base is the chord joining the curved edge's endpoints and whose
//! apex sits at equilateral height on the bulge side of the curve, with
//! the two base vertices excluded. Values at these fictitious points plus
//! the two endpoints pin down the P_k polynomial whose restriction to the
//! curve is a function's trace.

use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};
use crate::geometry::curve::CurveSegment;
use crate::poly2d::dim_pk;

/// Barycentric index triples (a, b, c) over (chord start, chord end, apex)
/// for all nodes except the two base vertices, in a fixed deterministic
/// order (apex coordinate ascending, then second coordinate ascending).
pub fn tgp_barycentric(k: usize) -> Vec<(u32, u32, u32)> {
    let k = k as u32;
    let mut out = Vec::new();
    for c in 0..=k {
        for b in 0..=(k - c) {
            let a = k - c - b;
            if (a == k && c == 0) || (b == k && c == 0) {
                continue; // base vertices
            }
            out.push((a, b, c));
        }
    }
    out
}

/// The ideal triangle's apex for a curved edge with chord `a -> b`
/// (canonical direction). The apex is placed at equilateral height on the
/// side of the curve's parameter-midpoint sample; if that sample lies on
/// the chord (within 1e-10 of the chord length), the left side of the
/// canonical direction is used.
pub fn ideal_apex(
    a: Point2<f64>,
    b: Point2<f64>,
    curve: Option<&CurveSegment>,
) -> Result<Point2<f64>> {
    let chord = b - a;
    let len = chord.norm();
    if len <= 1e-300 {
        return Err(Error::Geometry(
            "curved edge has coincident endpoints".into(),
        ));
    }
    let left = Vector2::new(-chord.y, chord.x) / len;
    let side = match curve {
        Some(seg) => {
            let s = seg.midpoint_sample();
            let d = left.dot(&(s - a));
            if d.abs() <= 1e-10 * len {
                1.0
            } else {
                d.signum()
            }
        }
        None => 1.0,
    };
    let mid = nalgebra::center(&a, &b);
    Ok(mid + left * (side * len * 3.0f64.sqrt() / 2.0))
}

/// Trace generator points of order k for the chord `a -> b` and curve.
/// Returns dim(P_k) - 2 points; both elements adjacent to the edge obtain
/// bitwise identical points because everything is derived from the
/// canonical edge data.
pub fn tg_points(
    a: Point2<f64>,
    b: Point2<f64>,
    curve: Option<&CurveSegment>,
    k: usize,
) -> Result<Vec<Point2<f64>>> {
    if !(1..=3).contains(&k) {
        return Err(Error::Contract(format!("order k = {k} not in 1..=3")));
    }
    let apex = ideal_apex(a, b, curve)?;
    let kf = k as f64;
    let pts = tgp_barycentric(k)
        .into_iter()
        .map(|(ia, ib, ic)| {
            Point2::from(
                (a.coords * ia as f64 + b.coords * ib as f64 + apex.coords * ic as f64) / kf,
            )
        })
        .collect::<Vec<_>>();
    debug_assert_eq!(pts.len(), dim_pk(k as i64, 2) - 2);
    Ok(pts)
}
