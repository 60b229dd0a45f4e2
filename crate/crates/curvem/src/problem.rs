//! Problem data: coefficients, loads, boundary data and (for manufactured
//! cases) the exact solution. Built-in cases live in `cases`.

use nalgebra::{Point2, Vector2};

use crate::poly2d::PolyXY;

pub type ScalarFn = Box<dyn Fn(Point2<f64>) -> f64 + Send + Sync>;
pub type BoundaryFluxFn = Box<dyn Fn(Point2<f64>, Vector2<f64>) -> f64 + Send + Sync>;
pub type RegionScalarFn = Box<dyn Fn(Point2<f64>, u32) -> f64 + Send + Sync>;
pub type RegionGradFn = Box<dyn Fn(Point2<f64>, u32) -> Vector2<f64> + Send + Sync>;

/// Exact solution evaluated per region (the gradient may jump across a
/// material interface, so callers must say which side they are on).
pub struct ExactSolution {
    pub u: RegionScalarFn,
    pub grad: RegionGradFn,
}

impl ExactSolution {
    pub fn smooth(
        u: impl Fn(Point2<f64>) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Point2<f64>) -> Vector2<f64> + Send + Sync + 'static,
    ) -> Self {
        ExactSolution {
            u: Box::new(move |p, _| u(p)),
            grad: Box::new(move |p, _| grad(p)),
        }
    }

    pub fn from_poly(p: PolyXY) -> Self {
        let q = p.clone();
        ExactSolution {
            u: Box::new(move |x, _| p.eval(x)),
            grad: Box::new(move |x, _| q.grad(x)),
        }
    }
}

/// Data of the model problem -div(kappa grad u) = f with u = g_D on the
/// Dirichlet part and kappa du/dn + rho u = g_R on the Robin part.
/// kappa itself lives on the mesh (one value per region).
pub struct ProblemData {
    pub f: ScalarFn,
    pub g_d: ScalarFn,
    pub g_r: BoundaryFluxFn,
    pub rho: ScalarFn,
    pub exact: Option<ExactSolution>,
}

/// Canonical patch-test polynomial of degree k.
pub fn patch_poly(k: usize) -> PolyXY {
    match k {
        1 => PolyXY::new(vec![(1, 0, 1.0), (0, 1, 2.0)]), // x + 2y
        2 => PolyXY::new(vec![
            (2, 0, 1.0),
            (1, 1, -1.0),
            (0, 2, 1.0),
            (1, 0, 1.0),
            (0, 0, 0.5),
        ]),
        3 => PolyXY::new(vec![(3, 0, 1.0), (1, 2, -3.0), (1, 0, 0.7), (0, 0, -0.2)]), // x^3 - 3xy^2 + ...
        _ => panic!("patch polynomial defined for k = 1, 2, 3"),
    }
}

/// Piecewise-radial interface solution around `center` with jump radius
/// `r`: u = a rho^2 inside, u = c ln(rho^2) + d outside, with value and
/// co-normal flux continuity built in. f = -4 a kappa_in inside, 0 outside.
pub fn interface_jump_problem(
    center: Point2<f64>,
    r: f64,
    kappa_in: f64,
    kappa_out: f64,
) -> ProblemData {
    let a = 1.0;
    let c = kappa_in * a * r * r / kappa_out;
    let d = a * r * r - c * (r * r).ln();
    let u_in = move |p: Point2<f64>| a * (p - center).norm_squared();
    let u_out = move |p: Point2<f64>| {
        let r2 = (p - center).norm_squared();
        c * r2.ln() + d
    };
    let u = move |p: Point2<f64>, region: u32| {
        if region == 0 {
            u_in(p)
        } else {
            u_out(p)
        }
    };
    let grad = move |p: Point2<f64>, region: u32| -> Vector2<f64> {
        let rel = p - center;
        if region == 0 {
            rel * (2.0 * a)
        } else {
            rel * (2.0 * c / rel.norm_squared())
        }
    };
    ProblemData {
        f: Box::new(move |p| {
            if (p - center).norm() < r {
                -4.0 * a * kappa_in
            } else {
                0.0
            }
        }),
        // the whole outer boundary is Dirichlet for this case
        g_d: Box::new(u_out),
        g_r: Box::new(|_, _| 0.0),
        rho: Box::new(|_| 0.0),
        exact: Some(ExactSolution {
            u: Box::new(u),
            grad: Box::new(grad),
        }),
    }
}

/// Smooth manufactured solution u = sin(x) cos(y) for a single-material
/// domain; supports Dirichlet and Robin boundaries (constant rho).
pub fn smooth_sin_problem(kappa: f64, rho: f64) -> ProblemData {
    let u = |p: Point2<f64>| p.x.sin() * p.y.cos();
    let grad = |p: Point2<f64>| Vector2::new(p.x.cos() * p.y.cos(), -p.x.sin() * p.y.sin());
    ProblemData {
        f: Box::new(move |p| 2.0 * kappa * u(p)),
        g_d: Box::new(u),
        g_r: Box::new(move |p, n| kappa * grad(p).dot(&n) + rho * u(p)),
        rho: Box::new(move |_| rho),
        exact: Some(ExactSolution::smooth(u, grad)),
    }
}

impl ProblemData {
    /// Homogeneous problem with zero data everywhere.
    pub fn zero() -> Self {
        ProblemData {
            f: Box::new(|_| 0.0),
            g_d: Box::new(|_| 0.0),
            g_r: Box::new(|_, _| 0.0),
            rho: Box::new(|_| 0.0),
            exact: None,
        }
    }

    /// Manufactured problem whose exact solution is the polynomial `p`,
    /// with kappa identically `kappa` and Robin coefficient `rho` where
    /// Robin edges exist. Used by the patch test.
    pub fn from_polynomial(p: PolyXY, kappa: f64, rho: f64) -> Self {
        let pf = p.clone();
        let pd = p.clone();
        let pr = p.clone();
        ProblemData {
            f: Box::new(move |x| -kappa * pf.laplacian(x)),
            g_d: Box::new(move |x| pd.eval(x)),
            g_r: Box::new(move |x, n| kappa * pr.grad(x).dot(&n) + rho * pr.eval(x)),
            rho: Box::new(move |_| rho),
            exact: Some(ExactSolution::from_poly(p)),
        }
    }
}
