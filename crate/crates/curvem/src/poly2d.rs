//! Scaled 2-D monomial bases and their calculus.
//!
//! Every projector in the crate is expressed in the basis
//! `m_a(x) = ((x - xc)/h)^a` attached to an element (center `xc`,
//! scale `h`). Multi-indices are ordered degree-lexicographically:
//! (0,0); (1,0),(0,1); (2,0),(1,1),(0,2); ...

use nalgebra::{DMatrix, DVector, Point2, Vector2};

use crate::error::{Error, Result};

/// Dimension of the polynomial space of degree <= k in d variables.
/// `k = -1` denotes the zero space.
pub fn dim_pk(k: i64, d: u32) -> usize {
    if k < 0 {
        return 0;
    }
    let k = k as usize;
    match d {
        1 => k + 1,
        2 => (k + 1) * (k + 2) / 2,
        _ => panic!("dim_pk supports d = 1, 2"),
    }
}

/// Multi-indices (ax, ay) with ax + ay <= k in degree-lex order.
pub fn multi_indices(k: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(dim_pk(k as i64, 2));
    for deg in 0..=k as u32 {
        for ay in 0..=deg {
            out.push((deg - ay, ay));
        }
    }
    out
}

/// Linear index of (ax, ay) in the degree-lex ordering.
pub fn multi_index_position(ax: u32, ay: u32) -> usize {
    let d = (ax + ay) as usize;
    d * (d + 1) / 2 + ay as usize
}

/// Monomial basis scaled and centered on an element.
#[derive(Debug, Clone)]
pub struct ScaledMonomialBasis {
    center: Point2<f64>,
    scale: f64,
    degree: usize,
    indices: Vec<(u32, u32)>,
}

impl ScaledMonomialBasis {
    pub fn new(center: Point2<f64>, scale: f64, degree: usize) -> Self {
        assert!(scale > 0.0, "basis scale must be positive");
        Self {
            center,
            scale,
            degree,
            indices: multi_indices(degree),
        }
    }

    pub fn center(&self) -> Point2<f64> {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[(u32, u32)] {
        &self.indices
    }

    /// Local coordinates of a physical point.
    #[inline]
    pub fn local(&self, x: Point2<f64>) -> Vector2<f64> {
        (x - self.center) / self.scale
    }

    /// Values of all basis monomials at `x`.
    pub fn eval(&self, x: Point2<f64>) -> DVector<f64> {
        let s = self.local(x);
        let mut out = DVector::zeros(self.dim());
        for (i, &(ax, ay)) in self.indices.iter().enumerate() {
            out[i] = s.x.powi(ax as i32) * s.y.powi(ay as i32);
        }
        out
    }

    /// Value of the single monomial with multi-index (ax, ay) at `x`.
    pub fn eval_single(&self, ax: u32, ay: u32, x: Point2<f64>) -> f64 {
        let s = self.local(x);
        s.x.powi(ax as i32) * s.y.powi(ay as i32)
    }

    /// Gradients of all basis monomials at `x` (carry the 1/h scale).
    pub fn grad(&self, x: Point2<f64>) -> Vec<Vector2<f64>> {
        let s = self.local(x);
        let inv_h = 1.0 / self.scale;
        self.indices
            .iter()
            .map(|&(ax, ay)| {
                let gx = if ax == 0 {
                    0.0
                } else {
                    ax as f64 * s.x.powi(ax as i32 - 1) * s.y.powi(ay as i32)
                };
                let gy = if ay == 0 {
                    0.0
                } else {
                    ay as f64 * s.x.powi(ax as i32) * s.y.powi(ay as i32 - 1)
                };
                Vector2::new(gx * inv_h, gy * inv_h)
            })
            .collect()
    }

    /// Coefficients of `Δ m_a` as sparse (basis position, value) pairs over
    /// this same basis. All returned positions have degree `|a| - 2`; the
    /// 1/h^2 scale is included in the values.
    pub fn laplacian_coeffs(&self, ax: u32, ay: u32) -> Vec<(usize, f64)> {
        let inv_h2 = 1.0 / (self.scale * self.scale);
        let mut out = Vec::new();
        if ax >= 2 {
            out.push((
                multi_index_position(ax - 2, ay),
                (ax * (ax - 1)) as f64 * inv_h2,
            ));
        }
        if ay >= 2 {
            out.push((
                multi_index_position(ax, ay - 2),
                (ay * (ay - 1)) as f64 * inv_h2,
            ));
        }
        out
    }
}

/// Integrals of all scaled monomials over one element, up to a maximum
/// degree. Filled by the geometry module via divergence-theorem reduction.
#[derive(Debug, Clone)]
pub struct ElementMoments {
    max_degree: usize,
    values: Vec<f64>,
}

impl ElementMoments {
    pub fn new(max_degree: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), dim_pk(max_degree as i64, 2));
        Self { max_degree, values }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// ∫_P m_(ax,ay) dA
    pub fn get(&self, ax: u32, ay: u32) -> f64 {
        debug_assert!((ax + ay) as usize <= self.max_degree);
        self.values[multi_index_position(ax, ay)]
    }

    /// Element area (= moment of m_0).
    pub fn area(&self) -> f64 {
        self.values[0]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// ∫_P ∇m_a · ∇m_b dA for all a, b of the basis. PSD with kernel = constants.
pub fn stiffness_gram(basis: &ScaledMonomialBasis, moments: &ElementMoments) -> DMatrix<f64> {
    let n = basis.dim();
    let inv_h2 = 1.0 / (basis.scale() * basis.scale());
    let idx = basis.indices();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        let (ax, ay) = idx[i];
        for j in i..n {
            let (bx, by) = idx[j];
            let mut v = 0.0;
            if ax >= 1 && bx >= 1 {
                v += (ax * bx) as f64 * moments.get(ax + bx - 2, ay + by);
            }
            if ay >= 1 && by >= 1 {
                v += (ay * by) as f64 * moments.get(ax + bx, ay + by - 2);
            }
            let v = v * inv_h2;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// ∫_P m_a m_b dA with a over the full basis and b limited to degree <= s.
/// Square when s = basis degree.
pub fn mass_moments(
    basis: &ScaledMonomialBasis,
    moments: &ElementMoments,
    s: usize,
) -> DMatrix<f64> {
    let rows = basis.dim();
    let cols = dim_pk(s as i64, 2);
    let idx = basis.indices();
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        let (ax, ay) = idx[i];
        for (j, &(bx, by)) in idx.iter().take(cols).enumerate() {
            m[(i, j)] = moments.get(ax + bx, ay + by);
        }
    }
    m
}

/// Polynomial in physical coordinates: sum of c_(i,j) x^i y^j. Used for
/// manufactured data and for converting global polynomials into element
/// bases.
#[derive(Debug, Clone)]
pub struct PolyXY {
    pub terms: Vec<(u32, u32, f64)>,
}

impl PolyXY {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        Self { terms }
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|&(i, j, _)| (i + j) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, p: Point2<f64>) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * p.x.powi(i as i32) * p.y.powi(j as i32))
            .sum()
    }

    pub fn grad(&self, p: Point2<f64>) -> Vector2<f64> {
        let mut g = Vector2::zeros();
        for &(i, j, c) in &self.terms {
            if i > 0 {
                g.x += c * i as f64 * p.x.powi(i as i32 - 1) * p.y.powi(j as i32);
            }
            if j > 0 {
                g.y += c * j as f64 * p.x.powi(i as i32) * p.y.powi(j as i32 - 1);
            }
        }
        g
    }

    pub fn laplacian(&self, p: Point2<f64>) -> f64 {
        let mut v = 0.0;
        for &(i, j, c) in &self.terms {
            if i >= 2 {
                v += c * (i * (i - 1)) as f64 * p.x.powi(i as i32 - 2) * p.y.powi(j as i32);
            }
            if j >= 2 {
                v += c * (j * (j - 1)) as f64 * p.x.powi(i as i32) * p.y.powi(j as i32 - 2);
            }
        }
        v
    }

    /// Exact coefficients of this polynomial in a scaled basis, by binomial
    /// expansion of x = xc + h s, y = yc + h t.
    pub fn coeffs_in(&self, basis: &ScaledMonomialBasis) -> Result<DVector<f64>> {
        if self.degree() > basis.degree() {
            return Err(Error::Contract(format!(
                "polynomial degree {} exceeds basis degree {}",
                self.degree(),
                basis.degree()
            )));
        }
        let c = basis.center();
        let h = basis.scale();
        let mut out = DVector::zeros(basis.dim());
        for &(i, j, coef) in &self.terms {
            // x^i = sum_p C(i,p) xc^(i-p) h^p s^p, same for y.
            for p in 0..=i {
                for q in 0..=j {
                    let w = coef
                        * binomial(i, p)
                        * binomial(j, q)
                        * c.x.powi((i - p) as i32)
                        * c.y.powi((j - q) as i32)
                        * h.powi((p + q) as i32);
                    out[multi_index_position(p, q)] += w;
                }
            }
        }
        Ok(out)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Evaluate a coefficient vector over a basis at a point.
pub fn eval_poly(basis: &ScaledMonomialBasis, coeffs: &DVector<f64>, x: Point2<f64>) -> f64 {
    basis.eval(x).dot(coeffs)
}

/// Gradient of a coefficient vector over a basis at a point.
pub fn grad_poly(
    basis: &ScaledMonomialBasis,
    coeffs: &DVector<f64>,
    x: Point2<f64>,
) -> Vector2<f64> {
    let grads = basis.grad(x);
    let mut g = Vector2::zeros();
    for (i, gi) in grads.iter().enumerate() {
        g += gi * coeffs[i];
    }
    g
}
