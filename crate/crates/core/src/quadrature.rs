//! Quadrature on simplices.
//!
//! Cell and facet integrals use conical-product (collapsed Gauss–Legendre)
//! rules: the unit square/cube is mapped onto the reference simplex by the
//! Duffy transform and a tensor Gauss–Legendre rule is applied, with the
//! Jacobian folded into the weights. With `m` points per direction the rule
//! on a `d`-simplex integrates every polynomial of total degree
//! `2m - d` exactly, so `m = ceil((degree + d) / 2)` is used.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        // Chebyshev-like initial guess for the i-th root on [-1, 1]
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Legendre polynomial `P_m(x)` and its derivative.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A quadrature rule on a `d`-simplex in barycentric coordinates.
///
/// Weights sum to one; multiply by the simplex measure to integrate.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    pub dim: usize,
    pub degree: usize,
    pub bary: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    /// Conical-product rule on a `dim`-simplex (`dim` in 1..=3) exact for
    /// polynomials of total degree `degree`.
    pub fn new(dim: usize, degree: usize) -> Self {
        assert!((1..=3).contains(&dim), "simplex dimension {dim}");
        let m = (degree + dim).div_ceil(2).max(1);
        let (t, w) = gauss_legendre(m);
        let mut bary = Vec::new();
        let mut weights = Vec::new();
        match dim {
            1 => {
                for i in 0..m {
                    bary.push([1.0 - t[i], t[i], 0.0, 0.0]);
                    weights.push(w[i]);
                }
            }
            2 => {
                for i in 0..m {
                    for j in 0..m {
                        let x = t[i];
                        let y = t[j] * (1.0 - t[i]);
                        bary.push([1.0 - x - y, x, y, 0.0]);
                        weights.push(2.0 * w[i] * w[j] * (1.0 - t[i]));
                    }
                }
            }
            _ => {
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            let x = t[i];
                            let y = t[j] * (1.0 - t[i]);
                            let z = t[k] * (1.0 - t[i]) * (1.0 - t[j]);
                            bary.push([1.0 - x - y - z, x, y, z]);
                            weights.push(
                                6.0 * w[i] * w[j] * w[k] * (1.0 - t[i]).powi(2) * (1.0 - t[j]),
                            );
                        }
                    }
                }
            }
        }
        SimplexRule {
            dim,
            degree,
            bary,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Physical points and scaled weights on the simplex with the given vertices.
    pub fn map<'a>(
        &'a self,
        vertices: &'a [[f64; 3]],
        measure: f64,
    ) -> impl Iterator<Item = ([f64; 3], f64)> + 'a {
        self.bary.iter().zip(&self.weights).map(move |(b, &w)| {
            let mut x = [0.0; 3];
            for (i, v) in vertices.iter().enumerate() {
                for k in 0..3 {
                    x[k] += b[i] * v[k];
                }
            }
            (x, w * measure)
        })
    }
}
