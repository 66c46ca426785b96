//! Manufactured solutions on the unit square and cube.
//!
//! The velocity is the curl of a polynomial bubble, so it is solenoidal and
//! vanishes on the boundary. With constant viscosity the momentum balance
//! reads `curl r + grad p = g`, where `r = mu curl q`; this equals
//! `-div(2 mu eps(q) - p I)` because `-div eps(q) = curl curl q / 2` for
//! solenoidal `q`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// A closed-form field on the unit domain.
pub trait AnalyticField: Send + Sync {
    fn dim(&self) -> usize;
    /// 1 for scalars, `dim` for vectors (3 for 3D vorticity).
    fn components(&self) -> usize;
    /// Upper bound on the polynomial degree, `None` when not polynomial.
    fn degree(&self) -> Option<usize>;
    /// Value at `x`; scalars in component 0, unused components zero.
    fn eval(&self, x: &[f64; 3]) -> [f64; 3];
}

type EvalFn = dyn Fn(&[f64; 3]) -> [f64; 3] + Send + Sync;

/// An [`AnalyticField`] backed by a closure.
#[derive(Clone)]
pub struct FnField {
    dim: usize,
    components: usize,
    degree: Option<usize>,
    f: Arc<EvalFn>,
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnField")
            .field("dim", &self.dim)
            .field("components", &self.components)
            .field("degree", &self.degree)
            .finish()
    }
}

impl FnField {
    pub fn new(
        dim: usize,
        components: usize,
        degree: Option<usize>,
        f: impl Fn(&[f64; 3]) -> [f64; 3] + Send + Sync + 'static,
    ) -> Self {
        FnField {
            dim,
            components,
            degree,
            f: Arc::new(f),
        }
    }

    pub fn scalar(
        dim: usize,
        degree: usize,
        f: impl Fn(&[f64; 3]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(dim, 1, Some(degree), move |x| [f(x), 0.0, 0.0])
    }

    pub fn vector(
        dim: usize,
        degree: usize,
        f: impl Fn(&[f64; 3]) -> [f64; 3] + Send + Sync + 'static,
    ) -> Self {
        Self::new(dim, dim, Some(degree), f)
    }

    pub fn zero(dim: usize, components: usize) -> Self {
        Self::new(dim, components, Some(0), |_| [0.0; 3])
    }

    /// Pointwise sum of two fields of the same shape.
    pub fn plus(&self, other: &FnField) -> FnField {
        let (a, b) = (self.f.clone(), other.f.clone());
        let degree = match (self.degree, other.degree) {
            (Some(p), Some(q)) => Some(p.max(q)),
            _ => None,
        };
        FnField::new(self.dim, self.components, degree, move |x| {
            let (u, v) = (a(x), b(x));
            [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
        })
    }
}

impl AnalyticField for FnField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn components(&self) -> usize {
        self.components
    }

    fn degree(&self) -> Option<usize> {
        self.degree
    }

    fn eval(&self, x: &[f64; 3]) -> [f64; 3] {
        (self.f)(x)
    }
}

/// Exact solution triple together with its forcing and boundary data.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub dim: usize,
    pub mu: f64,
    pub q: FnField,
    pub p: FnField,
    pub r: FnField,
    /// `curl r`, needed for the energy-norm error.
    pub curl_r: FnField,
    pub g: FnField,
    /// Pressure trace on the pressure boundary.
    pub p0: FnField,
    /// Velocity trace on the pressure boundary.
    pub q0: FnField,
}

// Bubble factor a(t) = t^2 (t - 1)^2 and its derivatives.
fn a0(t: f64) -> f64 {
    t * t * (t - 1.0) * (t - 1.0)
}
fn a1(t: f64) -> f64 {
    2.0 * t * (t - 1.0) * (2.0 * t - 1.0)
}
fn a2(t: f64) -> f64 {
    12.0 * t * t - 12.0 * t + 2.0
}
fn a3(t: f64) -> f64 {
    24.0 * t - 12.0
}

// b(t) = t (1 - t) and its derivatives.
fn b0(t: f64) -> f64 {
    t * (1.0 - t)
}
fn b1(t: f64) -> f64 {
    1.0 - 2.0 * t
}
const B2: f64 = -2.0;

/// Manufactured solution with homogeneous boundary data.
///
/// 2D: `q = curl(x^2 y^2 (x-1)^2 (y-1)^2)`, `p = x y (1-x)(1-y)`.
/// 3D: `q = curl([(1-x) x (1-y)^2 y^2 (1-z)^2 z^2, 0, 0])`,
/// `p = x y z (1-x)(1-y)(1-z)`.
pub fn exact_fields(dim: usize, mu: f64) -> ExactSolution {
    assert!(dim == 2 || dim == 3, "dimension {dim}");
    if dim == 2 {
        let q = FnField::vector(2, 7, |x| {
            let (s, t) = (x[0], x[1]);
            [a0(s) * a1(t), -a1(s) * a0(t), 0.0]
        });
        let r = FnField::scalar(2, 6, move |x| {
            let (s, t) = (x[0], x[1]);
            -mu * (a2(s) * a0(t) + a0(s) * a2(t))
        });
        let curl_r = FnField::vector(2, 5, move |x| {
            let (s, t) = (x[0], x[1]);
            [
                -mu * (a2(s) * a1(t) + a0(s) * a3(t)),
                mu * (a3(s) * a0(t) + a1(s) * a2(t)),
                0.0,
            ]
        });
        let p = FnField::scalar(2, 4, |x| b0(x[0]) * b0(x[1]));
        let grad_p = FnField::vector(2, 3, |x| [b1(x[0]) * b0(x[1]), b0(x[0]) * b1(x[1]), 0.0]);
        let g = curl_r.plus(&grad_p);
        ExactSolution {
            dim,
            mu,
            q,
            p,
            r,
            curl_r,
            g,
            p0: FnField::zero(2, 1),
            q0: FnField::zero(2, 2),
        }
    } else {
        let q = FnField::vector(3, 9, |x| {
            let (s, t, u) = (x[0], x[1], x[2]);
            [0.0, b0(s) * a0(t) * a1(u), -b0(s) * a1(t) * a0(u)]
        });
        let r = FnField::vector(3, 8, move |x| {
            let (s, t, u) = (x[0], x[1], x[2]);
            [
                -mu * b0(s) * (a2(t) * a0(u) + a0(t) * a2(u)),
                mu * b1(s) * a1(t) * a0(u),
                mu * b1(s) * a0(t) * a1(u),
            ]
        });
        let curl_r = FnField::vector(3, 7, move |x| {
            let (s, t, u) = (x[0], x[1], x[2]);
            [
                0.0,
                -mu * (b0(s) * (a2(t) * a1(u) + a0(t) * a3(u)) + B2 * a0(t) * a1(u)),
                mu * (B2 * a1(t) * a0(u) + b0(s) * (a3(t) * a0(u) + a1(t) * a2(u))),
            ]
        });
        let p = FnField::scalar(3, 6, |x| b0(x[0]) * b0(x[1]) * b0(x[2]));
        let grad_p = FnField::vector(3, 5, |x| {
            let (s, t, u) = (x[0], x[1], x[2]);
            [
                b1(s) * b0(t) * b0(u),
                b0(s) * b1(t) * b0(u),
                b0(s) * b0(t) * b1(u),
            ]
        });
        let g = curl_r.plus(&grad_p);
        ExactSolution {
            dim,
            mu,
            q,
            p,
            r,
            curl_r,
            g,
            p0: FnField::zero(3, 1),
            q0: FnField::zero(3, 3),
        }
    }
}

/// 2D solution with nonzero boundary traces: `q = curl(sin(pi x) sin(pi y))`,
/// `p = cos(pi x) cos(pi y)`. Exercises the boundary terms of the load.
pub fn trig_fields_2d(mu: f64) -> ExactSolution {
    let q = FnField::new(2, 2, None, |x| {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        [PI * sx * cy, -PI * cx * sy, 0.0]
    });
    let r = FnField::new(2, 1, None, move |x| {
        [
            2.0 * PI * PI * mu * (PI * x[0]).sin() * (PI * x[1]).sin(),
            0.0,
            0.0,
        ]
    });
    let curl_r = FnField::new(2, 2, None, move |x| {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        let k = 2.0 * PI.powi(3) * mu;
        [k * sx * cy, -k * cx * sy, 0.0]
    });
    let p = FnField::new(2, 1, None, |x| {
        [(PI * x[0]).cos() * (PI * x[1]).cos(), 0.0, 0.0]
    });
    let grad_p = FnField::new(2, 2, None, |x| {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        [-PI * sx * cy, -PI * cx * sy, 0.0]
    });
    let g = curl_r.plus(&grad_p);
    ExactSolution {
        dim: 2,
        mu,
        q0: q.clone(),
        p0: p.clone(),
        q,
        p,
        r,
        curl_r,
        g,
    }
}

/// `grad(phi)` with `phi = sin(pi x) sin(pi y)` (times `sin(pi z)` in 3D).
pub fn gradient_perturbation(dim: usize) -> FnField {
    assert!(dim == 2 || dim == 3, "dimension {dim}");
    FnField::new(dim, dim, None, move |x| {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        if dim == 2 {
            [PI * cx * sy, PI * sx * cy, 0.0]
        } else {
            let (sz, cz) = (PI * x[2]).sin_cos();
            [PI * cx * sy * sz, PI * sx * cy * sz, PI * sx * sy * cz]
        }
    })
}

/// The potential `phi` itself.
pub fn perturbation_potential(dim: usize) -> FnField {
    FnField::new(dim, 1, None, move |x| {
        let mut v = (PI * x[0]).sin() * (PI * x[1]).sin();
        if dim == 3 {
            v *= (PI * x[2]).sin();
        }
        [v, 0.0, 0.0]
    })
}
