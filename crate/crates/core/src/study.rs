//! Convergence studies on the manufactured solutions.

use std::sync::Arc;
use std::time::Instant;

use crate::assembly::{LoadData, RhsVectors};
use crate::error::{FemError, Result};
use crate::fespace::{FeSpace, DATA_QUAD_DEGREE};
use crate::mesh::SimplicialMesh;
use crate::mms::{exact_fields, gradient_perturbation, AnalyticField, ExactSolution};
use crate::problem::{Method, Solution, StokesProblem};
use crate::quadrature::SimplexRule;
use crate::solver::DEFAULT_TOL;

/// Cell rule degree for the gradient perturbation load.
pub const PERTURBATION_QUAD_DEGREE: usize = 12;

/// Exact norms below this value switch errors to absolute.
pub const RELATIVE_FLOOR: f64 = 1e-14;

/// An error measurement; `relative` is false when the exact norm vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorValue {
    pub value: f64,
    pub relative: bool,
}

/// L² norm of `uh - u` over the mesh, optionally divided by `|u|`.
pub fn compute_l2_error(
    space: &FeSpace,
    coeffs: &[f64],
    exact: &dyn AnalyticField,
    relative: bool,
) -> ErrorValue {
    l2_error_impl(space, coeffs, exact, relative, DATA_QUAD_DEGREE, false)
}

/// L² error of the differential (curl of vorticity, div of velocity)
/// against the exact differential field.
pub fn compute_diff_l2_error(
    space: &FeSpace,
    coeffs: &[f64],
    exact_diff: &dyn AnalyticField,
    relative: bool,
) -> ErrorValue {
    l2_error_impl(space, coeffs, exact_diff, relative, DATA_QUAD_DEGREE, true)
}

fn l2_error_impl(
    space: &FeSpace,
    coeffs: &[f64],
    exact: &dyn AnalyticField,
    relative: bool,
    degree: usize,
    differential: bool,
) -> ErrorValue {
    let mesh = space.mesh();
    let rule = SimplexRule::new(mesh.dim(), degree);
    let (mut err2, mut ref2) = (0.0, 0.0);
    for c in 0..mesh.n_cells() {
        let geo = mesh.cell_geometry(c);
        let dofs = space.cell_dofs(c);
        for (b, w) in rule.bary.iter().zip(&rule.weights) {
            let x = crate::fespace::point_from_bary(&geo, b);
            let basis = space.eval_local(&geo, &dofs.signs, b);
            let (val, diff) = crate::fespace::combine(&dofs.ids, &basis, coeffs);
            let uh = if differential { diff } else { val };
            let u = exact.eval(&x);
            let ww = w * geo.volume;
            for k in 0..3 {
                err2 += ww * (uh[k] - u[k]).powi(2);
                ref2 += ww * u[k] * u[k];
            }
        }
    }
    let err = err2.sqrt();
    let norm = ref2.sqrt();
    if relative && norm >= RELATIVE_FLOOR {
        ErrorValue {
            value: err / norm,
            relative: true,
        }
    } else {
        ErrorValue {
            value: err,
            relative: false,
        }
    }
}

/// L² norm of a discrete field.
pub fn discrete_l2_norm(space: &FeSpace, coeffs: &[f64]) -> f64 {
    let zero = crate::mms::FnField::zero(space.dim(), 3);
    // squares of affine fields are quadratic
    l2_error_impl(space, coeffs, &zero, false, 2, false).value
}

/// L² norm of the (cellwise constant) differential of a discrete field.
pub fn discrete_diff_l2_norm(space: &FeSpace, coeffs: &[f64]) -> f64 {
    let mesh = space.mesh();
    space
        .cell_differentials(coeffs)
        .iter()
        .enumerate()
        .map(|(c, d)| mesh.cell_geometry(c).volume * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]))
        .sum::<f64>()
        .sqrt()
}

/// Largest cellwise `|div q_h|`; exact since `div q_h` is constant per cell.
pub fn max_cell_divergence(space_q: &FeSpace, q: &[f64]) -> f64 {
    space_q
        .cell_differentials(q)
        .iter()
        .map(|d| d[0].abs())
        .fold(0.0, f64::max)
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Differences between the three-field and multipoint solutions on the same spaces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InvariantRecord {
    /// `|p^ - p_h|`
    pub p_diff: f64,
    pub p_norm: f64,
    /// `|curl(r^ - r_h)|`
    pub curl_diff: f64,
    pub curl_norm: f64,
    /// `|r^ - r_h|`, 2D only.
    pub r_diff: Option<f64>,
    pub r_norm: f64,
    /// `|q^ - q_h|`
    pub q_diff: f64,
    /// Largest cellwise `|div q^|` and `|div q_h|`.
    pub max_div_3f: f64,
    pub max_div_mv: f64,
}

pub fn check_invariants(
    problem: &StokesProblem,
    three_field: &Solution,
    multipoint: &Solution,
) -> Result<InvariantRecord> {
    let (sr, sq, sp) = (&problem.space_r, &problem.space_q, &problem.space_p);
    let expect = |what, expected: usize, got: usize| {
        if expected == got {
            Ok(())
        } else {
            Err(FemError::DimensionMismatch {
                what,
                expected,
                got,
            })
        }
    };
    for s in [three_field, multipoint] {
        expect("vorticity length", sr.n_dofs(), s.r.len())?;
        expect("velocity length", sq.n_dofs(), s.q.len())?;
        expect("pressure length", sp.n_dofs(), s.p.len())?;
    }
    let dr = diff(&three_field.r, &multipoint.r);
    Ok(InvariantRecord {
        p_diff: discrete_l2_norm(sp, &diff(&three_field.p, &multipoint.p)),
        p_norm: discrete_l2_norm(sp, &three_field.p),
        curl_diff: discrete_diff_l2_norm(sr, &dr),
        curl_norm: discrete_diff_l2_norm(sr, &three_field.r),
        r_diff: (problem.mesh.dim() == 2).then(|| discrete_l2_norm(sr, &dr)),
        r_norm: discrete_l2_norm(sr, &three_field.r),
        q_diff: discrete_l2_norm(sq, &diff(&three_field.q, &multipoint.q)),
        max_div_3f: max_cell_divergence(sq, &three_field.q),
        max_div_mv: max_cell_divergence(sq, &multipoint.q),
    })
}

/// Change of each field when the body force is perturbed by a gradient.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerturbationRecord {
    pub q_delta: f64,
    pub r_delta: f64,
    pub p_delta: f64,
}

pub fn perturbation_deltas(
    problem: &StokesProblem,
    base: &Solution,
    perturbed: &Solution,
) -> PerturbationRecord {
    PerturbationRecord {
        q_delta: discrete_l2_norm(&problem.space_q, &diff(&base.q, &perturbed.q)),
        r_delta: discrete_l2_norm(&problem.space_r, &diff(&base.r, &perturbed.r)),
        p_delta: discrete_l2_norm(&problem.space_p, &diff(&base.p, &perturbed.p)),
    }
}

/// Pass/fail thresholds, reported alongside results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative bound on `|p^ - p_h|`, `|curl(r^ - r_h)|` and (2D) `|r^ - r_h|`.
    pub invariant: f64,
    /// Bound on cellwise `|div q_h|`.
    pub max_div: f64,
    /// Bound on velocity and vorticity changes under a gradient perturbation.
    pub robust_delta: f64,
    /// Minimum pressure change under the same perturbation.
    pub robust_min_p: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            invariant: 1e-9,
            max_div: 1e-10,
            robust_delta: 1e-9,
            robust_min_p: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub dim: usize,
    pub base: usize,
    pub levels: usize,
    pub methods: Vec<Method>,
    pub mu: f64,
    pub tol: f64,
    pub perturb_pressure: bool,
    /// Quadrature degree for loads and error integrals.
    pub quad_degree: usize,
    pub tolerances: Tolerances,
}

impl StudyConfig {
    pub fn new(dim: usize, base: usize, levels: usize) -> Self {
        StudyConfig {
            dim,
            base,
            levels,
            methods: vec![Method::ThreeField, Method::Multipoint],
            mu: 1.0,
            tol: DEFAULT_TOL,
            perturb_pressure: false,
            quad_degree: DATA_QUAD_DEGREE,
            tolerances: Tolerances::default(),
        }
    }

    /// Resolutions per level: doubling in 2D, unit increments in 3D.
    pub fn resolutions(&self) -> Vec<usize> {
        (0..self.levels)
            .map(|k| {
                if self.dim == 2 {
                    self.base << k
                } else {
                    self.base + k
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(FemError::UnsupportedDimension(self.dim));
        }
        if self.base == 0 {
            return Err(FemError::InvalidResolution(0));
        }
        if self.methods.is_empty() {
            return Err(FemError::InvalidConfig("no methods selected".into()));
        }
        if !(self.mu > 0.0) {
            return Err(FemError::NonPositiveViscosity(self.mu));
        }
        if !(self.tol > 0.0) {
            return Err(FemError::InvalidConfig(format!(
                "solver tolerance {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Errors of one method on one level.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    pub n_dof: usize,
    pub err_r: ErrorValue,
    pub err_q: ErrorValue,
    pub err_p: ErrorValue,
    /// `|curl(r_h - r)|`
    pub err_curl_r: f64,
    /// `|div q_h|` (the exact velocity is solenoidal)
    pub div_q: f64,
    pub max_div: f64,
    /// Relative pressure error sampled at cell centroids (diagnostic only).
    pub err_p_centers: f64,
    pub residual: f64,
    pub perturbation: Option<PerturbationRecord>,
    pub seconds: f64,
}

impl MethodResult {
    /// Energy-norm error `(|r_h - r|^2 + |curl(r_h - r)|^2 + |q_h - q|^2 + |div(q_h - q)|^2 + |p_h - p|^2)^(1/2)`
    /// using absolute L² errors.
    pub fn energy_error(&self, norms: &ExactNorms) -> f64 {
        let abs = |e: ErrorValue, n: f64| if e.relative { e.value * n } else { e.value };
        let r = abs(self.err_r, norms.r);
        let q = abs(self.err_q, norms.q);
        let p = abs(self.err_p, norms.p);
        (r * r + self.err_curl_r.powi(2) + q * q + self.div_q.powi(2) + p * p).sqrt()
    }
}

/// L² norms of the exact fields on a level's mesh.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExactNorms {
    pub r: f64,
    pub q: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub level: usize,
    pub n: usize,
    pub h: f64,
    pub norms: ExactNorms,
    pub methods: Vec<MethodResult>,
    pub invariants: Option<InvariantRecord>,
}

impl LevelResult {
    pub fn method(&self, m: Method) -> Option<&MethodResult> {
        self.methods.iter().find(|r| r.method == m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub config: StudyConfig,
    pub levels: Vec<LevelResult>,
}

/// Observed rate `log(e0 / e1) / log(h0 / h1)`.
pub fn observed_rate(e0: f64, e1: f64, h0: f64, h1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

impl ConvergenceReport {
    /// Per-level series of one quantity for one method.
    pub fn series(&self, method: Method, f: impl Fn(&MethodResult) -> f64) -> Vec<f64> {
        self.levels
            .iter()
            .filter_map(|l| l.method(method).map(&f))
            .collect()
    }

    pub fn h(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.h).collect()
    }

    /// Rates between consecutive levels (`levels - 1` entries).
    pub fn rates(&self, errors: &[f64]) -> Vec<f64> {
        let h = self.h();
        (1..errors.len())
            .map(|k| observed_rate(errors[k - 1], errors[k], h[k - 1], h[k]))
            .collect()
    }

    pub fn rate_series(&self, method: Method, f: impl Fn(&MethodResult) -> f64) -> Vec<f64> {
        self.rates(&self.series(method, f))
    }

    /// Invariant and solenoidality violations, empty when everything holds.
    pub fn assertion_failures(&self) -> Vec<String> {
        let tol = self.config.tolerances;
        let mut out = Vec::new();
        for l in &self.levels {
            if let Some(inv) = &l.invariants {
                if inv.p_diff > tol.invariant * inv.p_norm.max(1.0) {
                    out.push(format!("level {}: |p^ - p_h| = {:e}", l.level, inv.p_diff));
                }
                if inv.curl_diff > tol.invariant * inv.curl_norm.max(1.0) {
                    out.push(format!(
                        "level {}: |curl(r^ - r_h)| = {:e}",
                        l.level, inv.curl_diff
                    ));
                }
                if let Some(rd) = inv.r_diff {
                    if rd > tol.invariant * inv.r_norm {
                        out.push(format!("level {}: |r^ - r_h| = {:e}", l.level, rd));
                    }
                }
            }
            for m in &l.methods {
                if m.max_div > tol.max_div {
                    out.push(format!(
                        "level {} {}: max |div q_h| = {:e}",
                        l.level,
                        m.method.label(),
                        m.max_div
                    ));
                }
                if let Some(p) = &m.perturbation {
                    if p.q_delta > tol.robust_delta || p.r_delta > tol.robust_delta {
                        out.push(format!(
                            "level {} {}: gradient forcing moved q by {:e}, r by {:e}",
                            l.level,
                            m.method.label(),
                            p.q_delta,
                            p.r_delta
                        ));
                    }
                    if p.p_delta <= tol.robust_min_p {
                        out.push(format!(
                            "level {} {}: gradient forcing moved p by only {:e}",
                            l.level,
                            m.method.label(),
                            p.p_delta
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Errors of a discrete solution against an exact one.
pub fn evaluate_solution(
    problem: &StokesProblem,
    exact: &ExactSolution,
    sol: &Solution,
) -> (ErrorValue, ErrorValue, ErrorValue, f64, f64) {
    let err_r = compute_l2_error(&problem.space_r, &sol.r, &exact.r, true);
    let err_q = compute_l2_error(&problem.space_q, &sol.q, &exact.q, true);
    let err_p = compute_l2_error(&problem.space_p, &sol.p, &exact.p, true);
    let err_curl = compute_diff_l2_error(&problem.space_r, &sol.r, &exact.curl_r, false).value;
    let div_q = discrete_diff_l2_norm(&problem.space_q, &sol.q);
    (err_r, err_q, err_p, err_curl, div_q)
}

fn pressure_center_error(problem: &StokesProblem, exact: &ExactSolution, p: &[f64]) -> f64 {
    let mesh = &problem.mesh;
    let (mut e2, mut n2) = (0.0, 0.0);
    for c in 0..mesh.n_cells() {
        let geo = mesh.cell_geometry(c);
        let pc = exact.p.eval(&geo.centroid())[0];
        e2 += geo.volume * (p[c] - pc).powi(2);
        n2 += geo.volume * pc * pc;
    }
    if n2.sqrt() >= RELATIVE_FLOOR {
        (e2 / n2).sqrt()
    } else {
        e2.sqrt()
    }
}

/// Called once per level and method with the computed solution.
pub type SolutionObserver<'a> =
    dyn Fn(usize, &StokesProblem, Method, &Solution) -> Result<()> + Sync + 'a;

fn run_level(
    config: &StudyConfig,
    level: usize,
    n: usize,
    observer: &SolutionObserver<'_>,
) -> Result<LevelResult> {
    let mesh = Arc::new(SimplicialMesh::structured(config.dim, n)?);
    let problem = StokesProblem::new(mesh.clone(), config.mu)?;
    let exact = exact_fields(config.dim, config.mu);
    let norms = ExactNorms {
        r: compute_l2_error(
            &problem.space_r,
            &vec![0.0; problem.space_r.n_dofs()],
            &exact.r,
            false,
        )
        .value,
        q: compute_l2_error(
            &problem.space_q,
            &vec![0.0; problem.space_q.n_dofs()],
            &exact.q,
            false,
        )
        .value,
        p: compute_l2_error(
            &problem.space_p,
            &vec![0.0; problem.space_p.n_dofs()],
            &exact.p,
            false,
        )
        .value,
    };
    // Boundary data of the manufactured solutions is homogeneous.
    let rhs = problem.load(&LoadData {
        g: &exact.g,
        p0: None,
        q0: None,
        degree: config.quad_degree,
    })?;
    // The load is linear in g, so the gradient increment is assembled on its
    // own with a finer rule; it is not polynomial.
    let rhs_perturbed = if config.perturb_pressure {
        let grad = gradient_perturbation(config.dim);
        let delta = problem.load(&LoadData {
            g: &grad,
            p0: None,
            q0: None,
            degree: PERTURBATION_QUAD_DEGREE.max(config.quad_degree),
        })?;
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Some(RhsVectors {
            f_r: add(&rhs.f_r, &delta.f_r),
            f_q: add(&rhs.f_q, &delta.f_q),
            f_p: add(&rhs.f_p, &delta.f_p),
        })
    } else {
        None
    };

    let mut methods = Vec::new();
    let mut solutions = Vec::new();
    for &method in &config.methods {
        let start = Instant::now();
        let sol = problem.solve(method, &rhs, config.tol)?;
        let perturbation = match &rhs_perturbed {
            Some(rp) => {
                let sp = problem.solve(method, rp, config.tol)?;
                Some(perturbation_deltas(&problem, &sol, &sp))
            }
            None => None,
        };
        let seconds = start.elapsed().as_secs_f64();
        observer(level + 1, &problem, method, &sol)?;
        let (err_r, err_q, err_p, err_curl_r, div_q) = evaluate_solution(&problem, &exact, &sol);
        methods.push(MethodResult {
            method,
            n_dof: sol.n_dof,
            err_r,
            err_q,
            err_p,
            err_curl_r,
            div_q,
            max_div: max_cell_divergence(&problem.space_q, &sol.q),
            err_p_centers: pressure_center_error(&problem, &exact, &sol.p),
            residual: sol.residual,
            perturbation,
            seconds,
        });
        solutions.push((method, sol));
    }
    let find = |m| solutions.iter().find(|(k, _)| *k == m).map(|(_, s)| s);
    let invariants = match (find(Method::ThreeField), find(Method::Multipoint)) {
        (Some(a), Some(b)) => Some(check_invariants(&problem, a, b)?),
        _ => None,
    };
    Ok(LevelResult {
        level: level + 1,
        n,
        h: mesh.mesh_size(),
        norms,
        methods,
        invariants,
    })
}

/// Runs every level of a study. Levels are independent and run on separate
/// threads; results are merged in level order.
pub fn run_convergence(config: &StudyConfig) -> Result<ConvergenceReport> {
    run_convergence_with(config, &|_, _, _, _| Ok(()))
}

/// [`run_convergence`] with a callback receiving every solution.
pub fn run_convergence_with(
    config: &StudyConfig,
    observer: &SolutionObserver<'_>,
) -> Result<ConvergenceReport> {
    config.validate()?;
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();
    let config = StudyConfig {
        methods,
        ..config.clone()
    };
    let resolutions = config.resolutions();
    let results: Vec<Result<LevelResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = resolutions
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let config = &config;
                scope.spawn(move || run_level(config, k, n, observer))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("level thread panicked"))
            .collect()
    });
    let mut levels = Vec::with_capacity(results.len());
    for (k, r) in results.into_iter().enumerate() {
        levels.push(r.map_err(|e| FemError::Level {
            level: k + 1,
            n: resolutions[k],
            source: Box::new(e),
        })?);
    }
    Ok(ConvergenceReport { config, levels })
}
