//! Convergence study driver.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when a linear solve
//! fails, 3 when `--assert` is given and an invariant check fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use mvmfem::problem::Method;
use mvmfem::report::{render, ReportFormat};
use mvmfem::solver::DEFAULT_TOL;
use mvmfem::study::{run_convergence_with, StudyConfig, Tolerances};
use mvmfem::vtk::{export_vtk, solution_fields};
use mvmfem::{FemError, SimplicialMesh};

#[derive(Parser, Debug)]
#[command(
    name = "study",
    about = "Convergence study on manufactured Stokes solutions"
)]
struct Args {
    /// Spatial dimension (2 or 3).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Subdivisions per axis on the coarsest level.
    #[arg(long, default_value_t = 8)]
    base: usize,
    /// Number of refinement levels.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Comma separated methods: mv, 3f.
    #[arg(long, value_delimiter = ',', default_value = "mv,3f")]
    methods: Vec<Method>,
    /// Viscosity.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Relative residual tolerance of the linear solves.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Also solve with a gradient added to the body force and report the change.
    #[arg(long)]
    perturb_pressure: bool,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one VTK file per level and method into this directory.
    #[arg(long)]
    vtk_dir: Option<PathBuf>,
    /// Write the assembled operators of every level in coordinate format.
    #[arg(long)]
    dump_matrices: Option<PathBuf>,
    /// Write the coarsest mesh as text.
    #[arg(long)]
    dump_mesh: Option<PathBuf>,
    /// Exit with status 3 when an invariant or solenoidality check fails.
    #[arg(long = "assert")]
    check: bool,
    /// Relative bound for the invariant checks.
    #[arg(long, default_value_t = Tolerances::default().invariant)]
    invariant_tol: f64,
    /// Bound on cellwise |div q_h|.
    #[arg(long, default_value_t = Tolerances::default().max_div)]
    div_tol: f64,
    /// Bound on the velocity and vorticity change under gradient forcing.
    #[arg(long, default_value_t = Tolerances::default().robust_delta)]
    robust_tol: f64,
    /// Required pressure change under gradient forcing.
    #[arg(long, default_value_t = Tolerances::default().robust_min_p)]
    min_dp: f64,
}

fn io_err(path: &std::path::Path, e: std::io::Error) -> FemError {
    FemError::InvalidConfig(format!("{}: {e}", path.display()))
}

fn run(args: &Args) -> Result<bool, FemError> {
    let mut config = StudyConfig::new(args.dim, args.base, args.levels);
    config.methods = args.methods.clone();
    config.mu = args.mu;
    config.tol = args.tol;
    config.perturb_pressure = args.perturb_pressure;
    config.tolerances = Tolerances {
        invariant: args.invariant_tol,
        max_div: args.div_tol,
        robust_delta: args.robust_tol,
        robust_min_p: args.min_dp,
    };
    config.validate()?;

    for dir in [&args.vtk_dir, &args.dump_matrices].into_iter().flatten() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    if let Some(path) = &args.dump_mesh {
        let mesh = SimplicialMesh::structured(args.dim, args.base)?;
        std::fs::write(path, mesh.to_text()).map_err(|e| io_err(path, e))?;
    }

    let first_method = args.methods.first().copied();
    let observer =
        |level: usize, problem: &mvmfem::StokesProblem, method: Method, sol: &mvmfem::Solution| {
            if let Some(dir) = &args.vtk_dir {
                let name = format!(
                    "{}_{}d_level{}.vtk",
                    method.label().to_lowercase(),
                    args.dim,
                    level
                );
                export_vtk(
                    &problem.mesh,
                    &solution_fields(problem, sol),
                    &dir.join(name),
                )?;
            }
            if let (Some(dir), true) = (&args.dump_matrices, Some(method) == first_method) {
                let a_h = problem.a_h.to_sparse();
                for (name, m) in [
                    ("a", &problem.a),
                    ("a_h", &a_h),
                    ("b_r", &problem.b_r),
                    ("b_q", &problem.b_q),
                ] {
                    m.write_coordinate(&dir.join(format!("{name}_level{level}.txt")))?;
                }
            }
            Ok(())
        };
    let report = run_convergence_with(&config, &observer)?;

    let text = render(&report, args.format);
    match &args.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| io_err(path, e))?,
        None => print!("{text}"),
    }

    let failures = report.assertion_failures();
    for f in &failures {
        eprintln!("check failed: {f}");
    }
    Ok(failures.is_empty())
}

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which is reserved here
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if args.check => ExitCode::from(3),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_failure() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
