//! `slabmom`: runs moment models on the slab benchmarks, writes CSV profiles
//! and compares against a discrete-ordinates reference.

mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use slabmom_core::reference_sn::{self, DEFAULT_ORDINATES, DEFAULT_REFINEMENT};
use slabmom_core::{
    error_norms, simulate, thread_pool, Error, LimiterVariant, Model, ModelKind, OrdinateSet, ProblemKind, ProblemSpec,
    ReferenceCache, RunOutput, SolverConfig,
};

use settings::{merge, FileConfig};

#[derive(Parser, Debug)]
#[command(name = "slabmom", version, about = "Moment closures for slab-geometry kinetic transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one model and write the cell profile as CSV.
    Run(RunArgs),
    /// Error of several models against the discrete-ordinates reference.
    Convergence(ConvergenceArgs),
    /// Compute a discrete-ordinates reference profile.
    Reference(ReferenceArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// key=value file with defaults for any long option; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// plane-source, source-beam or smooth-gaussian.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Worker threads (all available cores if unset).
    #[arg(long, env = "SLABMOM_THREADS")]
    threads: Option<usize>,
    /// First-order scheme: no reconstruction, forward Euler.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    first_order: Option<bool>,
}

#[derive(Args, Debug, Clone, Default)]
struct SolverArgs {
    /// Exactness degree of the angular quadrature on every interval.
    #[arg(long)]
    quad_order: Option<usize>,
    /// standard, half-space or characteristic-lp.
    #[arg(long)]
    limiter: Option<String>,
    #[arg(long)]
    eps_r: Option<f64>,
    #[arg(long)]
    eps_tilde: Option<f64>,
    #[arg(long)]
    eps_gamma: Option<f64>,
    /// Gradient tolerance of the Newton solver.
    #[arg(long)]
    tau: Option<f64>,
    /// Newton iterations per regularization level.
    #[arg(long)]
    k0: Option<usize>,
    /// Total Newton iteration budget.
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// pn, mn, hfpn, hfmn, pmpn or pmmn.
    #[arg(long)]
    model: Option<String>,
    /// Number of moments.
    #[arg(long)]
    n: Option<usize>,
    /// CSV destination; standard output if unset.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Diagnostics file; defaults to `<output>.diagnostics` when writing to a file.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated model names.
    #[arg(long)]
    models: Option<String>,
    /// Comma-separated moment counts.
    #[arg(long)]
    n_list: Option<String>,
    /// `compute`, or a directory used as reference cache.
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    ordinates: Option<usize>,
    /// Reference cells per model cell.
    #[arg(long)]
    refinement: Option<usize>,
    /// Report the minimum wall time of three runs.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    timing: Option<bool>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReferenceArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    ordinates: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Config(String),
    Solver(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfiguration(m) => Failure::Config(m),
            Error::Io(m) => Failure::Io(m),
            other => Failure::Solver(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn config_err(e: String) -> Failure {
    Failure::Config(e)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Convergence(a) => convergence(a),
        Command::Reference(a) => reference(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e}");
            if let Error::StepFailure { moments, .. } = &e {
                eprintln!("cell moments: {}", output::join_floats(moments));
            }
            ExitCode::FAILURE
        }
    }
}

fn load_file(common: &CommonArgs) -> Result<FileConfig, Failure> {
    match &common.config {
        Some(p) => FileConfig::load(p).map_err(config_err),
        None => Ok(FileConfig::default()),
    }
}

fn merge_common(c: &mut CommonArgs, f: &mut FileConfig) -> Result<(), String> {
    merge(&mut c.problem, f, "problem")?;
    merge(&mut c.cells, f, "cells")?;
    merge(&mut c.t_end, f, "t-end")?;
    merge(&mut c.threads, f, "threads")?;
    merge(&mut c.first_order, f, "first-order")
}

fn merge_solver(s: &mut SolverArgs, f: &mut FileConfig) -> Result<(), String> {
    merge(&mut s.quad_order, f, "quad-order")?;
    merge(&mut s.limiter, f, "limiter")?;
    merge(&mut s.eps_r, f, "eps-r")?;
    merge(&mut s.eps_tilde, f, "eps-tilde")?;
    merge(&mut s.eps_gamma, f, "eps-gamma")?;
    merge(&mut s.tau, f, "tau")?;
    merge(&mut s.k0, f, "k0")?;
    merge(&mut s.k_max, f, "k-max")?;
    merge(&mut s.cfl, f, "cfl")
}

fn problem_of(c: &CommonArgs) -> Result<ProblemSpec, Failure> {
    let name = c
        .problem
        .as_deref()
        .ok_or_else(|| Failure::Config("--problem is required".into()))?;
    let kind: ProblemKind = name.parse()?;
    Ok(ProblemSpec::by_kind(kind))
}

fn solver_config(c: &CommonArgs, s: &SolverArgs) -> Result<SolverConfig, Failure> {
    let mut cfg = SolverConfig::default();
    if let Some(l) = &s.limiter {
        cfg.limiter_variant = l.parse::<LimiterVariant>()?;
    }
    if let Some(v) = s.eps_r {
        cfg.limiter.eps_r = v;
    }
    if let Some(v) = s.eps_tilde {
        cfg.limiter.eps_tilde = v;
    }
    if let Some(v) = s.eps_gamma {
        cfg.newton.eps_gamma = v;
    }
    if let Some(v) = s.tau {
        cfg.newton.tau = v;
    }
    if let Some(v) = s.k0 {
        cfg.newton.k0 = v;
    }
    if let Some(v) = s.k_max {
        cfg.newton.k_max = v;
    }
    if let Some(v) = s.cfl {
        cfg.cfl_safety = v;
    }
    cfg.second_order = !c.first_order.unwrap_or(false);
    cfg.threads = c.threads;
    cfg.validate()?;
    Ok(cfg)
}

fn quad_order(kind: ModelKind, n: usize, problem: &ProblemSpec, s: &SolverArgs) -> usize {
    s.quad_order
        .unwrap_or_else(|| problem.default_quad_order(kind.basis_kind().is_full(), n))
}

fn build_model(kind: ModelKind, n: usize, problem: &ProblemSpec, s: &SolverArgs) -> Result<Model, Failure> {
    kind.validate_n(n)?;
    Ok(Model::new(kind, n, quad_order(kind, n, problem, s))?)
}

fn run(mut a: RunArgs) -> Result<(), Failure> {
    let mut file = load_file(&a.common)?;
    merge_common(&mut a.common, &mut file).map_err(config_err)?;
    merge_solver(&mut a.solver, &mut file).map_err(config_err)?;
    merge(&mut a.model, &mut file, "model").map_err(config_err)?;
    merge(&mut a.n, &mut file, "n").map_err(config_err)?;
    merge(&mut a.output, &mut file, "output").map_err(config_err)?;
    merge(&mut a.diagnostics, &mut file, "diagnostics").map_err(config_err)?;
    file.finish().map_err(config_err)?;

    let problem = problem_of(&a.common)?;
    let kind: ModelKind = a
        .model
        .as_deref()
        .ok_or_else(|| Failure::Config("--model is required".into()))?
        .parse()?;
    let n = a.n.ok_or_else(|| Failure::Config("--n is required".into()))?;
    let model = build_model(kind, n, &problem, &a.solver)?;
    let cfg = solver_config(&a.common, &a.solver)?;
    let cells = a.common.cells.unwrap_or_else(|| problem.default_cells());
    let t_end = a.common.t_end.unwrap_or(problem.t_end);

    let out = simulate(&problem, model.clone(), cells, t_end, cfg)?;
    let csv = output::profile_csv(&out, &model);
    let mut meta = vec![
        ("model".to_string(), kind.to_string()),
        ("n".to_string(), n.to_string()),
        ("quad_order".to_string(), quad_order(kind, n, &problem, &a.solver).to_string()),
        ("problem".to_string(), problem.kind.to_string()),
        ("cells".to_string(), cells.to_string()),
        ("t_end".to_string(), format!("{t_end:e}")),
        ("total_mass".to_string(), format!("{:.16e}", out.field.total_mass(&model, out.grid.dz()))),
    ];
    meta.extend(out.diagnostics.to_key_values());
    let diag_text = output::key_values(&meta);
    match &a.output {
        Some(path) => {
            std::fs::write(path, csv)?;
            let dpath = a.diagnostics.clone().unwrap_or_else(|| {
                let mut p = path.clone().into_os_string();
                p.push(".diagnostics");
                PathBuf::from(p)
            });
            std::fs::write(dpath, diag_text)?;
        }
        None => {
            print!("{csv}");
            match &a.diagnostics {
                Some(d) => std::fs::write(d, diag_text)?,
                None => eprint!("{diag_text}"),
            }
        }
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|e| Failure::Config(format!("bad {what} '{x}': {e}")))
        })
        .collect()
}

fn timed_run(
    problem: &ProblemSpec,
    model: &Model,
    cells: usize,
    t_end: f64,
    cfg: &SolverConfig,
    repeats: usize,
) -> Result<(RunOutput, f64), Failure> {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let out = simulate(problem, model.clone(), cells, t_end, cfg.clone())?;
        best = best.min(start.elapsed().as_secs_f64());
        last = Some(out);
    }
    Ok((last.expect("at least one run"), best))
}

fn convergence(mut a: ConvergenceArgs) -> Result<(), Failure> {
    let mut file = load_file(&a.common)?;
    merge_common(&mut a.common, &mut file).map_err(config_err)?;
    merge_solver(&mut a.solver, &mut file).map_err(config_err)?;
    merge(&mut a.models, &mut file, "models").map_err(config_err)?;
    merge(&mut a.n_list, &mut file, "n-list").map_err(config_err)?;
    merge(&mut a.reference, &mut file, "reference").map_err(config_err)?;
    merge(&mut a.ordinates, &mut file, "ordinates").map_err(config_err)?;
    merge(&mut a.refinement, &mut file, "refinement").map_err(config_err)?;
    merge(&mut a.timing, &mut file, "timing").map_err(config_err)?;
    merge(&mut a.output, &mut file, "output").map_err(config_err)?;
    file.finish().map_err(config_err)?;

    let problem = problem_of(&a.common)?;
    let models: Vec<ModelKind> = parse_list(a.models.as_deref().unwrap_or("hfmn"), "model")?;
    let ns: Vec<usize> = parse_list(a.n_list.as_deref().unwrap_or("2,4,8"), "moment count")?;
    let cfg = solver_config(&a.common, &a.solver)?;
    let cells = a.common.cells.unwrap_or_else(|| problem.default_cells());
    let t_end = a.common.t_end.unwrap_or(problem.t_end);
    let m = a.ordinates.unwrap_or(DEFAULT_ORDINATES);
    let ref_cells = cells * a.refinement.unwrap_or(DEFAULT_REFINEMENT);
    let second_order = cfg.second_order;

    let reference = with_threads(cfg.threads, || -> Result<Vec<f64>, Failure> {
        Ok(match a.reference.as_deref() {
            None | Some("compute") => {
                let grid = problem.grid(ref_cells)?;
                let ords = OrdinateSet::gauss_legendre(m)?;
                reference_sn::solve_sn(&problem, &grid, &ords, t_end, second_order)?.rho
            }
            Some(dir) => ReferenceCache::new(dir)
                .load_or_compute(&problem, m, ref_cells, t_end, second_order)?
                .rho,
        })
    })??;

    let repeats = if a.timing.unwrap_or(false) { 3 } else { 1 };
    let length = problem.z_right - problem.z_left;
    let mut rows = Vec::new();
    for &kind in &models {
        for &n in &ns {
            let model = build_model(kind, n, &problem, &a.solver)?;
            let (out, wall) = timed_run(&problem, &model, cells, t_end, &cfg, repeats)?;
            let (l1, linf) = error_norms(&out.densities, &reference, length)?;
            rows.push(output::ConvergenceRow {
                model: kind,
                n,
                cells,
                l1,
                linf,
                wall_time: wall,
            });
        }
    }
    let table = output::convergence_csv(&rows);
    match &a.output {
        Some(p) => std::fs::write(p, table)?,
        None => print!("{table}"),
    }
    Ok(())
}

fn reference(mut a: ReferenceArgs) -> Result<(), Failure> {
    let mut file = load_file(&a.common)?;
    merge_common(&mut a.common, &mut file).map_err(config_err)?;
    merge(&mut a.ordinates, &mut file, "ordinates").map_err(config_err)?;
    merge(&mut a.output, &mut file, "output").map_err(config_err)?;
    file.finish().map_err(config_err)?;

    let problem = problem_of(&a.common)?;
    let cells = a
        .common
        .cells
        .unwrap_or_else(|| problem.default_cells() * DEFAULT_REFINEMENT);
    let t_end = a.common.t_end.unwrap_or(problem.t_end);
    let second_order = !a.common.first_order.unwrap_or(false);
    let grid = problem.grid(cells)?;
    let ords = OrdinateSet::gauss_legendre(a.ordinates.unwrap_or(DEFAULT_ORDINATES))?;
    let profile = with_threads(a.common.threads, || {
        reference_sn::solve_sn(&problem, &grid, &ords, t_end, second_order)
    })??;
    let csv = output::reference_csv(&profile);
    match &a.output {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(f()),
        Some(t) => Ok(thread_pool(t)?.install(f)),
    }
}
