use slabmom_core::problems::plane_source;
use slabmom_core::{simulate, ModelKind, ProblemSpec, SolverConfig};

use crate::common::{ensure, model};

const CELLS: usize = 1000;
const T_END: f64 = 0.1;
const REPEATS: usize = 3;

/// Best-of-three serial wall time of a first-order run.
fn wall_time(p: &ProblemSpec, kind: ModelKind, n: usize) -> Result<f64, String> {
    let cfg = SolverConfig { second_order: false, threads: Some(1), ..SolverConfig::default() };
    let mut best = f64::INFINITY;
    for _ in 0..REPEATS {
        let out = simulate(p, model(p, kind, n), CELLS, T_END, cfg.clone()).map_err(|e| format!("{kind} n={n}: {e}"))?;
        best = best.min(out.diagnostics.wall_time);
    }
    Ok(best)
}

/// Least-squares slope of `log t` against `log n`.
fn slope(ns: &[usize], ts: &[f64]) -> f64 {
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let k = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / k, y.iter().sum::<f64>() / k);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn fit(p: &ProblemSpec, kind: ModelKind, ns: &[usize]) -> Result<(f64, String), String> {
    let ts: Vec<f64> = ns.iter().map(|&n| wall_time(p, kind, n)).collect::<Result<_, _>>()?;
    let table: Vec<String> = ns.iter().zip(&ts).map(|(n, t)| format!("{n}:{t:.2}s")).collect();
    Ok((slope(ns, &ts), table.join(" ")))
}

pub fn run() -> Result<String, String> {
    let p = plane_source();
    let (pm, pm_table) = fit(&p, ModelKind::Pmmn, &[4, 8, 16, 32, 64])?;
    let (mn, mn_table) = fit(&p, ModelKind::Mn, &[2, 3, 4, 5, 6, 7, 8])?;
    let summary = format!("PMMN exponent {pm:.2} [{pm_table}], MN exponent {mn:.2} [{mn_table}]");
    ensure(pm <= 1.3, || format!("PMMN exponent above 1.3: {summary}"))?;
    ensure(mn >= 1.7, || format!("MN exponent below 1.7: {summary}"))?;
    Ok(summary)
}
