use slabmom_core::problems::plane_source;
use slabmom_core::{simulate, Model, ModelKind, SolverConfig};

use crate::common::ensure;

pub fn run() -> Result<String, String> {
    let p = plane_source();
    // All three span {1, mu} and share the rule with breakpoints {-1, 0, 1}.
    let runs: Vec<(ModelKind, Vec<f64>)> = [ModelKind::Mn, ModelKind::Hfmn, ModelKind::Pmmn]
        .into_iter()
        .map(|kind| {
            let model = Model::new(kind, 2, 15).unwrap();
            let out = simulate(&p, model, 300, 1.0, SolverConfig::default())
                .map_err(|e| format!("{kind}: {e}"))?;
            Ok((kind, out.densities))
        })
        .collect::<Result<_, String>>()?;
    let mut parts = Vec::new();
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            let d = runs[i]
                .1
                .iter()
                .zip(&runs[j].1)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            ensure(d <= 1e-6, || format!("{} vs {}: Linf {d:.2e}", runs[i].0, runs[j].0))?;
            parts.push(format!("{}/{} {d:.1e}", runs[i].0, runs[j].0));
        }
    }
    Ok(format!("Linf differences {}", parts.join(", ")))
}
