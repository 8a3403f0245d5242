use slabmom_core::reference_sn::cell_average;
use slabmom_core::{simulate, ModelKind, ProblemKind, ProblemSpec, SolverConfig};

use crate::common::{ensure, model};

const GRIDS: [usize; 3] = [80, 160, 320];

/// Observed order `log2(|rho_J - rho_2J| / |rho_2J - rho_4J|)` in L1.
fn observed_order(p: &ProblemSpec, kind: ModelKind, second_order: bool) -> Result<f64, String> {
    let cfg = SolverConfig { second_order, ..SolverConfig::default() };
    let profiles: Vec<Vec<f64>> = GRIDS
        .iter()
        .map(|&j| {
            simulate(p, model(p, kind, 4), j, p.t_end, cfg.clone())
                .map(|o| o.densities)
                .map_err(|e| format!("{kind} J={j}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    let len = p.z_right - p.z_left;
    let diff = |c: &[f64], f: &[f64]| {
        let avg = cell_average(f, c.len()).unwrap();
        c.iter().zip(&avg).map(|(a, b)| (a - b).abs()).sum::<f64>() * len / c.len() as f64
    };
    let e1 = diff(&profiles[0], &profiles[1]);
    let e2 = diff(&profiles[1], &profiles[2]);
    Ok((e1 / e2).log2())
}

pub fn run() -> Result<String, String> {
    let p = ProblemSpec::by_kind(ProblemKind::SmoothGaussian);
    let mut parts = Vec::new();
    for kind in [ModelKind::Hfpn, ModelKind::Hfmn] {
        let second = observed_order(&p, kind, true)?;
        let first = observed_order(&p, kind, false)?;
        parts.push(format!("{kind}: {second:.2} / {first:.2}"));
        ensure(second >= 1.8, || format!("{kind}: second-order scheme shows order {second:.3}; {}", parts.join(", ")))?;
        ensure((0.8..=1.2).contains(&first), || {
            format!("{kind}: first-order scheme shows order {first:.3}; {}", parts.join(", "))
        })?;
    }
    Ok(format!("observed L1 orders (reconstruction on / off) {}", parts.join(", ")))
}
