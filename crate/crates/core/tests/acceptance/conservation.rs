use slabmom_core::problems::plane_source;
use slabmom_core::{simulate, ModelKind, SolverConfig};

use crate::common::{ensure, model};

pub fn run() -> Result<String, String> {
    let p = plane_source();
    let grid = p.grid(300).unwrap();
    let m0 = p.initial_density(&grid).iter().sum::<f64>() * grid.dz();
    let mut parts = Vec::new();
    for kind in [ModelKind::Hfmn, ModelKind::Pmmn, ModelKind::Mn] {
        let out = simulate(&p, model(&p, kind, 4), 300, 0.5, SolverConfig::default())
            .map_err(|e| format!("{kind}: {e}"))?;
        let m1 = out.densities.iter().sum::<f64>() * grid.dz();
        let drift = (m1 - m0).abs() / m0;
        ensure(drift <= 1e-10, || format!("{kind}: relative mass drift {drift:.2e}"))?;
        parts.push(format!("{kind} {drift:.1e}"));
    }
    Ok(format!("relative mass drift at t = 0.5: {}", parts.join(", ")))
}
