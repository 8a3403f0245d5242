use slabmom_core::problems::plane_source;
use slabmom_core::{Model, ModelKind, SolverConfig};

use crate::common::{ensure, l1_error};

pub fn run() -> Result<String, String> {
    let p = plane_source();
    let err = |order: usize| {
        let model = Model::new(ModelKind::Hfmn, 8, order).map_err(|e| e.to_string())?;
        Ok::<f64, String>(l1_error(&p, model, 300, SolverConfig::default()))
    };
    let (e3, e11, e15) = (err(3)?, err(11)?, err(15)?);
    let (d11, d3) = ((e11 - e15).abs() / e15, (e3 - e15).abs() / e15);
    let summary = format!("L1 errors q3 {e3:.4e}, q11 {e11:.4e}, q15 {e15:.4e}; relative gaps {d11:.2e} / {d3:.2e}");
    ensure(d11 < 0.01, || format!("order 11 differs by >= 1%: {summary}"))?;
    ensure(d3 > 0.01, || format!("order 3 within 1%: {summary}"))?;
    Ok(summary)
}
