//! CSV and key-value serialization. Floats use 17 significant digits, so
//! every value reads back to the same `f64`.

use std::fmt::Write;

use slabmom_core::{Model, ModelKind, ReferenceProfile, RunOutput};

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| float(*x)).collect::<Vec<_>>().join(",")
}

/// `z,rho,u0,..,u{n-1}` with one row per cell.
pub fn profile_csv(out: &RunOutput, model: &Model) -> String {
    let n = model.n();
    let mut s = String::from("z,rho");
    for i in 0..n {
        let _ = write!(s, ",u{i}");
    }
    s.push('\n');
    for (j, u) in out.field.means.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{}",
            float(out.grid.center(j)),
            float(out.densities[j]),
            join_floats(u)
        );
    }
    s
}

pub fn reference_csv(profile: &ReferenceProfile) -> String {
    let mut s = String::from("z,rho\n");
    for (j, r) in profile.rho.iter().enumerate() {
        let _ = writeln!(s, "{},{}", float(profile.grid.center(j)), float(*r));
    }
    s
}

pub fn key_values(kv: &[(String, String)]) -> String {
    kv.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

pub struct ConvergenceRow {
    pub model: ModelKind,
    pub n: usize,
    pub cells: usize,
    pub l1: f64,
    pub linf: f64,
    pub wall_time: f64,
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("model,n,cells,l1,linf,wall_time_s\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:.6}",
            r.model,
            r.n,
            r.cells,
            float(r.l1),
            float(r.linf),
            r.wall_time
        );
    }
    s
}
