use std::collections::HashMap;

use slabmom_core::problems::{plane_source, source_beam};
use slabmom_core::{ModelKind, ProblemSpec, SolverConfig};

use crate::common::{l1_error, model};

const CELLS: usize = 300;
const SIZES: [usize; 3] = [2, 4, 8];

fn errors(p: &ProblemSpec) -> HashMap<(ModelKind, usize), f64> {
    let mut out = HashMap::new();
    for kind in ModelKind::ALL {
        for n in SIZES {
            let e = l1_error(p, model(p, kind, n), CELLS, SolverConfig::default());
            out.insert((kind, n), e);
        }
    }
    out
}

pub fn run() -> Result<String, String> {
    let plane = errors(&plane_source());
    let beam = errors(&source_beam());
    let mut failures = Vec::new();

    for kind in ModelKind::ALL {
        let e: Vec<f64> = SIZES.iter().map(|n| plane[&(kind, *n)]).collect();
        if !e.windows(2).all(|w| w[1] < w[0]) {
            failures.push(format!("(a) {kind} not monotone: {e:?}"));
        }
        for n in SIZES {
            if beam[&(kind, n)] >= plane[&(kind, n)] {
                failures.push(format!(
                    "(b) {kind} n={n}: beam {:.3e} >= plane {:.3e}",
                    beam[&(kind, n)],
                    plane[&(kind, n)]
                ));
            }
        }
    }
    for kind in ModelKind::ALL.into_iter().filter(|k| k.is_entropy()) {
        let lin = kind.counterpart();
        for n in SIZES {
            if plane[&(kind, n)] >= plane[&(lin, n)] {
                failures.push(format!(
                    "(c) n={n}: {kind} {:.3e} >= {lin} {:.3e}",
                    plane[&(kind, n)],
                    plane[&(lin, n)]
                ));
            }
        }
    }

    let table: Vec<String> = ModelKind::ALL
        .iter()
        .map(|k| {
            let row: Vec<String> = SIZES
                .iter()
                .map(|n| format!("{:.2e}/{:.2e}", plane[&(*k, *n)], beam[&(*k, *n)]))
                .collect();
            format!("{k} {}", row.join(" "))
        })
        .collect();
    eprintln!("plane-source/source-beam L1 errors for n = 2, 4, 8:\n  {}", table.join("\n  "));
    if failures.is_empty() {
        Ok("(a) monotone in n, (b) beam < plane, (c) entropy < linear for all 6 models and n in {2, 4, 8}".into())
    } else {
        Err(failures.join("; "))
    }
}
