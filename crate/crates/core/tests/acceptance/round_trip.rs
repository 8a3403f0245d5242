use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slabmom_core::entropy::{ansatz_moments, solve};
use slabmom_core::{BasisSpec, NewtonConfig};

use crate::common::{diff_norm, ensure};

struct Family {
    name: &'static str,
    build: fn(usize) -> BasisSpec,
    sizes: std::ops::RangeInclusive<usize>,
}

pub fn run() -> Result<String, String> {
    let families = [
        Family {
            name: "MN",
            build: |n| BasisSpec::full_legendre(n - 1, 2 * (n - 1) + 40).unwrap(),
            sizes: 2..=6,
        },
        Family {
            name: "HFMN",
            build: |n| BasisSpec::hat_uniform(n, 15).unwrap(),
            sizes: 2..=20,
        },
        Family {
            name: "PMMN",
            build: |n| BasisSpec::partial_uniform(n, 15).unwrap(),
            sizes: 2..=20,
        },
    ];
    let cfg = NewtonConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut summary = Vec::new();
    for fam in &families {
        let specs: Vec<BasisSpec> = fam
            .sizes
            .clone()
            .filter(|n| fam.name != "PMMN" || n % 2 == 0)
            .map(fam.build)
            .collect();
        let mut worst_res: f64 = 0.0;
        let mut worst_rho: f64 = 0.0;
        for k in 0..500 {
            let spec = &specs[k % specs.len()];
            let alpha: Vec<f64> = (0..spec.n()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let u = ansatz_moments(spec, &alpha).map_err(|e| e.to_string())?;
            let rho = spec.density(&u);
            let rep = solve(spec, &u, &cfg, None).map_err(|e| format!("{} n={}: {e}", fam.name, spec.n()))?;
            ensure(rep.regularization_r == 0.0, || {
                format!("{} n={}: regularized with r={}", fam.name, spec.n(), rep.regularization_r)
            })?;
            let back = ansatz_moments(spec, &rep.alpha).map_err(|e| e.to_string())?;
            let res = diff_norm(&back, &u) / rho;
            let drho = (spec.density(&back) - rho).abs() / rho;
            worst_res = worst_res.max(res);
            worst_rho = worst_rho.max(drho);
            ensure(res <= cfg.tau, || format!("{} n={}: relative residual {res:.2e}", fam.name, spec.n()))?;
            ensure(drho <= 1e-12, || format!("{} n={}: density error {drho:.2e}", fam.name, spec.n()))?;
        }
        summary.push(format!("{} residual {worst_res:.1e}, density {worst_rho:.1e}", fam.name));
    }
    Ok(format!("3 x 500 draws; {}", summary.join("; ")))
}
