use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slabmom_core::realizability::{
    is_realizable, limit_full_lp, limit_hat, limit_partial_blocks, lp_feasible, HalfSpaceSet,
};
use slabmom_core::{BasisSpec, LimiterConfig};

use crate::common::{ensure, random_moments};

const PAIRS: usize = 10_000;

fn blend(u: &[f64], m: &[f64], theta: f64) -> Vec<f64> {
    u.iter().zip(m).map(|(a, b)| (1.0 - theta) * a + theta * b).collect()
}

fn pair<R: Rng>(spec: &BasisSpec, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let spread = rng.random_range(0.0..20.0);
    let mean = random_moments(spec, rng, spread);
    let size = rng.random_range(0.0..3.0);
    let avg = mean.iter().map(|v| v.abs()).sum::<f64>() / mean.len() as f64;
    let recon = mean.iter().map(|v| v + size * avg * rng.random_range(-1.0..1.0)).collect();
    (recon, mean)
}

fn scale(v: &[f64]) -> f64 {
    v.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

fn slab_ok(v: &[f64], lo: f64, hi: f64, margin: f64) -> bool {
    v[0] >= margin
        && lo * v[0] + margin * (lo * lo + 1.0).sqrt() <= v[1]
        && v[1] <= hi * v[0] - margin * (hi * hi + 1.0).sqrt()
}

fn hat(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let cfg = LimiterConfig::default();
    let specs: Vec<BasisSpec> = (2..=10).map(|n| BasisSpec::hat_uniform(n, 15).unwrap()).collect();
    let mut active = 0;
    for k in 0..PAIRS {
        let spec = &specs[k % specs.len()];
        let (u, m) = pair(spec, rng);
        let theta = limit_hat(&u, &m, &cfg);
        let v = blend(&u, &m, theta);
        let slack = 1e-14 * scale(&u);
        ensure(v.iter().all(|&x| x >= cfg.eps_r - slack), || format!("hat pair {k}: limited vector {v:?}"))?;
        if theta > 1e-6 {
            active += 1;
            let w = blend(&u, &m, theta - 1e-6);
            ensure(w.iter().any(|&x| x < cfg.eps_r), || format!("hat pair {k}: theta {theta} not minimal"))?;
        }
    }
    Ok(active)
}

fn partial(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let cfg = LimiterConfig::default();
    let specs: Vec<BasisSpec> = (1..=6).map(|k| BasisSpec::partial_uniform(2 * k, 15).unwrap()).collect();
    let mut active = 0;
    for k in 0..PAIRS {
        let spec = &specs[k % specs.len()];
        let (u, m) = pair(spec, rng);
        let thetas = limit_partial_blocks(&u, &m, spec, &cfg);
        let slack = 1e-14 * scale(&u);
        let mut limited = Vec::with_capacity(spec.n());
        for (j, &theta) in thetas.iter().enumerate() {
            let (lo, hi) = spec.partial_interval(j);
            let r = 2 * j..2 * j + 2;
            let v = blend(&u[r.clone()], &m[r.clone()], theta);
            ensure(slab_ok(&v, lo, hi, cfg.eps_r - slack), || format!("partial pair {k} block {j}: {v:?}"))?;
            if theta > 1e-6 {
                active += 1;
                let w = blend(&u[r.clone()], &m[r], theta - 1e-6);
                ensure(!slab_ok(&w, lo, hi, cfg.eps_r), || format!("partial pair {k} block {j}: theta {theta} not minimal"))?;
            }
            limited.extend(v);
        }
        ensure(is_realizable(spec, &limited, cfg.eps_r - 2.0 * slack), || format!("partial pair {k}: not realizable"))?;
    }
    Ok(active)
}

/// Smallest theta in [0, 1] with a feasible blend, by bisection on the LP feasibility test.
fn bisection(spec: &BasisSpec, u: &[f64], m: &[f64]) -> f64 {
    if lp_feasible(spec, u) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if lp_feasible(spec, &blend(u, m, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn lp(rng: &mut ChaCha8Rng) -> Result<(usize, f64), String> {
    let cfg = LimiterConfig::default();
    let specs: Vec<BasisSpec> = (1..=4).map(|n| BasisSpec::full_legendre(n, 15).unwrap()).collect();
    let mut active = 0;
    let mut worst: f64 = 0.0;
    for k in 0..PAIRS {
        let spec = &specs[k % specs.len()];
        let (u, m) = pair(spec, rng);
        let theta = limit_full_lp(&u, &m, spec, &cfg).map_err(|e| e.to_string())?;
        ensure(lp_feasible(spec, &blend(&u, &m, theta)), || format!("LP pair {k}: limited vector infeasible"))?;
        let oracle = bisection(spec, &u, &m);
        let raw = (theta - cfg.eps_tilde).max(0.0);
        worst = worst.max((raw - oracle).abs());
        ensure((raw - oracle).abs() <= 1e-6, || format!("LP pair {k}: theta {raw} vs bisection {oracle}"))?;
        if theta > 1e-6 {
            active += 1;
        }
    }
    Ok((active, worst))
}

fn half_space(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let cfg = LimiterConfig { eps_r: 0.0, eps_tilde: 0.0 };
    let specs: Vec<(BasisSpec, HalfSpaceSet)> = (1..=2)
        .map(|n| {
            let s = BasisSpec::full_legendre(n, 15).unwrap();
            let h = HalfSpaceSet::build(&s).unwrap();
            (s, h)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for k in 0..PAIRS {
        let (spec, set) = &specs[k % specs.len()];
        let (u, m) = pair(spec, rng);
        let a = set.limit(&u, &m, &cfg);
        let b = limit_full_lp(&u, &m, spec, &cfg).map_err(|e| e.to_string())?;
        worst = worst.max((a - b).abs());
        ensure((a - b).abs() <= 1e-8, || format!("half-space pair {k}: {a} vs LP {b}"))?;
    }
    Ok(worst)
}

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let h = hat(&mut rng)?;
    let p = partial(&mut rng)?;
    let (l, lw) = lp(&mut rng)?;
    let hw = half_space(&mut rng)?;
    Ok(format!(
        "10^4 pairs each; active: hat {h}, partial blocks {p}, LP {l}; LP vs bisection {lw:.1e}; half-space vs LP {hw:.1e}"
    ))
}
