use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slabmom_core::source::advance_source;
use slabmom_core::{BasisSpec, MaterialState};

use crate::common::{ensure, random_moments};

/// `sigma_s rho(u) <b>/2 - sigma_t u + q` with `<b>` summed from the nodes.
fn rhs(spec: &BasisSpec, iso: &[f64], ss: f64, st: f64, q: &[f64], u: &[f64], out: &mut [f64]) {
    let rho = spec.density(u);
    for i in 0..u.len() {
        out[i] = ss * 0.5 * rho * iso[i] - st * u[i] + q[i];
    }
}

/// Classical RK4 with `sigma_t h <= 2e-3` and at least 400 steps.
fn rk4(spec: &BasisSpec, ss: f64, sa: f64, q: &[f64], u0: &[f64], t: f64) -> Vec<f64> {
    let n = u0.len();
    let mut iso = vec![0.0; n];
    for (k, node) in spec.nodes().iter().enumerate() {
        for (a, v) in spec.node_values(k).iter().enumerate() {
            iso[node.start + a] += node.weight * v;
        }
    }
    let st = ss + sa;
    let steps = ((st * t / 2e-3).ceil() as usize).max(400);
    let h = t / steps as f64;
    let mut u = u0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for _ in 0..steps {
        rhs(spec, &iso, ss, st, q, &u, &mut k1);
        tmp.iter_mut().enumerate().for_each(|(i, x)| *x = u[i] + 0.5 * h * k1[i]);
        rhs(spec, &iso, ss, st, q, &tmp, &mut k2);
        tmp.iter_mut().enumerate().for_each(|(i, x)| *x = u[i] + 0.5 * h * k2[i]);
        rhs(spec, &iso, ss, st, q, &tmp, &mut k3);
        tmp.iter_mut().enumerate().for_each(|(i, x)| *x = u[i] + h * k3[i]);
        rhs(spec, &iso, ss, st, q, &tmp, &mut k4);
        for i in 0..n {
            u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    u
}

/// Cross section drawn log-uniformly, with exact zeros and tiny values mixed in.
fn sigma<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..10) {
        0 => 0.0,
        1 => 10f64.powf(rng.random_range(-14.0..-8.0)),
        _ => 10f64.powf(rng.random_range(-3.0..1.7)),
    }
}

pub fn run() -> Result<String, String> {
    let specs = [
        BasisSpec::full_legendre(4, 15).unwrap(),
        BasisSpec::hat_uniform(6, 15).unwrap(),
        BasisSpec::partial_uniform(8, 15).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst: f64 = 0.0;
    for draw in 0..1000 {
        let spec = &specs[draw % specs.len()];
        let (ss, sa) = (sigma(&mut rng), sigma(&mut rng));
        let t = rng.random_range(0.0..2.0);
        let u0 = random_moments(spec, &mut rng, 8.0);
        let q: Vec<f64> = if rng.random_bool(0.3) {
            vec![0.0; spec.n()]
        } else {
            random_moments(spec, &mut rng, 4.0)
        };
        let m = MaterialState::new(ss, sa, q.clone()).unwrap();
        let got = advance_source(spec, &m, &u0, t).map_err(|e| e.to_string())?;
        let want = rk4(spec, ss, sa, &q, &u0, t);
        let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = got.iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale;
        worst = worst.max(err);
        ensure(err <= 1e-10, || {
            format!("draw {draw}: relative error {err:.2e} (sigma_s={ss:e}, sigma_a={sa:e}, t={t})")
        })?;
    }
    Ok(format!("1000 draws, worst relative error {worst:.2e} <= 1e-10"))
}
