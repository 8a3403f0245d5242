#![allow(dead_code)]

use rand::Rng;
use slabmom_core::{BasisSpec, Model, ModelKind};

/// Moments of a random non-negative node distribution. `spread` controls how
/// far the weights vary in log scale; large values push the vector towards
/// the boundary of the realizable set.
pub fn random_moments<R: Rng>(spec: &BasisSpec, rng: &mut R, spread: f64) -> Vec<f64> {
    let mut u = vec![0.0; spec.n()];
    for (q, node) in spec.nodes().iter().enumerate() {
        let c = (spread * (rng.random::<f64>() - 0.5)).exp();
        for (a, v) in spec.node_values(q).iter().enumerate() {
            u[node.start + a] += node.weight * c * v;
        }
    }
    let rho = spec.density(&u);
    let scale = 10f64.powf(rng.random_range(-3.0..1.0)) / rho;
    u.iter_mut().for_each(|v| *v *= scale);
    u
}

pub fn entropy_models() -> Vec<Model> {
    vec![
        Model::new(ModelKind::Mn, 3, 40).unwrap(),
        Model::new(ModelKind::Mn, 6, 50).unwrap(),
        Model::new(ModelKind::Hfmn, 2, 15).unwrap(),
        Model::new(ModelKind::Hfmn, 7, 15).unwrap(),
        Model::new(ModelKind::Pmmn, 2, 15).unwrap(),
        Model::new(ModelKind::Pmmn, 8, 15).unwrap(),
    ]
}

pub fn linear_models() -> Vec<Model> {
    vec![
        Model::new(ModelKind::Pn, 4, 15).unwrap(),
        Model::new(ModelKind::Hfpn, 5, 15).unwrap(),
        Model::new(ModelKind::Pmpn, 6, 15).unwrap(),
    ]
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
