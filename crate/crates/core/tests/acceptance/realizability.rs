use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slabmom_core::realizability::is_realizable;
use slabmom_core::scheme::cfl_dt;
use slabmom_core::{Grid1D, MaterialState, Model, ModelKind, Scheme, SolverConfig};

use crate::common::{ensure, random_moments};

fn scheme(model: Model, cells: usize, ghosts: Option<(Vec<f64>, Vec<f64>)>) -> Scheme {
    let grid = Grid1D::new(0.0, 1.0, cells).unwrap();
    let n = model.n();
    Scheme::from_parts(
        model,
        grid,
        SolverConfig::default(),
        vec![MaterialState::vacuum(n); cells],
        ghosts,
        1e-9,
        1e-8,
    )
    .unwrap()
}

pub fn run() -> Result<String, String> {
    let models = [
        Model::new(ModelKind::Hfmn, 6, 15).unwrap(),
        Model::new(ModelKind::Pmmn, 6, 15).unwrap(),
        Model::new(ModelKind::Mn, 4, 46).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let cells = 20;
    let mut limited = 0usize;
    for trial in 0..1000 {
        let model = models[trial % models.len()].clone();
        let spec = model.spec.clone();
        let periodic = rng.random_bool(0.5);
        let ghosts = (!periodic).then(|| {
            (random_moments(&spec, &mut rng, 10.0), random_moments(&spec, &mut rng, 10.0))
        });
        let s = scheme(model, cells, ghosts);
        let means: Vec<Vec<f64>> = (0..cells)
            .map(|_| {
                let spread = rng.random_range(0.0..30.0);
                random_moments(&spec, &mut rng, spread)
            })
            .collect();
        let mut field = s.field_from_means(means).map_err(|e| e.to_string())?;
        let dt = cfl_dt(s.grid.dz(), s.cfg.newton.eps_gamma, 0.99, 1);
        let mut diag = s.new_diagnostics();
        s.euler_step(&mut field, dt, 0.0, &mut diag)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        limited += diag.limiter_activations;
        for (j, u) in field.means.iter().enumerate() {
            ensure(is_realizable(&spec, u, 0.0), || {
                format!("trial {trial} ({:?}): cell {j} not realizable: {u:?}", s.model.kind)
            })?;
        }
    }

    // Isotropic cell between vacuum neighbours: at dt = 5 dz its outflow
    // exceeds its content.
    let model = Model::new(ModelKind::Hfmn, 4, 15).unwrap();
    let spec = model.spec.clone();
    let vac = spec.isotropic_moment(1e-8).unwrap();
    let s = scheme(model, 5, Some((vac.clone(), vac.clone())));
    let mut means = vec![vac; 5];
    means[2] = spec.isotropic_moment(1.0).unwrap();
    let mut field = s.field_from_means(means).map_err(|e| e.to_string())?;
    let mut diag = s.new_diagnostics();
    s.euler_step(&mut field, 5.0 * s.grid.dz(), 0.0, &mut diag)
        .map_err(|e| e.to_string())?;
    let broken = field.means.iter().filter(|u| !is_realizable(&spec, u, 0.0)).count();
    ensure(broken > 0, || "adversarial step at dt = 5 dz stayed realizable".into())?;
    Ok(format!(
        "1000 random fields realizable after one step ({limited} limiter activations); dt = 5 dz breaks {broken} cell(s)"
    ))
}
