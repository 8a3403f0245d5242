use slabmom_core::problems::{plane_source, source_beam};
use slabmom_core::reference_sn::cell_average;
use slabmom_core::{solve_sn, OrdinateSet, ReferenceCache};

#[test]
fn fine_plane_source_is_positive_and_conservative() {
    let p = plane_source();
    let grid = p.grid(4800).unwrap();
    let ord = OrdinateSet::gauss_legendre(256).unwrap();
    let prof = solve_sn(&p, &grid, &ord, 1.0, true).unwrap();
    assert!(prof.rho.iter().all(|&r| r >= 0.0));
    // The front has not reached the boundary: inflow and outflow are both
    // vacuum-level, so the mass stays at its initial value.
    let m0 = 1.0 + 2.4 * p.rho_vac;
    assert!((prof.total_mass() - m0).abs() <= 1e-10, "{:e}", prof.total_mass() - m0);
}

#[test]
fn refinement_differences_decrease() {
    let p = plane_source();
    let levels = [(16, 60), (32, 120), (64, 240), (128, 480)];
    let profiles: Vec<Vec<f64>> = levels
        .iter()
        .map(|&(m, j)| {
            let grid = p.grid(j).unwrap();
            solve_sn(&p, &grid, &OrdinateSet::gauss_legendre(m).unwrap(), 1.0, true)
                .unwrap()
                .rho
        })
        .collect();
    let l = p.z_right - p.z_left;
    let diffs: Vec<f64> = profiles
        .windows(2)
        .map(|w| {
            let coarse = &w[0];
            let fine = cell_average(&w[1], coarse.len()).unwrap();
            coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).sum::<f64>() * l / coarse.len() as f64
        })
        .collect();
    assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{diffs:?}");
}

#[test]
fn first_order_source_beam_is_positive() {
    let p = source_beam();
    let grid = p.grid(120).unwrap();
    let ord = OrdinateSet::gauss_legendre(32).unwrap();
    let prof = solve_sn(&p, &grid, &ord, p.t_end, false).unwrap();
    assert!(prof.rho.iter().all(|&r| r >= 0.0));
    assert!(prof.rho[0] > prof.rho[119]);
}

#[test]
fn cache_recomputes_on_changed_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cache = ReferenceCache::new(dir.path());
    let p = plane_source();
    let a = cache.load_or_compute(&p, 8, 48, 0.3, true).unwrap();
    let again = cache.load_or_compute(&p, 8, 48, 0.3, true).unwrap();
    assert_eq!(a, again);
    let other = cache.load_or_compute(&p, 8, 48, 0.4, true).unwrap();
    assert_ne!(a.rho, other.rho);
    assert_ne!(cache.path_for(&p, 8, 48, 0.3, true), cache.path_for(&p, 8, 48, 0.4, true));
    let files = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(files, 2);
}
