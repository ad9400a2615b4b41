use sigma_forge::convergence::fit_order;
use sigma_forge::exterior::{random_smooth_field, Signature, SpacetimeGrid};
use sigma_forge::lie::named_algebra;
use sigma_forge::parametrization::{
    current_from_strengths, field_strengths, matrix_bianchi_residual, noether_current_direct,
    ScalarField,
};

fn current_mismatch(name: &str, n: usize) -> f64 {
    let (sc, rep) = named_algebra::<f64>(name).unwrap();
    let grid = SpacetimeGrid::cubic(2, n, 1.0, Signature::Lorentzian).unwrap();
    let phi = ScalarField::new(random_smooth_field(&grid, 0, 3, 99, 3).unwrap()).unwrap();
    let direct = noether_current_direct(&phi, &rep).unwrap();
    let from_f = current_from_strengths(&field_strengths(&phi, &sc).unwrap(), &rep).unwrap();
    direct.try_sub(&from_f).unwrap().norm_linf()
}

#[test]
fn group_current_matches_field_strengths() {
    for name in ["su2", "so3", "sl2r", "heisenberg3"] {
        let ns = [32, 64, 128];
        let errs: Vec<f64> = ns.iter().map(|&n| current_mismatch(name, n)).collect();
        let hs: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
        let order = fit_order(&hs, &errs).unwrap();
        assert!(
            (1.8..=2.2).contains(&order),
            "{name}: {errs:?} order {order}"
        );
    }
}

#[test]
fn flatness_of_the_current_converges() {
    let (sc, rep) = named_algebra::<f64>("su2").unwrap();
    let defect = |n: usize| {
        let grid = SpacetimeGrid::cubic(2, n, 1.0, Signature::Lorentzian).unwrap();
        let phi = ScalarField::new(random_smooth_field(&grid, 0, 3, 5, 2).unwrap()).unwrap();
        let g = current_from_strengths(&field_strengths(&phi, &sc).unwrap(), &rep).unwrap();
        matrix_bianchi_residual(&g, rep.n_rep())
            .unwrap()
            .norm_linf()
    };
    let (e1, e2) = (defect(32), defect(64));
    assert!(((e1 / e2).log2() - 2.0).abs() < 0.2, "{e1} {e2}");
}
