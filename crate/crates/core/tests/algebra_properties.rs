use proptest::prelude::*;
use sigma_forge::dualisation::{dual_constants, graded_jacobi_check, verify_intertwining};
use sigma_forge::lie::{adjoint_rep, check_ad_invariance, named_algebra, trace_form, TraceForm};
use sigma_forge::Mat64;

fn invertible(entries: &[f64]) -> Option<Mat64> {
    let p = Mat64::from_row_slice(3, 3, entries);
    (p.condition_number() < 50.0).then_some(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn change_of_basis_keeps_a_lie_algebra(
        name in prop::sample::select(vec!["su2", "so3", "sl2r", "heisenberg3"]),
        entries in prop::collection::vec(-2.0f64..2.0, 9),
    ) {
        let Some(p) = invertible(&entries) else { return Ok(()) };
        let (sc, _) = named_algebra::<f64>(name).unwrap();
        let changed = sc.change_basis(&p).unwrap();
        prop_assert!(changed.residuals().jacobi < 1e-10);
        prop_assert!(changed.residuals().antisymmetry < 1e-12);
        let rep = adjoint_rep(&changed);
        prop_assert!(rep.homomorphism_residual(&changed).0 < 1e-10);
    }

    #[test]
    fn dual_constants_intertwine_for_any_form(
        name in prop::sample::select(vec!["su2", "so3", "sl2r"]),
        diag in prop::collection::vec(0.3f64..3.0, 3),
        signs in prop::collection::vec(any::<bool>(), 3),
        d in 2usize..=5,
    ) {
        let (sc, _) = named_algebra::<f64>(name).unwrap();
        let values: Vec<f64> = diag.iter().zip(&signs).map(|(v, s)| if *s { *v } else { -*v }).collect();
        let t = TraceForm::from_matrix(&Mat64::diag(&values)).unwrap();
        let da = dual_constants(&sc, &t, d).unwrap();
        prop_assert!(verify_intertwining(&da) < 1e-12);
        prop_assert!(graded_jacobi_check(&da).max() < 1e-12);
    }
}

#[test]
fn killing_forms_are_ad_invariant() {
    for name in ["su2", "so3", "sl2r"] {
        let (sc, _) = named_algebra::<f64>(name).unwrap();
        let t = trace_form(&adjoint_rep(&sc)).unwrap();
        assert!(check_ad_invariance(&t, &sc) < 1e-14, "{name}");
        let da = dual_constants(&sc, &t, 4).unwrap();
        for n in 0..3 {
            // ad-invariance gives C_nᵀ T = -T C_n, hence D_n = C_n
            let diff = (da.d_matrix(n) - &sc.ad_matrix(n)).max_abs();
            assert!(diff < 1e-14, "{name}: {diff}");
        }
    }
}

#[test]
fn single_precision_pipeline() {
    let (sc, rep) = named_algebra::<f32>("su2").unwrap();
    let t = trace_form(&rep).unwrap();
    let da = dual_constants(&sc, &t, 3).unwrap();
    assert!(verify_intertwining(&da) < 1e-5);
    assert!(graded_jacobi_check(&da).max() < 1e-5);
}
