use proptest::prelude::*;
use sigma_forge::exterior::{
    double_star_sign, ext_d, hodge, random_smooth_field, wedge, FormField, IndexCombine, Signature,
    SpacetimeGrid,
};

fn grid(d: usize, n: usize, sig: Signature) -> SpacetimeGrid<f64> {
    SpacetimeGrid::cubic(d, n, 1.0, sig).unwrap()
}

fn sig_of(euclid: bool) -> Signature {
    if euclid {
        Signature::Euclidean
    } else {
        Signature::Lorentzian
    }
}

#[test]
fn double_star_sweep() {
    for d in 2..=4 {
        for sig in [Signature::Lorentzian, Signature::Euclidean] {
            let g = grid(d, 4, sig);
            for p in 0..=d {
                let a = random_smooth_field(&g, p, 2, 17 + p as u64, 3).unwrap();
                let back = hodge(&hodge(&a).unwrap()).unwrap();
                let sign = double_star_sign::<f64>(p, d, sig.s());
                let err = back.try_sub(&a.scale(sign)).unwrap().norm_linf();
                assert!(err < 1e-12, "D={d} p={p} {sig:?}: {err}");
            }
        }
    }
}

#[test]
fn star_of_one_is_volume_form() {
    for sig in [Signature::Lorentzian, Signature::Euclidean] {
        let g = grid(3, 4, sig);
        let one = FormField::from_fn(&g, 0, 1, |_, _, _| 1.0).unwrap();
        let vol = hodge(&one).unwrap();
        assert_eq!(vol.component(0, 0, &[0, 1, 2]), 1.0);
        assert_eq!(vol.component(0, 0, &[1, 0, 2]), -1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn d_squared_vanishes(d in 2usize..=4, p_raw in 0usize..3, seed in any::<u64>(), euclid in any::<bool>()) {
        let p = p_raw.min(d - 2);
        let g = grid(d, 5, sig_of(euclid));
        let a = random_smooth_field(&g, p, 2, seed, 3).unwrap();
        let dd = ext_d(&ext_d(&a).unwrap()).unwrap();
        prop_assert!(dd.norm_linf() <= 1e-13);
    }

    #[test]
    fn graded_commutativity(d in 2usize..=4, p in 0usize..3, q in 0usize..3, seed in any::<u64>()) {
        prop_assume!(p + q <= d);
        let g = grid(d, 4, Signature::Lorentzian);
        let a = random_smooth_field(&g, p, 1, seed, 2).unwrap();
        let b = random_smooth_field(&g, q, 1, seed ^ 0xabcdef, 2).unwrap();
        let ab = wedge(&a, &b, IndexCombine::Outer).unwrap();
        let ba = wedge(&b, &a, IndexCombine::Outer).unwrap();
        let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(ab.try_sub(&ba.scale(sign)).unwrap().norm_linf() < 1e-14);
    }

    #[test]
    fn wedge_is_associative(seed in any::<u64>()) {
        let g = grid(4, 4, Signature::Euclidean);
        let a = random_smooth_field(&g, 1, 1, seed, 2).unwrap();
        let b = random_smooth_field(&g, 1, 1, seed.wrapping_add(1), 2).unwrap();
        let c = random_smooth_field(&g, 2, 1, seed.wrapping_add(2), 2).unwrap();
        let left = wedge(&wedge(&a, &b, IndexCombine::Outer).unwrap(), &c, IndexCombine::Outer).unwrap();
        let right = wedge(&a, &wedge(&b, &c, IndexCombine::Outer).unwrap(), IndexCombine::Outer).unwrap();
        prop_assert!(left.try_sub(&right).unwrap().norm_linf() < 1e-14);
    }

    #[test]
    fn star_is_linear(seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let g = grid(3, 4, Signature::Lorentzian);
        let a = random_smooth_field(&g, 1, 2, seed, 2).unwrap();
        let b = random_smooth_field(&g, 1, 2, seed.wrapping_add(5), 2).unwrap();
        let lhs = hodge(&a.try_add(&b.scale(alpha)).unwrap()).unwrap();
        let rhs = hodge(&a).unwrap().try_add(&hodge(&b).unwrap().scale(alpha)).unwrap();
        prop_assert!(lhs.try_sub(&rhs).unwrap().norm_linf() < 1e-14);
    }
}

/// `d(a∧b) - da∧b - (-1)^p a∧db` is a discretisation error of second order.
#[test]
fn leibniz_rule_converges() {
    let defect = |n: usize| {
        let g = grid(3, n, Signature::Lorentzian);
        let a = random_smooth_field(&g, 1, 1, 4, 2).unwrap();
        let b = random_smooth_field(&g, 0, 1, 5, 2).unwrap();
        let lhs = ext_d(&wedge(&a, &b, IndexCombine::Outer).unwrap()).unwrap();
        let t1 = wedge(&ext_d(&a).unwrap(), &b, IndexCombine::Outer).unwrap();
        let t2 = wedge(&a, &ext_d(&b).unwrap(), IndexCombine::Outer).unwrap();
        lhs.try_sub(&t1).unwrap().try_add(&t2).unwrap().norm_linf()
    };
    let (e1, e2) = (defect(16), defect(32));
    let order = (e1 / e2).log2();
    assert!((1.8..=2.2).contains(&order), "{e1} {e2}");
}

#[test]
fn exterior_derivative_of_linear_phase() {
    // d sin(2π x¹) = 2π cos(2π x¹) dx¹ up to the stencil factor sin(2πh)/h
    let n = 16;
    let g = grid(2, n, Signature::Lorentzian);
    let tau = std::f64::consts::TAU;
    let f = FormField::from_fn(&g, 0, 1, |x, _, _| (tau * x[1]).sin()).unwrap();
    let df = ext_d(&f).unwrap();
    let h = 1.0 / n as f64;
    for pt in 0..g.n_points() {
        let x = g.position(pt)[1];
        let exact = (tau * h).sin() / h * (tau * x).cos();
        assert!((df.component(pt, 0, &[1]) - exact).abs() < 1e-12);
        assert_eq!(df.component(pt, 0, &[0]), 0.0);
    }
}
