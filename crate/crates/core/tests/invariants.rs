use cstar_triple::ball_geometry::{
    bergmann, bergmann_factored, bergmann_sqrt, transvect_inverse_check, BallPoint, Transvection,
};
use cstar_triple::extremal::classify;
use cstar_triple::hilbert_module::{
    cauchy_schwarz_residual, inner, module_norm, ModuleElement, ModuleSpace,
};
use cstar_triple::jb_triple::TripleSystem;
use cstar_triple::sampling::{generator, random_full_partial_isometry};
use cstar_triple::{c64, ToleranceConfig, C64};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![
        Just((1, 1)),
        Just((2, 2)),
        Just((3, 2)),
        Just((2, 3)),
        Just((4, 1))
    ]
}

fn entries(len: usize) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| c64(a, b)).collect())
}

/// A pair of elements of the same `m×n` space.
fn pair() -> impl Strategy<Value = (ModuleElement, ModuleElement)> {
    dims().prop_flat_map(|(m, n)| {
        (entries(m * n), entries(m * n)).prop_map(move |(a, b)| {
            (
                ModuleElement::from_rows(m, n, &a).unwrap(),
                ModuleElement::from_rows(m, n, &b).unwrap(),
            )
        })
    })
}

/// Rescales onto the sphere of radius `r`.
fn with_norm(x: &ModuleElement, r: f64) -> ModuleElement {
    let n = module_norm(x);
    if n == 0.0 {
        x.clone()
    } else {
        x.scale(c64(r / n, 0.0))
    }
}

fn sys(x: &ModuleElement) -> TripleSystem {
    TripleSystem::new(x.space(), ToleranceConfig::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inner_product_is_hermitian((x, y) in pair()) {
        let a = inner(&x, &y).unwrap().into_matrix();
        let b = inner(&y, &x).unwrap().into_matrix();
        prop_assert!((a - b.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn cauchy_schwarz_holds((x, y) in pair()) {
        prop_assert!(cauchy_schwarz_residual(&x, &y).unwrap() >= -1e-10);
    }

    #[test]
    fn bergmann_forms_agree((c, _x) in pair(), r in 0.0f64..0.95) {
        let c = with_norm(&c, r);
        let s = sys(&c);
        let d = bergmann(&s, &c).unwrap().rep_distance(&bergmann_factored(&c).unwrap());
        prop_assert!(d <= 1e-12 * (1.0 + r * r).powi(2));
        let root = bergmann_sqrt(&s, &c).unwrap();
        prop_assert!(root.compose(&root).unwrap().rep_distance(&bergmann(&s, &c).unwrap()) <= 1e-10);
    }

    #[test]
    fn transvections_preserve_and_invert((c, x) in pair(), rc in 0.0f64..0.95, rx in 0.0f64..0.95) {
        let tol = ToleranceConfig::default();
        let c = BallPoint::new(with_norm(&c, rc), &tol).unwrap();
        let x = BallPoint::new(with_norm(&x, rx), &tol).unwrap();
        let s = sys(c.element());
        let image = Transvection::new(&s, c.clone()).unwrap().apply_raw(&x).unwrap();
        prop_assert!(module_norm(&image) < 1.0);
        prop_assert!(transvect_inverse_check(&s, &c, &x).unwrap() <= 1e-8);
    }

    #[test]
    fn full_partial_isometries_are_extreme((m, n) in dims(), seed in any::<u64>()) {
        let space = ModuleSpace::new(m, n).unwrap();
        let c = random_full_partial_isometry(&mut generator(seed), space);
        let k = classify(&TripleSystem::new(space, ToleranceConfig::default()), &c).unwrap();
        prop_assert!(k.is_extreme && k.is_tripotent && k.in_some_family());
        prop_assert!(k.bergmann_norm <= 1e-10);
    }

    #[test]
    fn interior_points_are_not_extreme((c, _x) in pair(), r in 0.0f64..0.99) {
        let c = with_norm(&c, r);
        let k = classify(&sys(&c), &c).unwrap();
        prop_assert!(!k.is_extreme);
    }
}
