mod common;

use metastable::module::{projective_module, stunted_module, ModulePresentation};
use metastable::resolution::{chart_of, resolve_minimal};
use metastable::{Error, Prime};
use proptest::prelude::*;

fn prime(three: bool) -> Prime {
    if three {
        Prime::THREE
    } else {
        Prime::TWO
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn stunted_resolutions_are_exact_and_minimal(
        three: bool, n in 1u32..40, k in 0u32..6, extra in 0i32..9, s_max in 1u32..5
    ) {
        let p = prime(three);
        let t_max = 2 * n as i32 + 1 + extra;
        let m = stunted_module(p, n, k, t_max).unwrap();
        let res = resolve_minimal(&m, t_max, s_max).unwrap();
        prop_assert_eq!(common::check_resolution(&res, &m), Ok(()));
        prop_assert_eq!(res.stages[0].generators.len(), common::indecomposable_count(p, n, k, t_max));
    }

    #[test]
    fn shifted_and_unsuspended_modules(three: bool, n in 1u32..20, k in 0u32..5, shift in -3i32..4, extra in 0i32..8) {
        let p = prime(three);
        let base: ModulePresentation = projective_module(p, n, k, 2 * (n + k) as i32).unwrap().shifted(shift);
        let t_max = 2 * n as i32 + shift + extra;
        let res = resolve_minimal(&base, t_max, 3).unwrap();
        prop_assert_eq!(common::check_resolution(&res, &base), Ok(()));
    }
}

#[test]
fn sphere_and_empty_module() {
    for p in [Prime::TWO, Prime::THREE] {
        let s = ModulePresentation::sphere(p);
        let res = resolve_minimal(&s, 10, 4).unwrap();
        common::check_resolution(&res, &s).unwrap();
        let e = ModulePresentation::empty(p);
        let res = resolve_minimal(&e, 10, 4).unwrap();
        assert!(res.is_empty());
    }
}

#[test]
fn bad_window_is_a_config_error() {
    let m = stunted_module(Prime::TWO, 2, 3, 13).unwrap();
    assert!(matches!(resolve_minimal(&m, 13, 0), Err(Error::Config(_))));
}

#[test]
fn thin_windows_cannot_confirm_towers() {
    let m = stunted_module(Prime::TWO, 2, 20, 13).unwrap();
    let res = resolve_minimal(&m, 13, 4).unwrap();
    assert!(matches!(chart_of(&res), Err(Error::WindowTooSmall(_))));
}
