use proptest::prelude::*;

use freewalk_core::bounds::{char_lower, closed_upper, dsh_upper, BoundStatus};
use freewalk_core::kernel::{
    cheb_u, cheb_v, encadrement_bounds, log_cheb_u, q_param, threshold_for_arguments,
};
use freewalk_core::oracle::exact_tv;
use freewalk_core::{AngleMixture, CentralState, GroupFamily, GroupKind, NumericContext, StepThreshold};

fn ctx() -> NumericContext {
    NumericContext::default().with_max_terms(1500).unwrap()
}

fn family() -> impl Strategy<Value = GroupFamily> {
    prop_oneof![
        (4u32..14).prop_map(|n| GroupFamily::free_orthogonal(n).unwrap()),
        (5u32..14).prop_map(|n| GroupFamily::free_symmetric(n).unwrap()),
        (3u32..6).prop_map(|n| GroupFamily::quantum_automorphism(n).unwrap()),
    ]
}

/// Pure state with its parameter kept away from the counit end.
fn pure_state() -> impl Strategy<Value = CentralState> {
    (family(), 0.0f64..0.9).prop_map(|(g, frac)| {
        let t = match g.kind() {
            GroupKind::FreeOrthogonal => (2.0 * frac - 0.9) * g.carrier(),
            _ => frac * g.carrier(),
        };
        CentralState::pure(g, t).unwrap()
    })
}

proptest! {
    #[test]
    fn closed_form_matches_recursion(n in 0usize..60, t in 2.05f64..30.0) {
        let rec = cheb_u(n, t);
        prop_assert!((log_cheb_u(n, t).unwrap() - rec.ln()).abs() < 1e-12 * (1.0 + rec.ln().abs()));
    }

    #[test]
    fn even_polynomials_are_u_at_root(n in 0usize..40, x in 0.0f64..30.0) {
        let v = cheb_v(n, x);
        let u = cheb_u(2 * n, x.sqrt());
        prop_assert!((v - u).abs() <= 1e-9 * (1.0 + u.abs()));
    }

    #[test]
    fn q_parametrises_t(t in 2.0f64..1e6) {
        let q = q_param(t).unwrap();
        prop_assert!(q > 0.0 && q <= 1.0);
        prop_assert!((q + 1.0 / q - t).abs() <= 1e-12 * t);
    }

    #[test]
    fn encadrement_brackets(n in 1usize..80, t in 2.01f64..40.0) {
        let e = encadrement_bounds(n, t).unwrap();
        let u = cheb_u(n, t);
        prop_assert!(e.lower <= u * (1.0 + 1e-12));
        prop_assert!(u <= e.upper * (1.0 + 1e-12));
    }

    #[test]
    fn threshold_is_minimal(s in 2.05f64..40.0, gap in 0.01f64..20.0) {
        let d = s + gap;
        let StepThreshold::Finite(k0) = threshold_for_arguments(s, d) else {
            return Err(TestCaseError::fail("finite expected"));
        };
        let (a, b) = ((0.5 * s).acosh(), (0.5 * d).acosh());
        // q(s)^k > q(d)^{k-1}  <=>  k (b - a) > b
        prop_assert!(k0 as f64 * (b - a) > b * (1.0 - 1e-12));
        prop_assert!(((k0 - 1) as f64) * (b - a) <= b * (1.0 + 1e-12));
    }

    #[test]
    fn convolution_powers_multiply(state in pure_state(), k in 1u32..6, n in 1usize..30) {
        let lhs = state.conv_eval(k, n);
        let rhs = state.eval_irrep(n).powi(k as i32);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn irreducible_values_are_bounded(state in pure_state(), n in 1usize..200) {
        prop_assert!(state.eval_irrep(n).abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn variance_is_non_negative(state in pure_state(), k in 1u32..8) {
        prop_assert!(state.mean_var_chi1(k).unwrap().variance >= 0.0);
    }

    #[test]
    fn mixture_weights_normalise(raw in prop::collection::vec((0.01f64..4.0, 0.1f64..5.0), 1..6)) {
        let text: String = raw.iter().map(|(t, w)| format!("{t} {w}\n")).collect();
        let m: AngleMixture = text.parse().unwrap();
        let total: f64 = m.atoms().iter().map(|a| a.weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(m.min_tau() <= m.mean_tau() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bounds_sandwich_exact_distance(state in pure_state(), extra in 0u32..8) {
        let ctx = ctx();
        let k0 = state.boundedness_threshold().finite().unwrap();
        let k = k0 + extra;
        let est = exact_tv(&state, k, &ctx).unwrap().estimate().unwrap();
        let slack = est.error_bar + 1e-12;
        prop_assert!(est.value >= -slack && est.value <= 1.0 + slack);
        let dsh = dsh_upper(&state, k, &ctx);
        prop_assert!(est.value <= dsh.value * (1.0 + 1e-12) + slack, "{} > dsh {}", est.value, dsh.value);
        let closed = closed_upper(&state, k);
        prop_assert!(est.value <= closed.value * (1.0 + 1e-12) + slack, "{} > {:?}", est.value, closed);
        let lower = char_lower(&state, k, &ctx);
        prop_assert!(lower.value <= est.value + slack, "{:?} > {}", lower, est.value);
    }

    #[test]
    fn divergent_below_threshold(state in pure_state()) {
        let ctx = ctx();
        let k0 = state.boundedness_threshold().finite().unwrap();
        for k in 1..k0.min(6) {
            prop_assert_eq!(dsh_upper(&state, k, &ctx).status, BoundStatus::Divergent);
            prop_assert!(exact_tv(&state, k, &ctx).unwrap().estimate().is_none());
        }
    }

    #[test]
    fn dsh_decreases_in_k(state in pure_state(), extra in 0u32..6) {
        let ctx = ctx();
        let k = state.boundedness_threshold().finite().unwrap() + extra;
        let a = dsh_upper(&state, k, &ctx).value;
        let b = dsh_upper(&state, k + 1, &ctx).value;
        prop_assert!(b <= a * (1.0 + 1e-9));
    }
}
