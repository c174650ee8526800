use eat_rates::{
    completeness_error_with, delta_for_completeness, k_alpha_scaled, second_order_v, CompletenessModel, ErrorBudget,
    ProtocolSpec, Variant,
};
use proptest::prelude::*;

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![
        Just(Variant::RecycledInput),
        (1e-4f64..1.0).prop_map(|gamma| Variant::SpotCheck { gamma }),
        (0.01f64..0.5, 0.01f64..0.5).prop_map(|(zeta_a, zeta_b)| Variant::BiasedLocal { zeta_a, zeta_b }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn relative_entropy_never_looser(v in variant(), omega in 0.76f64..0.85, delta in 1e-4f64..0.05, log_n in 2.0f64..9.0) {
        let n = 10f64.powf(log_n) as u64;
        let p = ProtocolSpec::new(v, omega, delta, n).unwrap();
        let h = completeness_error_with(&p, CompletenessModel::Hoeffding);
        let k = completeness_error_with(&p, CompletenessModel::RelativeEntropy);
        prop_assert!(k <= h * (1.0 + 1e-12), "{k} > {h}");
    }

    #[test]
    fn delta_inversion_hits_target(v in variant(), omega in 0.76f64..0.85, log_eps in -12.0f64..-2.0, log_n in 4.0f64..10.0) {
        let n = 10f64.powf(log_n) as u64;
        let eps = 10f64.powf(log_eps);
        for model in [CompletenessModel::Hoeffding, CompletenessModel::RelativeEntropy] {
            let d = delta_for_completeness(&v, omega, n, eps, model);
            prop_assume!(d.is_finite());
            let p = ProtocolSpec::new(v, omega, d, n).unwrap();
            let e = completeness_error_with(&p, model);
            prop_assert!((e / eps - 1.0).abs() < 1e-6 || e <= eps, "{model:?}: {e} vs {eps}");
        }
    }

    #[test]
    fn soundness_composition(eh in 1e-15f64..0.1, ee in 1e-15f64..0.1, ex in 1e-15f64..0.1) {
        let b = ErrorBudget::new(eh, ee, ex, 1e-6).unwrap();
        prop_assert_eq!(b.eps_s(), ee.max(2.0 * eh + ex));
    }

    #[test]
    fn second_order_terms_monotone(var in 0.0f64..1e4, extra in 0.0f64..10.0, a in 1e-9f64..0.99, spread in 0.0f64..50.0) {
        prop_assert!(second_order_v(4.0, var + extra) >= second_order_v(4.0, var));
        prop_assert!(second_order_v(16.0, var) >= second_order_v(4.0, var));
        let k = k_alpha_scaled(4.0, 1.0 + a, spread);
        prop_assert!(k >= 0.0 && k.is_finite());
        prop_assert!(k_alpha_scaled(4.0, 1.0 + a, spread + 1.0) >= k);
    }
}
