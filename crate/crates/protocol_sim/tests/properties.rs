use eat_rates::{ProtocolSpec, Variant};
use proptest::prelude::*;
use protocol_sim::{estimate_score_biased, simulate_trial, HonestDeviceModel};

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![
        Just(Variant::RecycledInput),
        (0.01f64..1.0).prop_map(|gamma| Variant::SpotCheck { gamma }),
        (0.05f64..0.5, 0.05f64..0.5).prop_map(|(zeta_a, zeta_b)| Variant::BiasedLocal { zeta_a, zeta_b }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conservation_and_determinism(
        v in variant(),
        w in prop::array::uniform4(0.0f64..=1.0),
        n in 1u64..2000,
        seed: u64,
        trial in 0u64..1000,
    ) {
        let d = HonestDeviceModel::new([[w[0], w[1]], [w[2], w[3]]]).unwrap();
        let p = ProtocolSpec::new(v, 0.8, 0.01, n).unwrap();
        let t = simulate_trial(&p, &d, seed, trial);
        prop_assert_eq!(t.total(), n);
        prop_assert_eq!(t.generation_outputs.iter().sum::<u64>(), t.untested);
        prop_assert_eq!(&t, &simulate_trial(&p, &d, seed, trial));
        if let Variant::BiasedLocal { zeta_a, zeta_b } = v {
            prop_assert_eq!(t.score_hat, estimate_score_biased(&t, zeta_a, zeta_b).unwrap());
            prop_assert_eq!(t.aborted, t.score_hat < 0.8 - 0.01);
        }
    }

    #[test]
    fn perfect_device_scores_one_without_losses(v in variant(), n in 1u64..500, seed: u64) {
        let d = HonestDeviceModel::uniform(1.0).unwrap();
        let t = simulate_trial(&ProtocolSpec::new(v, 0.8, 1e-6, n).unwrap(), &d, seed, 0);
        prop_assert_eq!(t.losses(), 0);
        // The biased estimator needs n large enough to concentrate, so a
        // perfect device can still abort there at small n.
        if !matches!(v, Variant::BiasedLocal { .. }) {
            prop_assert!(!t.aborted);
        }
    }
}
