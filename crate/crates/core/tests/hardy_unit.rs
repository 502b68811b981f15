use rearr_core::hardy::*;

#[test]
fn labels_round_trip() {
    for c in HardyCondition::ALL {
        assert_eq!(c.label().parse::<HardyCondition>().unwrap(), c);
    }
    assert!("4.7".parse::<HardyCondition>().is_err());
    assert_eq!(serde_json::to_string(&HardyCondition::RearrangedTail).unwrap(), "\"4.6\"");
}

#[test]
fn mismatched_exponents_are_rejected() {
    let hw = HardyWeights::new(Weight::constant(1.0), Weight::constant(1.0), HardyExponents::lebesgue(2.0, 2.0).unwrap(), 1.0)
        .unwrap();
    assert!(hardy_condition(HardyCondition::RearrangedTail, &hw, 3, 128).is_err());
    assert!(hardy_condition(HardyCondition::Average, &hw, 3, 10).is_err());
}

#[test]
fn tabulated_weight_integrals() {
    let w = Weight::Tabulated { ends: vec![0.5, 1.0], values: vec![2.0, 1.0] };
    assert!((w.integral_pow(0.0, 1.0, 1.0, 0.0, 1.0) - 1.5).abs() < 1e-15);
    assert!((w.kernel_integral(1.0, 1.0, 1.0) - (2.0 * (1.0 - 0.25) / 2.0 + 0.25 / 2.0)).abs() < 1e-15);
    assert_eq!(w.sup_pow(0.0, 0.7, 1.0, 1.0), 2.0);
}
