use parabolic_cylinder::rotation::BrjunoVerdict;
use parabolic_cylinder::RotationNumber;

#[test]
fn quarter_turn_first_partial_sum() {
    let s = RotationNumber::new(0.25).unwrap().brjuno_partial_sum(1).unwrap();
    assert!((s + 0.25 * 2f64.ln()).abs() < 1e-15);
}

#[test]
fn golden_tail_decays_geometrically() {
    let r = RotationNumber::golden_mean().brjuno_report(12).unwrap();
    assert!(r.partial_sums.iter().all(|s| s.is_finite()));
    let tail = &r.increments[6..];
    assert!(tail.windows(2).all(|w| w[1] < 0.75 * w[0]), "{tail:?}");
    assert_eq!(r.verdict, BrjunoVerdict::LikelyConvergent);
}

#[test]
fn liouville_sum_dominates_golden() {
    let g = RotationNumber::golden_mean().brjuno_partial_sum(12).unwrap();
    let l = RotationNumber::liouville_like().brjuno_partial_sum(12).unwrap();
    assert!(l > 10.0 * g);
    let r = RotationNumber::liouville_like().brjuno_report(12).unwrap();
    assert_eq!(r.verdict, BrjunoVerdict::LikelyDivergent);
}

#[test]
fn rational_third_is_divergent() {
    let r = RotationNumber::from_ratio(1, 3).unwrap().brjuno_report(6).unwrap();
    assert_eq!(r.verdict, BrjunoVerdict::DivergentRational);
    assert_eq!(r.omegas[1], 0.0);
}

#[test]
fn lambda_has_unit_modulus() {
    for phi in [0.1, 0.25, 0.5, 0.618_033_988_749_895, 0.999] {
        let l = RotationNumber::new(phi).unwrap().lambda();
        assert!((l.norm() - 1.0).abs() <= 4.0 * f64::EPSILON);
    }
}
