use num_complex::Complex64;
use parabolic_cylinder::analysis::{
    default_modulus, equidistribution, invariance_suite, limit_circle, rotation_freedom, stable_set_probe, verify_asymptotics,
    ProbeClass,
};
use parabolic_cylinder::coords::{CoordSettings, FatouCoordinates};
use std::f64::consts::TAU;
use parabolic_cylinder::{BasinParams, ChartPoint, Error, MapFamily, RotationNumber};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn model() -> MapFamily {
    MapFamily::model(RotationNumber::golden_mean())
}

fn params() -> BasinParams {
    BasinParams::new(1.0, 0.4, 0.3).unwrap()
}

#[test]
fn model_circle_radius_is_exact() {
    let fam = model();
    let fc = FatouCoordinates::for_family(&fam, params(), CoordSettings::default()).unwrap();
    let r = limit_circle(&fc, &ChartPoint::up(c(0.5, 0.0), c(0.1, 0.0)), 10_000, 0.5).unwrap();
    assert_eq!(r.radius_hat, 0.5);
    assert!((r.product - 1.0).abs() < 1e-6);
    assert!(r.discrepancy < 0.05);
}

#[test]
fn limit_circle_needs_a_long_orbit() {
    let fam = model();
    let fc = FatouCoordinates::for_family(&fam, params(), CoordSettings::default()).unwrap();
    let err = limit_circle(&fc, &ChartPoint::up(c(0.5, 0.0), c(0.1, 0.0)), 9_999, 0.5).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn ratio_tends_to_one() {
    let s = verify_asymptotics(&model(), &ChartPoint::up(c(0.5, 0.0), c(0.1, 0.0)), 20_000).unwrap();
    let s = s.summary;
    assert!(s.ratio_ok, "{s:?}");
    assert!(s.y_band.lo > 0.0 && s.x_band.lo > 0.0);
}

#[test]
fn far_points_escape_or_leave_the_chart() {
    let p = ChartPoint::down(c(5.0, 0.0), c(5.0, 0.0));
    let r = stable_set_probe(&model(), &params(), &p, 1000).unwrap();
    assert!(matches!(r.class, ProbeClass::Escaping { .. } | ProbeClass::ChartExit { .. }), "{r:?}");
    assert!(r.heuristic);
}

#[test]
fn near_points_enter_the_basin() {
    let p = ChartPoint::up(c(1.0, 0.0), c(0.05, 0.0));
    let r = stable_set_probe(&model(), &params(), &p, 1000).unwrap();
    assert!(matches!(r.class, ProbeClass::EntersBasin { .. }), "{r:?}");
}

#[test]
fn one_step_invariance_on_the_model() {
    let r = invariance_suite(&model(), &params(), 200, 5, 1000).unwrap();
    assert!(r.one_step_ok());
    assert!(r.max_norm >= r.max_norm_lower_bound);
}

#[test]
fn residues_differ_by_the_expected_rotation() {
    let fam = model();
    let m = default_modulus(&fam, 200);
    let r = rotation_freedom(&fam, &ChartPoint::up(c(0.5, 0.0), c(0.1, 0.0)), 20 * m, m, &[(0, 1)]).unwrap();
    assert!(r.max_error < 1e-6, "{r:?}");
}

#[test]
fn golden_double_angles_are_equidistributed() {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let angles: Vec<f64> = (0..10_000).map(|n| TAU * (2.0 * phi * n as f64).fract()).collect();
    assert!(equidistribution(&angles, 100).unwrap() < 0.01);
}

#[test]
fn grid_angles_meet_the_grid_bound() {
    let k = 1500;
    let angles: Vec<f64> = (0..k).map(|j| TAU * j as f64 / k as f64).collect();
    for bins in [7, 100, 333] {
        assert!(equidistribution(&angles, bins).unwrap() <= 1.0 / k as f64 + 1.0 / bins as f64);
    }
}

#[test]
fn oversized_radius_reports_witnesses() {
    // the model basin saturates at |u| < 1, so only the perturbed map can fail here
    let fam = parabolic_cylinder::config::RunConfig::default().perturbed().unwrap();
    let p = BasinParams::new(100.0 * 0.48, 0.4, 0.3).unwrap();
    let r = invariance_suite(&fam, &p, 1000, 2, 1000).unwrap();
    assert!(!r.one_step_ok());
    assert!(!r.one_step_witnesses.is_empty());
}

#[test]
fn basin_points_enter_at_once() {
    let p = parabolic_cylinder::regions::sample_basin(&params(), parabolic_cylinder::Chart::Up, 1, 4).unwrap()[0];
    let r = stable_set_probe(&model(), &params(), &p, 1000).unwrap();
    assert_eq!(r.class, ProbeClass::EntersBasin { entry: 0 });
}

#[test]
fn model_orbit_keeps_x_modulus() {
    let x0 = c(0.3, 0.4);
    let rec = model().orbit(ChartPoint::up(x0, c(0.05, 0.0)), 100_000);
    assert!(rec.stop.is_none());
    assert!(rec.points.iter().all(|q| (q.c1.norm() / x0.norm() - 1.0).abs() < 1e-9));
    let s = verify_asymptotics(&model(), &ChartPoint::up(x0, c(0.05, 0.0)), 100_000).unwrap().summary;
    assert!((0.95..=1.05).contains(&s.ratio_final));
}
