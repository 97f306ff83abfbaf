use num_complex::Complex64;
use parabolic_cylinder::regions::{sample_basin, BasinParams};
use parabolic_cylinder::{Chart, ChartPoint, MapFamily, RotationNumber};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_c(rng: &mut ChaCha8Rng, max: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..max), rng.gen_range(0.0..std::f64::consts::TAU))
}

#[test]
fn jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let rot = RotationNumber::new(rng.gen_range(0.05..0.95)).unwrap();
        let fam = MapFamily::default_perturbed(rot, 4 + rng.gen_range(0..3), random_c(&mut rng, 0.5), random_c(&mut rng, 0.5))
            .unwrap();
        let (z, w) = (random_c(&mut rng, 0.5), random_c(&mut rng, 0.5));
        let j = fam.jacobian_down(z, w);
        let h = 1e-6;
        let dz = {
            let (a, b) = (fam.apply_down(z + h, w), fam.apply_down(z - h, w));
            [(a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h)]
        };
        let dw = {
            let (a, b) = (fam.apply_down(z, w + h), fam.apply_down(z, w - h));
            [(a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h)]
        };
        let fd = [[dz[0], dw[0]], [dz[1], dw[1]]];
        for r in 0..2 {
            for k in 0..2 {
                let scale = j[r][k].norm().max(1.0);
                assert!((j[r][k] - fd[r][k]).norm() < 1e-6 * scale, "{r}{k}: {} vs {}", j[r][k], fd[r][k]);
            }
        }
    }
}

#[test]
fn preimage_recovers_basin_points() {
    let fam = MapFamily::default_perturbed(RotationNumber::golden_mean(), 4, c(0.1, 0.0), c(0.1, 0.0)).unwrap();
    let params = BasinParams::new(0.4, 0.4, 0.3).unwrap();
    for p in sample_basin(&params, Chart::Down, 50, 9).unwrap() {
        let target = fam.apply_down(p.c1, p.c2);
        let (z, w) = fam.preimage_down(target).unwrap();
        assert!((z - p.c1).norm() < 1e-10 && (w - p.c2).norm() < 1e-10);
    }
}

#[test]
fn model_lift_rotates_x_exactly() {
    let fam = MapFamily::model(RotationNumber::golden_mean());
    let l2 = fam.rotation().lambda() * fam.rotation().lambda();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (x, y) = (random_c(&mut rng, 3.0), random_c(&mut rng, 0.5));
        let (x1, _) = fam.apply_up(x, y).unwrap();
        assert!(parabolic_cylinder::suite::ulps(x1, l2 * x) <= 4.0);
    }
}

#[test]
fn quarter_turn_upstairs_values() {
    let fam = MapFamily::model(RotationNumber::new(0.25).unwrap());
    let (x1, y1) = fam.apply_up(c(1.0, 0.0), c(0.1, 0.0)).unwrap();
    assert!((x1 - c(-1.0, 0.0)).norm() < 1e-15);
    assert!((y1 - c(0.0, -0.0995)).norm() < 1e-15);
}

#[test]
fn orbit_ratio_at_ten_thousand() {
    let fam = MapFamily::model(RotationNumber::golden_mean());
    let rec = fam.orbit(ChartPoint::up(c(1.0, 0.0), c(0.1, 0.0)), 10_000);
    assert!(rec.stop.is_none());
    let u = rec.u_values().last().copied().flatten().unwrap();
    assert!((0.9..=1.1).contains(&(u.norm() / 10_000.0)));
}

#[test]
fn far_points_stop_early() {
    let fam = MapFamily::model(RotationNumber::golden_mean());
    let rec = fam.orbit(ChartPoint::up(c(10.0, 0.0), c(10.0, 0.0)), 1000);
    assert!(rec.stop.is_some());
    assert!(rec.points.len() < 1001);
}
