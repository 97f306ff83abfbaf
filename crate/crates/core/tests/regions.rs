use num_complex::Complex64;
use parabolic_cylinder::regions::{find_r0, in_basin, in_h, in_sector, one_step_failures, sample_basin, R0Search};
use parabolic_cylinder::{BasinParams, Chart, MapFamily, RotationNumber};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sector_and_half_plane_correspond() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (r, theta) = (0.05, 0.4);
    for _ in 0..10_000 {
        let u = Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        if u.norm() == 0.0 || ((u - r).norm() - r).abs() < 1e-12 || (u.arg().abs() - theta).abs() < 1e-12 {
            continue;
        }
        assert_eq!(in_h(1.0 / u, 1.0 / (2.0 * r), theta), in_sector(u, r, theta), "u = {u}");
    }
}

#[test]
fn samples_are_members_and_reproducible() {
    let p = BasinParams::new(0.05, 0.4, 0.3).unwrap();
    for chart in [Chart::Down, Chart::Up] {
        let a = sample_basin(&p, chart, 100, 42).unwrap();
        assert_eq!(a.len(), 100);
        assert!(a.iter().all(|q| in_basin(q, &p) && q.chart == chart));
        assert_eq!(a, sample_basin(&p, chart, 100, 42).unwrap());
    }
    let thin = BasinParams::new(0.05, 1e-9, 0.3).unwrap();
    assert!(sample_basin(&thin, Chart::Down, 20, 1).unwrap().iter().all(|q| in_basin(q, &thin)));
}

#[test]
fn model_radius_search_passes_its_own_test() {
    let fam = MapFamily::model(RotationNumber::golden_mean());
    let w = find_r0(&fam, 0.4, 0.3, 1.0, &R0Search::default()).unwrap();
    let p = w.params();
    assert!(p.r > 0.0);
    let pts = sample_basin(&p, Chart::Down, 1000, 17).unwrap();
    assert!(one_step_failures(&fam, &p, &pts).is_empty());
}
