//! Sample-scale checks of the orbit asymptotics, the limit circles and the
//! basin invariance.

use crate::coords::FatouCoordinates;
use crate::error::{Error, Result};
use crate::germ::{Chart, ChartPoint, MapFamily, OrbitStop, PrecisePoint, OVERFLOW_GUARD};
use crate::par;
use crate::regions::{in_basin, in_basin_down, sample_basin, BasinParams};
use crate::rotation::convergent_denominators;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Bins used for angular discrepancies unless a caller chooses otherwise.
pub const DEFAULT_BINS: usize = 100;
/// Allowed deviation of `|U_N|/N` from 1.
pub const RATIO_DELTA: f64 = 0.05;
pub const ATTRACTION_RADIUS: f64 = 1e-2;
/// Witnesses kept per failure kind in reports.
pub const MAX_WITNESSES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    fn of(values: &[f64]) -> Band {
        values.iter().fold(Band { lo: f64::INFINITY, hi: f64::NEG_INFINITY }, |b, &v| Band {
            lo: b.lo.min(v),
            hi: b.hi.max(v),
        })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsSummary {
    pub n_final: usize,
    pub ratio_final: f64,
    pub ratio_ok: bool,
    /// Bands are taken over `n >= band_from`.
    pub band_from: usize,
    pub y_band: Band,
    pub x_band: Band,
}

/// Views of one upstairs orbit. Entry `i` of every sequence belongs to step `n = i + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitDiagnostics {
    pub ratio_un_n: Vec<f64>,
    pub y_scaled: Vec<f64>,
    pub x_mod: Vec<f64>,
    pub stop: Option<OrbitStop>,
    pub summary: AsymptoticsSummary,
}

fn upstairs(p: &ChartPoint) -> Result<ChartPoint> {
    let q = p.to_up()?;
    if q.c2 == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("y = 0 lies on the Siegel curve, outside every basin".into()));
    }
    Ok(q)
}

/// Orbit views without the early-stop check; the sequences end where the orbit did.
pub fn diagnose_orbit(fam: &MapFamily, p: &ChartPoint, n: usize) -> Result<OrbitDiagnostics> {
    let rec = fam.orbit(upstairs(p)?, n);
    let k = rec.points.len() - 1;
    let mut ratio_un_n = Vec::with_capacity(k);
    let mut y_scaled = Vec::with_capacity(k);
    let mut x_mod = Vec::with_capacity(k);
    for (i, q) in rec.points.iter().enumerate().skip(1) {
        let m = i as f64;
        ratio_un_n.push(1.0 / (q.product().norm() * m));
        y_scaled.push(q.c2.norm() * m.sqrt());
        x_mod.push(q.c1.norm());
    }
    let band_from = (k / 10).max(1);
    let summary = AsymptoticsSummary {
        n_final: k,
        ratio_final: ratio_un_n.last().copied().unwrap_or(f64::NAN),
        ratio_ok: ratio_un_n.last().is_some_and(|r| (r - 1.0).abs() <= RATIO_DELTA),
        band_from,
        y_band: Band::of(&y_scaled[band_from - 1..]),
        x_band: Band::of(&x_mod[band_from - 1..]),
    };
    Ok(OrbitDiagnostics { ratio_un_n, y_scaled, x_mod, stop: rec.stop, summary })
}

/// `|U_n|/n`, `|y_n| sqrt(n)` and `|x_n|` along the orbit of a basin point.
pub fn verify_asymptotics(fam: &MapFamily, p: &ChartPoint, n: usize) -> Result<OrbitDiagnostics> {
    if n < 1000 {
        return Err(Error::Precondition(format!("verify_asymptotics needs N >= 1000, got {n}")));
    }
    let d = diagnose_orbit(fam, p, n)?;
    match d.stop {
        Some(OrbitStop::ChartExit { step }) => Err(Error::ChartExit { step }),
        Some(OrbitStop::Overflow { step }) => Err(Error::EarlyStop { step, reason: "overflow".into() }),
        None => Ok(d),
    }
}

/// Star discrepancy of angles on the circle, over prefixes of `n_bins` equal bins.
pub fn equidistribution(angles: &[f64], n_bins: usize) -> Result<f64> {
    if angles.len() < 1000 {
        return Err(Error::Precondition(format!("equidistribution needs >= 1000 angles, got {}", angles.len())));
    }
    if n_bins == 0 {
        return Err(Error::Precondition("n_bins must be positive".into()));
    }
    let mut counts = vec![0usize; n_bins];
    for a in angles {
        let t = a.rem_euclid(TAU) / TAU;
        counts[((t * n_bins as f64) as usize).min(n_bins - 1)] += 1;
    }
    let n = angles.len() as f64;
    let mut cum = 0usize;
    let mut worst = 0f64;
    for (k, c) in counts.iter().enumerate() {
        cum += c;
        worst = worst.max((cum as f64 / n - (k + 1) as f64 / n_bins as f64).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleReport {
    pub n: usize,
    pub tail_start: usize,
    pub radius_hat: f64,
    pub tau_sq_mod: f64,
    pub max_radial_dev: f64,
    /// Tail maximum of `|x_n - lambda^{2n} / tau^2|`.
    pub max_pointwise_dev: f64,
    pub discrepancy: f64,
    /// `radius_hat * |tau|^2`; 1 under the reciprocal law.
    pub product: f64,
    /// `radius_hat / |tau|^2`; 1 if the radius were `|tau|^2`.
    pub radius_over_tau_sq: f64,
    #[serde(skip)]
    pub angles: Vec<f64>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Fits the circle that `x_n` accumulates on and compares it with `tau(p)`.
pub fn limit_circle(fc: &FatouCoordinates, p: &ChartPoint, n: usize, tail_frac: f64) -> Result<CircleReport> {
    if n < 10_000 {
        return Err(Error::Precondition(format!("limit_circle needs N >= 10^4, got {n}")));
    }
    if !(tail_frac > 0.0 && tail_frac < 1.0) {
        return Err(Error::Precondition(format!("tail_frac = {tail_frac} not in (0, 1)")));
    }
    let fam = fc.family();
    let rec = fam.orbit(upstairs(p)?, n);
    if let Some(stop) = rec.stop {
        return Err(Error::EarlyStop { step: stop.step(), reason: "orbit stopped before N".into() });
    }
    let tau = fc.tau(p)?.value;
    let tau_sq = tau * tau;
    let tail_start = ((n as f64) * (1.0 - tail_frac)).ceil() as usize;
    let tail = &rec.points[tail_start..];
    let radius_hat = median(tail.iter().map(|q| q.c1.norm()).collect());
    let max_radial_dev = tail.iter().map(|q| (q.c1.norm() - radius_hat).abs()).fold(0.0, f64::max);
    let rot = fam.rotation();
    let max_pointwise_dev = tail
        .iter()
        .enumerate()
        .map(|(i, q)| (q.c1 - rot.lambda_pow(2 * (tail_start + i) as i64) / tau_sq).norm())
        .fold(0.0, f64::max);
    let angles: Vec<f64> = tail.iter().map(|q| q.c1.arg()).collect();
    let discrepancy = equidistribution(&angles, DEFAULT_BINS)?;
    let tau_sq_mod = tau.norm_sqr();
    Ok(CircleReport {
        n,
        tail_start,
        radius_hat,
        tau_sq_mod,
        max_radial_dev,
        max_pointwise_dev,
        discrepancy,
        product: radius_hat * tau_sq_mod,
        radius_over_tau_sq: radius_hat / tau_sq_mod,
        angles,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResiduePair {
    pub a: usize,
    pub b: usize,
    pub ratio: Complex64,
    pub expected: Complex64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationFreedomReport {
    pub modulus: usize,
    pub k_from: usize,
    pub k_to: usize,
    pub pairs: Vec<ResiduePair>,
    pub max_error: f64,
}

/// Largest continued-fraction denominator of `2 phi mod 1` not above `max_q`.
pub fn default_modulus(fam: &MapFamily, max_q: u64) -> usize {
    let x = (2.0 * fam.rotation().phi()).rem_euclid(1.0);
    convergent_denominators(x, max_q.max(1)).last().copied().unwrap_or(1) as usize
}

/// Limits of `x_n` along `n = kM + a`, averaged over a common window of `k`,
/// compared pairwise with the rotation `lambda^{2(a-b)}`.
pub fn rotation_freedom(
    fam: &MapFamily,
    p: &ChartPoint,
    n: usize,
    modulus: usize,
    pairs: &[(usize, usize)],
) -> Result<RotationFreedomReport> {
    if modulus == 0 || pairs.iter().any(|&(a, b)| a >= modulus || b >= modulus) {
        return Err(Error::Precondition("residues must lie in [0, M) with M > 0".into()));
    }
    let k_to = n / modulus;
    let k_from = k_to / 2;
    if k_to - k_from < 4 {
        return Err(Error::Precondition(format!("N = {n} too short for modulus {modulus}")));
    }
    let rec = fam.orbit(upstairs(p)?, k_to * modulus);
    if let Some(stop) = rec.stop {
        return Err(Error::EarlyStop { step: stop.step(), reason: "orbit stopped before N".into() });
    }
    let limit = |a: usize| -> Complex64 {
        let s: Complex64 = (k_from..k_to).map(|k| rec.points[k * modulus + a].c1).sum();
        s / (k_to - k_from) as f64
    };
    let rot = fam.rotation();
    let pairs: Vec<ResiduePair> = pairs
        .iter()
        .map(|&(a, b)| {
            let ratio = limit(a) / limit(b);
            let expected = rot.lambda_pow(2 * (a as i64 - b as i64));
            ResiduePair { a, b, ratio, expected, error: (ratio - expected).norm() }
        })
        .collect();
    let max_error = pairs.iter().map(|p| p.error).fold(0.0, f64::max);
    Ok(RotationFreedomReport { modulus, k_from, k_to, pairs, max_error })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub index: usize,
    pub point: ChartPoint,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub params: BasinParams,
    pub n_samples: usize,
    pub n_steps: usize,
    /// Whether `beta (l + 1) >= 4` holds for the family.
    pub degree_condition: bool,
    pub one_step_failures: usize,
    pub one_step_witnesses: Vec<Witness>,
    pub max_norm: f64,
    /// Largest `sqrt(2 |z_N w_N|)`, a lower bound for `||(z_N, w_N)||`.
    pub max_norm_lower_bound: f64,
    pub min_norm_lower_bound: f64,
    pub attraction_failures: usize,
    pub attraction_witnesses: Vec<Witness>,
}

impl InvarianceReport {
    pub fn one_step_ok(&self) -> bool {
        self.one_step_failures == 0
    }

    pub fn attraction_ok(&self) -> bool {
        self.attraction_failures == 0
    }
}

/// Final Euclidean norm and `|zw|` after `n` downstairs steps; infinite on escape.
fn attract(fam: &MapFamily, p: &ChartPoint, n: usize) -> (f64, f64) {
    let d = p.to_down();
    let (mut z, mut w) = (d.c1, d.c2);
    for _ in 0..n {
        (z, w) = fam.apply_down(z, w);
        if !(z.norm() <= OVERFLOW_GUARD && w.norm() <= OVERFLOW_GUARD) {
            return (f64::INFINITY, f64::INFINITY);
        }
    }
    ((z.norm_sqr() + w.norm_sqr()).sqrt(), (z * w).norm())
}

/// One-step invariance and attraction after `n_steps` on fresh basin samples.
pub fn invariance_suite(
    fam: &MapFamily,
    params: &BasinParams,
    n_samples: usize,
    seed: u64,
    n_steps: usize,
) -> Result<InvarianceReport> {
    let pts = if n_samples == 0 { Vec::new() } else { sample_basin(params, Chart::Down, n_samples, seed)? };
    let one_step: Vec<Witness> = pts
        .iter()
        .enumerate()
        .filter_map(|(index, q)| {
            let (z1, w1) = fam.apply_down(q.c1, q.c2);
            (!in_basin_down(z1, w1, params)).then(|| Witness { index, point: *q, value: (z1 * w1).norm() })
        })
        .collect();
    let finals = par::map(&pts, |q| attract(fam, q, n_steps));
    let mut attraction: Vec<Witness> = Vec::new();
    let mut max_norm = 0f64;
    let mut max_norm_lower_bound = 0f64;
    let mut min_norm_lower_bound = f64::INFINITY;
    for (index, (&(norm, prod), q)) in finals.iter().zip(&pts).enumerate() {
        max_norm = max_norm.max(norm);
        max_norm_lower_bound = max_norm_lower_bound.max((2.0 * prod).sqrt());
        min_norm_lower_bound = min_norm_lower_bound.min((2.0 * prod).sqrt());
        if !(norm < ATTRACTION_RADIUS) {
            attraction.push(Witness { index, point: *q, value: norm });
        }
    }
    attraction.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.index.cmp(&b.index)));
    Ok(InvarianceReport {
        params: *params,
        n_samples,
        n_steps,
        degree_condition: params.compatible_with(fam.order()),
        one_step_failures: one_step.len(),
        one_step_witnesses: one_step.into_iter().take(MAX_WITNESSES).collect(),
        max_norm,
        max_norm_lower_bound,
        min_norm_lower_bound,
        attraction_failures: attraction.len(),
        attraction_witnesses: attraction.into_iter().take(MAX_WITNESSES).collect(),
    })
}

/// Outcome of following one orbit. A heuristic, not a membership decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "class")]
pub enum ProbeClass {
    EntersBasin { entry: usize },
    /// `y = 0`: the orbit rotates on the Siegel curve with `|x_n| = |x_0|`.
    RotationOnSiegelCurve { modulus: f64 },
    ConvergesToFixedPointOnly { final_norm: f64 },
    NonConvergent { final_norm: f64 },
    Escaping { step: usize },
    ChartExit { step: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub class: ProbeClass,
    pub steps: usize,
    pub heuristic: bool,
}

/// Norm below which an orbit without basin entry counts as converging to the fixed point.
pub const FIXED_POINT_RADIUS: f64 = 1e-3;

pub fn stable_set_probe(fam: &MapFamily, params: &BasinParams, p: &ChartPoint, n: usize) -> Result<ProbeReport> {
    if n < 1000 {
        return Err(Error::Precondition(format!("stable_set_probe needs N >= 1000, got {n}")));
    }
    let report = |class, steps| Ok(ProbeReport { class, steps, heuristic: true });
    if p.chart == Chart::Up && p.c2 == Complex64::new(0.0, 0.0) {
        return report(ProbeClass::RotationOnSiegelCurve { modulus: p.c1.norm() }, 0);
    }
    let mut state = PrecisePoint::from(*p);
    for step in 0..=n {
        let q = ChartPoint::from(state);
        if !(q.max_modulus() <= OVERFLOW_GUARD) {
            return report(ProbeClass::Escaping { step }, step);
        }
        if in_basin(&q, params) {
            return report(ProbeClass::EntersBasin { entry: step }, step);
        }
        if step == n {
            let d = q.to_down();
            let final_norm = (d.c1.norm_sqr() + d.c2.norm_sqr()).sqrt();
            let class = if final_norm < FIXED_POINT_RADIUS {
                ProbeClass::ConvergesToFixedPointOnly { final_norm }
            } else {
                ProbeClass::NonConvergent { final_norm }
            };
            return report(class, n);
        }
        match fam.step_precise(state) {
            Some(next) => state = next,
            None => return report(ProbeClass::ChartExit { step: step + 1 }, step + 1),
        }
    }
    unreachable!("loop returns at step n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::RotationNumber;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn discrepancy_of_degenerate_sequences() {
        let constant = vec![0.0; 2000];
        assert!((equidistribution(&constant, 50).unwrap() - (1.0 - 1.0 / 50.0)).abs() < 1e-12);
        // 0.3 rad falls in bin 2 of 50
        let constant = vec![0.3; 2000];
        assert!((equidistribution(&constant, 50).unwrap() - (1.0 - 3.0 / 50.0)).abs() < 1e-12);
        let k = 1000;
        let grid: Vec<f64> = (0..k).map(|i| TAU * i as f64 / k as f64).collect();
        assert!(equidistribution(&grid, 64).unwrap() <= 1.0 / k as f64 + 1.0 / 64.0);
        assert!(equidistribution(&grid[..999], 10).is_err());
    }

    #[test]
    fn siegel_points() {
        let fam = MapFamily::model(RotationNumber::golden_mean());
        let params = BasinParams::new(0.5, 0.4, 0.3).unwrap();
        let p = ChartPoint::up(c(0.7, 0.1), c(0.0, 0.0));
        assert!(verify_asymptotics(&fam, &p, 1000).is_err());
        let r = stable_set_probe(&fam, &params, &p, 1000).unwrap();
        assert_eq!(r.class, ProbeClass::RotationOnSiegelCurve { modulus: p.c1.norm() });
    }

    #[test]
    fn short_orbits_rejected() {
        let fam = MapFamily::model(RotationNumber::golden_mean());
        let p = ChartPoint::up(c(1.0, 0.0), c(0.1, 0.0));
        assert!(matches!(verify_asymptotics(&fam, &p, 999), Err(Error::Precondition(_))));
    }

    #[test]
    fn empty_invariance_report() {
        let fam = MapFamily::model(RotationNumber::golden_mean());
        let params = BasinParams::new(0.5, 0.4, 0.3).unwrap();
        let r = invariance_suite(&fam, &params, 0, 1, 100).unwrap();
        assert_eq!(r.n_samples, 0);
        assert!(r.one_step_ok() && r.attraction_ok());
    }

    #[test]
    fn default_modulus_is_a_denominator() {
        let fam = MapFamily::model(RotationNumber::golden_mean());
        assert_eq!(default_modulus(&fam, 2000), 1292);
    }
}
