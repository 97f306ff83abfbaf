//! Membership predicates and samplers for the sector `S(r, theta)`, the
//! sector at infinity `H(R, theta)`, the local basin downstairs and its lift.

use crate::error::{Error, Result};
use crate::germ::{Chart, ChartPoint, MapFamily};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinParams {
    pub r: f64,
    pub theta: f64,
    pub beta: f64,
}

impl BasinParams {
    pub fn new(r: f64, theta: f64, beta: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("basin radius r = {r} must be positive")));
        }
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::Domain(format!("theta = {theta} not in (0, pi/2)")));
        }
        if !(beta > 0.0 && beta < 0.5) {
            return Err(Error::Domain(format!("beta = {beta} not in (0, 1/2)")));
        }
        Ok(BasinParams { r, theta, beta })
    }

    pub fn gamma(&self) -> f64 {
        self.beta / (1.0 - self.beta)
    }

    /// `R = 1/(2r)`.
    pub fn big_r(&self) -> f64 {
        1.0 / (2.0 * self.r)
    }

    /// The degree condition `beta (l + 1) >= 4`.
    pub fn compatible_with(&self, l: u32) -> bool {
        self.beta * (l as f64 + 1.0) >= 4.0
    }

    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(r, self.theta, self.beta)
    }
}

/// `|arg u| < theta` and `|u - r| < r`.
pub fn in_sector(u: Complex64, r: f64, theta: f64) -> bool {
    u != Complex64::new(0.0, 0.0) && u.arg().abs() < theta && (u - r).norm() < r
}

/// `Re U > R` and `|arg U| < theta`.
pub fn in_h(big_u: Complex64, big_r: f64, theta: f64) -> bool {
    big_u.re > big_r && big_u.arg().abs() < theta
}

/// `zw` in the sector and `|z|, |w| < |zw|^beta`.
pub fn in_basin_down(z: Complex64, w: Complex64, p: &BasinParams) -> bool {
    let u = z * w;
    if !in_sector(u, p.r, p.theta) {
        return false;
    }
    let bound = u.norm().powf(p.beta);
    z.norm() < bound && w.norm() < bound
}

/// Pullback of the downstairs basin under `(z, w) = (xy, y)`:
/// `xy^2` in the sector and `|y|^{1/gamma - 1} < |x| < |y|^{gamma - 1}`.
pub fn in_basin_up(x: Complex64, y: Complex64, p: &BasinParams) -> bool {
    if y == Complex64::new(0.0, 0.0) {
        return false;
    }
    if !in_sector(x * y * y, p.r, p.theta) {
        return false;
    }
    let (ax, ay) = (x.norm(), y.norm());
    let g = p.gamma();
    ax < ay.powf(g - 1.0) && ax > ay.powf(1.0 / g - 1.0)
}

pub fn in_basin(pt: &ChartPoint, p: &BasinParams) -> bool {
    match pt.chart {
        Chart::Down => in_basin_down(pt.c1, pt.c2, p),
        Chart::Up => in_basin_up(pt.c1, pt.c2, p),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSettings {
    /// `|u|` is drawn log-uniformly from `[2r 10^-decades, 2r)`.
    pub decades: f64,
    pub max_proposals: usize,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        SamplerSettings { decades: 3.0, max_proposals: 100_000 }
    }
}

/// Generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn propose(rng: &mut ChaCha8Rng, p: &BasinParams, s: &SamplerSettings) -> Option<(Complex64, Complex64)> {
    let modulus = 2.0 * p.r * 10f64.powf(-s.decades * rng.gen::<f64>());
    let u = Complex64::from_polar(modulus, p.theta * (2.0 * rng.gen::<f64>() - 1.0));
    if !in_sector(u, p.r, p.theta) {
        return None;
    }
    let (lo, hi) = (modulus.powf(1.0 - p.beta).ln(), modulus.powf(p.beta).ln());
    if !(lo < hi) {
        return None;
    }
    let w = Complex64::from_polar((lo + (hi - lo) * rng.gen::<f64>()).exp(), PI * (2.0 * rng.gen::<f64>() - 1.0));
    Some((u / w, w))
}

/// One basin point drawn from `rng`.
pub fn sample_point(rng: &mut ChaCha8Rng, p: &BasinParams, chart: Chart, s: &SamplerSettings) -> Result<ChartPoint> {
    for _ in 0..s.max_proposals {
        let Some((z, w)) = propose(rng, p, s) else { continue };
        let pt = match chart {
            Chart::Down => ChartPoint::down(z, w),
            Chart::Up => ChartPoint::up(z / w, w),
        };
        if in_basin(&pt, p) {
            return Ok(pt);
        }
    }
    Err(Error::Sampling(format!(
        "no basin point in {} proposals for r = {}, theta = {}, beta = {}",
        s.max_proposals, p.r, p.theta, p.beta
    )))
}

pub fn sample_basin(p: &BasinParams, chart: Chart, n_points: usize, seed: u64) -> Result<Vec<ChartPoint>> {
    sample_basin_with(p, chart, n_points, seed, &SamplerSettings::default())
}

pub fn sample_basin_with(
    p: &BasinParams,
    chart: Chart,
    n_points: usize,
    seed: u64,
    s: &SamplerSettings,
) -> Result<Vec<ChartPoint>> {
    (0..n_points)
        .map(|i| sample_point(&mut sample_rng(seed, i as u64), p, chart, s))
        .collect()
}

/// Indices of samples whose one-step image leaves the downstairs basin.
pub fn one_step_failures(fam: &MapFamily, p: &BasinParams, pts: &[ChartPoint]) -> Vec<usize> {
    pts.iter()
        .enumerate()
        .filter(|(_, q)| {
            let d = q.to_down();
            let (z1, w1) = fam.apply_down(d.c1, d.c2);
            !in_basin_down(z1, w1, p)
        })
        .map(|(i, _)| i)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct R0Search {
    pub samples: usize,
    pub max_halvings: u32,
    pub bisections: u32,
    pub seed: u64,
}

impl Default for R0Search {
    fn default() -> Self {
        R0Search { samples: 10_000, max_halvings: 30, bisections: 30, seed: 0x5eed_0f4a }
    }
}

/// Sample evidence for a found radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct R0Witness {
    pub r0: f64,
    pub theta: f64,
    pub beta: f64,
    pub samples_per_test: usize,
    /// Every tested radius with its outcome, in test order.
    pub tested: Vec<(f64, bool)>,
}

impl R0Witness {
    pub fn params(&self) -> BasinParams {
        BasinParams { r: self.r0, theta: self.theta, beta: self.beta }
    }
}

/// Largest tested `r <= r_hi` whose sampled basin is mapped into itself in one step.
pub fn find_r0(fam: &MapFamily, theta: f64, beta: f64, r_hi: f64, search: &R0Search) -> Result<R0Witness> {
    let base = BasinParams::new(r_hi, theta, beta)?;
    if r_hi <= f64::EPSILON {
        return Err(Error::SearchFailure(format!(
            "r_hi = {r_hi:e} is below double resolution of the map (1 - u/2 rounds to 1)"
        )));
    }
    let mut tested = Vec::new();
    let mut passes = |r: f64| -> Result<bool> {
        let p = base.with_r(r)?;
        let ok = match sample_basin(&p, Chart::Down, search.samples, search.seed) {
            Ok(pts) => one_step_failures(fam, &p, &pts).is_empty(),
            Err(Error::Sampling(_)) => false,
            Err(e) => return Err(e),
        };
        tested.push((r, ok));
        Ok(ok)
    };

    let mut lo = r_hi;
    let mut halvings = 0;
    while !passes(lo)? {
        halvings += 1;
        lo *= 0.5;
        if halvings > search.max_halvings || lo <= f64::EPSILON {
            return Err(Error::SearchFailure(format!(
                "no radius in [{:e}, {r_hi:e}] passed the one-step invariance test",
                r_hi * 0.5f64.powi(search.max_halvings as i32)
            )));
        }
    }
    if halvings > 0 {
        let mut hi = (2.0 * lo).min(r_hi);
        for _ in 0..search.bisections {
            let mid = (lo * hi).sqrt();
            if passes(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok(R0Witness { r0: lo, theta, beta, samples_per_test: search.samples, tested })
}
