//! Fatou-type coordinates `psi`, `sigma`, `tau` on the basin and the global
//! coordinates `Phi`, `Psi` on its union of preimages.
//!
//! With `U = 1/(xy^2)` the model map sends `U` to `U + 1 + c/U + O(U^-2)`
//! with residual constant `c = 3/4`, so the Abel coordinate is
//! `psi = lim U_n - c log U_n - n`. The fibre coordinates are
//! `sigma = lim lambda^n exp(S_n/2) y_n` with `S_n = sum_{j<n} 1/(psi + j)`
//! and `tau = lim lambda^n sqrt(psi + n) y_n`.

pub mod harmonic;

pub use harmonic::{digamma, harmonic_closed_form, harmonic_log_limit, HarmonicLimit, EULER_GAMMA};

use crate::accel::{shift_for, Extrapolated, Extrapolator};
use crate::dd::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::germ::{ChartPoint, MapFamily, PrecisePoint};
use crate::regions::{in_basin, BasinParams};
use harmonic::KahanSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// A converged coordinate value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "EstimateRecord", from = "EstimateRecord")]
pub struct FatouEstimate {
    pub value: Complex64,
    pub n_used: usize,
    pub residual: f64,
    pub c_used: Complex64,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
struct EstimateRecord {
    value_re: f64,
    value_im: f64,
    n_used: usize,
    residual: f64,
    c_re: f64,
    c_im: f64,
}

impl From<FatouEstimate> for EstimateRecord {
    fn from(e: FatouEstimate) -> Self {
        EstimateRecord {
            value_re: e.value.re,
            value_im: e.value.im,
            n_used: e.n_used,
            residual: e.residual,
            c_re: e.c_used.re,
            c_im: e.c_used.im,
        }
    }
}

impl From<EstimateRecord> for FatouEstimate {
    fn from(r: EstimateRecord) -> Self {
        FatouEstimate {
            value: Complex64::new(r.value_re, r.value_im),
            n_used: r.n_used,
            residual: r.residual,
            c_used: Complex64::new(r.c_re, r.c_im),
        }
    }
}

/// Output of `Phi` or `Psi`: a point of `C x C*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "CylinderRecord", from = "CylinderRecord")]
pub struct CylinderCoords {
    pub psi: Complex64,
    pub tau: Complex64,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
struct CylinderRecord {
    psi_re: f64,
    psi_im: f64,
    tau_re: f64,
    tau_im: f64,
}

impl From<CylinderCoords> for CylinderRecord {
    fn from(c: CylinderCoords) -> Self {
        CylinderRecord { psi_re: c.psi.re, psi_im: c.psi.im, tau_re: c.tau.re, tau_im: c.tau.im }
    }
}

impl From<CylinderRecord> for CylinderCoords {
    fn from(r: CylinderRecord) -> Self {
        CylinderCoords { psi: Complex64::new(r.psi_re, r.psi_im), tau: Complex64::new(r.tau_re, r.tau_im) }
    }
}

/// `U = 1/(xy^2) = 1/(zw)`.
pub fn u_of(p: &ChartPoint) -> Result<Complex64> {
    let u = p.product();
    if u == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("U is undefined where the product xy^2 (or zw) vanishes".into()));
    }
    Ok(1.0 / u)
}

/// Orbit from a basin point stored in the views the estimators need.
struct OrbitCache<'a> {
    fam: &'a MapFamily,
    state: PrecisePoint,
    u0: DdComplex,
    shift: usize,
    /// `U_m - U_0 - m`.
    shifted: Vec<Complex64>,
    big_u: Vec<Complex64>,
    fiber: Vec<Complex64>,
}

impl<'a> OrbitCache<'a> {
    fn new(fam: &'a MapFamily, p: &ChartPoint) -> Result<Self> {
        u_of(p)?;
        let state = PrecisePoint::from(*p);
        let u0 = DdComplex::ONE / state.product();
        Ok(OrbitCache {
            fam,
            state,
            u0,
            shift: shift_for(u0.into()),
            shifted: vec![Complex64::new(0.0, 0.0)],
            big_u: vec![u0.into()],
            fiber: vec![p.fiber()],
        })
    }

    fn extend_to(&mut self, len: usize) -> Result<()> {
        while self.shifted.len() < len {
            let m = self.shifted.len();
            self.state = self
                .fam
                .step_precise(self.state)
                .ok_or(Error::EarlyStop { step: m, reason: "chart exit".into() })?;
            let prod = self.state.product();
            if prod == DdComplex::ZERO {
                return Err(Error::EarlyStop { step: m, reason: "orbit reached U = infinity".into() });
            }
            let u = DdComplex::ONE / prod;
            let shifted = u - self.u0 - DdComplex::new(Dd::new(m as f64), Dd::ZERO);
            self.shifted.push(shifted.into());
            self.big_u.push(u.into());
            self.fiber.push(self.state.c2.into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordSettings {
    pub tol: f64,
    pub n_max: usize,
    /// Longest forward search for a basin entry in `Phi`.
    pub entry_max: usize,
    pub extrapolator: Extrapolator,
}

impl Default for CoordSettings {
    fn default() -> Self {
        CoordSettings { tol: 1e-8, n_max: 1 << 20, entry_max: 10_000, extrapolator: Extrapolator::default() }
    }
}

/// `c_n = (U_{n+1} - U_n - 1) U_n` summarized two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualConstant {
    /// Componentwise median over `n in [n_min, n_max]`.
    pub tail_median: Complex64,
    /// Accelerated limit of `c_n`, when the orbit was long enough.
    pub extrapolated: Option<Complex64>,
    pub extrapolation_increment: Option<f64>,
    pub n_min: usize,
    pub n_max: usize,
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

fn residual_sequence(fam: &MapFamily, p: &ChartPoint, len: usize) -> Result<Vec<Complex64>> {
    u_of(p)?;
    let mut state = PrecisePoint::from(*p);
    let mut u = DdComplex::ONE / state.product();
    let mut out = Vec::with_capacity(len);
    for step in 0..len {
        state = fam
            .step_precise(state)
            .ok_or(Error::EarlyStop { step: step + 1, reason: "chart exit".into() })?;
        let u1 = DdComplex::ONE / state.product();
        out.push(Complex64::from((u1 - u - DdComplex::ONE) * u));
        u = u1;
    }
    Ok(out)
}

/// Residual constant `c` of `U_{n+1} = U_n + 1 + c/U_n + ...` along the orbit of `p`.
pub fn estimate_c(fam: &MapFamily, p: &ChartPoint, n_min: usize, n_max: usize) -> Result<ResidualConstant> {
    if n_min < 10 || n_max <= n_min {
        return Err(Error::Precondition(format!(
            "estimate_c needs n_max > n_min >= 10, got n_min = {n_min}, n_max = {n_max}"
        )));
    }
    let seq = residual_sequence(fam, p, n_max + 1)?;
    let tail = &seq[n_min..=n_max];
    let tail_median = Complex64::new(
        median(tail.iter().map(|c| c.re).collect()),
        median(tail.iter().map(|c| c.im).collect()),
    );
    let shift = shift_for(u_of(p)?);
    let ex = Extrapolator::default().extrapolate(&seq, shift, 1e-11);
    Ok(ResidualConstant {
        tail_median,
        extrapolated: ex.map(|e| e.value),
        extrapolation_increment: ex.map(|e| e.increment),
        n_min,
        n_max,
    })
}

/// Accelerated residual constant, doubling the orbit until the increment is below `tol`.
pub fn converged_c(fam: &MapFamily, p: &ChartPoint, tol: f64, n_max: usize) -> Result<Extrapolated> {
    let ex = Extrapolator::default();
    let shift = shift_for(u_of(p)?);
    let mut seq = Vec::new();
    ex.converge(tol, n_max, shift, |len| {
        if seq.len() < len {
            seq = residual_sequence(fam, p, len)?;
        }
        Ok(ex.extrapolate(&seq[..len], shift, tol))
    })
}

/// Reference basin point used to pin down `c` for a family.
pub fn reference_point() -> ChartPoint {
    ChartPoint::up(Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0))
}

/// The three basin coordinates of one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCoords {
    pub psi: FatouEstimate,
    pub sigma: FatouEstimate,
    pub tau: FatouEstimate,
}

/// `Phi(p)` with the entry time it was evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiValue {
    pub coords: CylinderCoords,
    pub entry: usize,
}

/// Coordinate estimators for one family, basin and residual constant.
#[derive(Clone, Debug)]
pub struct FatouCoordinates<'a> {
    fam: &'a MapFamily,
    params: BasinParams,
    c: Complex64,
    settings: CoordSettings,
}

impl<'a> FatouCoordinates<'a> {
    pub fn new(fam: &'a MapFamily, params: BasinParams, c: Complex64, settings: CoordSettings) -> Self {
        FatouCoordinates { fam, params, c, settings }
    }

    /// Estimates `c` along the reference orbit first.
    pub fn for_family(fam: &'a MapFamily, params: BasinParams, settings: CoordSettings) -> Result<Self> {
        let c = match converged_c(fam, &reference_point(), 1e-11, 1 << 20) {
            Ok(e) => e.value,
            Err(Error::NoConvergence { .. }) => {
                let p = reference_point();
                let seq = residual_sequence(fam, &p, 1 << 20)?;
                Extrapolator::default()
                    .extrapolate(&seq, shift_for(u_of(&p)?), 1e-11)
                    .map(|e| e.value)
                    .ok_or_else(|| Error::Precondition("orbit too short to estimate c".into()))?
            }
            Err(e) => return Err(e),
        };
        Ok(Self::new(fam, params, c, settings))
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn family(&self) -> &MapFamily {
        self.fam
    }

    pub fn params(&self) -> &BasinParams {
        &self.params
    }

    pub fn settings(&self) -> &CoordSettings {
        &self.settings
    }

    fn estimate(&self, e: Extrapolated) -> FatouEstimate {
        FatouEstimate { value: e.value, n_used: e.n_used, residual: e.increment, c_used: self.c }
    }

    fn psi_from(&self, orbit: &mut OrbitCache) -> Result<FatouEstimate> {
        let ex = &self.settings.extrapolator;
        let c = self.c;
        let tol = self.settings.tol;
        let shift = orbit.shift;
        let mut seq: Vec<Complex64> = Vec::new();
        let e = ex.converge(tol, self.settings.n_max, shift, |len| {
            orbit.extend_to(len)?;
            for m in seq.len()..len {
                seq.push(orbit.shifted[m] - c * orbit.big_u[m].ln());
            }
            Ok(ex.extrapolate(&seq[..len], shift, tol))
        })?;
        let mut est = self.estimate(e);
        est.value += Complex64::from(orbit.u0);
        Ok(est)
    }

    /// Limit of `lambda^m g(m) y_m` for the weight sequence produced by `weight`.
    fn fibre_limit(
        &self,
        orbit: &mut OrbitCache,
        mut weight: impl FnMut(usize) -> Complex64,
    ) -> Result<FatouEstimate> {
        let ex = &self.settings.extrapolator;
        let mut powers = self.fam.rotation().powers();
        let tol = self.settings.tol;
        let shift = orbit.shift;
        let mut seq: Vec<Complex64> = Vec::new();
        let e = ex.converge(tol, self.settings.n_max, shift, |len| {
            orbit.extend_to(len)?;
            for m in seq.len()..len {
                let lm = powers.next().expect("infinite iterator");
                seq.push(lm * weight(m) * orbit.fiber[m]);
            }
            Ok(ex.extrapolate(&seq[..len], shift, tol))
        })?;
        Ok(self.estimate(e))
    }

    fn sigma_from(&self, orbit: &mut OrbitCache, psi: Complex64) -> Result<FatouEstimate> {
        let mut sum = KahanSum::default();
        self.fibre_limit(orbit, |m| {
            let w = (0.5 * sum.value()).exp();
            sum.add((psi + m as f64).inv());
            w
        })
    }

    fn tau_from(&self, orbit: &mut OrbitCache, psi: Complex64) -> Result<FatouEstimate> {
        let t = self.fibre_limit(orbit, |m| (psi + m as f64).sqrt())?;
        if t.value.norm() < self.settings.tol {
            return Err(Error::DegenerateFiber(t.value.norm()));
        }
        Ok(t)
    }

    pub fn psi(&self, p: &ChartPoint) -> Result<FatouEstimate> {
        self.psi_from(&mut OrbitCache::new(self.fam, p)?)
    }

    pub fn sigma(&self, p: &ChartPoint) -> Result<FatouEstimate> {
        let mut orbit = OrbitCache::new(self.fam, p)?;
        let psi = self.psi_from(&mut orbit)?;
        self.sigma_from(&mut orbit, psi.value)
    }

    pub fn tau(&self, p: &ChartPoint) -> Result<FatouEstimate> {
        let mut orbit = OrbitCache::new(self.fam, p)?;
        let psi = self.psi_from(&mut orbit)?;
        self.tau_from(&mut orbit, psi.value)
    }

    /// `psi`, `sigma` and `tau` from one shared orbit.
    pub fn evaluate(&self, p: &ChartPoint) -> Result<PointCoords> {
        let mut orbit = OrbitCache::new(self.fam, p)?;
        let psi = self.psi_from(&mut orbit)?;
        let sigma = self.sigma_from(&mut orbit, psi.value)?;
        let tau = self.tau_from(&mut orbit, psi.value)?;
        Ok(PointCoords { psi, sigma, tau })
    }

    /// First `n <= entry_max` with `F^n(p)` in the basin, and that point.
    pub fn basin_entry(&self, p: &ChartPoint) -> Result<(usize, ChartPoint)> {
        let mut state = PrecisePoint::from(*p);
        for n in 0..=self.settings.entry_max {
            let q = ChartPoint::from(state);
            if in_basin(&q, &self.params) {
                return Ok((n, q));
            }
            match self.fam.step_precise(state) {
                Some(next) => state = next,
                None => break,
            }
        }
        Err(Error::NotInOmega { n_max: self.settings.entry_max })
    }

    /// `Phi(p) = (psi(F^n p) - n, lambda^n tau(F^n p))` evaluated at entry time `n`.
    pub fn phi_at(&self, p: &ChartPoint, n: usize) -> Result<CylinderCoords> {
        let mut state = PrecisePoint::from(*p);
        for step in 0..n {
            state = self
                .fam
                .step_precise(state)
                .ok_or(Error::EarlyStop { step: step + 1, reason: "chart exit".into() })?;
        }
        let q = ChartPoint::from(state);
        let mut orbit = OrbitCache::new(self.fam, &q)?;
        let psi = self.psi_from(&mut orbit)?;
        let tau = self.tau_from(&mut orbit, psi.value)?;
        Ok(CylinderCoords {
            psi: psi.value - n as f64,
            tau: self.fam.rotation().lambda_pow(n as i64) * tau.value,
        })
    }

    /// `Phi` at the first basin entry.
    pub fn phi(&self, p: &ChartPoint) -> Result<PhiValue> {
        let (entry, _) = self.basin_entry(p)?;
        Ok(PhiValue { coords: self.phi_at(p, entry)?, entry })
    }

    /// `(zeta, xi) -> (zeta, exp(2 pi i phi zeta) xi)`.
    pub fn remove_rotation(&self, c: CylinderCoords) -> CylinderCoords {
        let phase = (Complex64::i() * TAU * self.fam.rotation().phi() * c.psi).exp();
        CylinderCoords { psi: c.psi, tau: phase * c.tau }
    }

    /// `Psi(p)`, conjugating the map to `(zeta, xi) -> (zeta + 1, xi)`.
    pub fn psi_rotation_free(&self, p: &ChartPoint) -> Result<CylinderCoords> {
        Ok(self.remove_rotation(self.phi(p)?.coords))
    }
}
