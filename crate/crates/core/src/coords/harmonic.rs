//! `h(zeta) = lim_n sum_{j<n} 1/(zeta + j) - log((zeta + n)/zeta)` and the
//! complex digamma function used to cross-check it.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `B_{2k} / (2k)` for `k = 1..=5`.
const ASYMPTOTIC: [f64; 5] = [1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0];

/// Complex digamma for `Re zeta > 0`: upward recurrence to `Re >= 10`, then
/// the asymptotic series through `zeta^-10`.
pub fn digamma(zeta: Complex64) -> Result<Complex64> {
    if !(zeta.re > 0.0) {
        return Err(Error::Domain(format!("digamma needs Re zeta > 0, got {zeta}")));
    }
    let mut z = zeta;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 10.0 {
        shift -= z.inv();
        z += 1.0;
    }
    let inv2 = (z * z).inv();
    let mut pow = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for b in ASYMPTOTIC {
        series += pow * b;
        pow *= inv2;
    }
    Ok(shift + z.ln() - 0.5 * z.inv() - series)
}

/// Compensated complex summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    fn add_part(sum: f64, comp: &mut f64, x: f64) -> f64 {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            *comp += (sum - t) + x;
        } else {
            *comp += (x - t) + sum;
        }
        t
    }

    pub(crate) fn add(&mut self, x: Complex64) {
        self.sum.re = Self::add_part(self.sum.re, &mut self.comp.re, x.re);
        self.sum.im = Self::add_part(self.sum.im, &mut self.comp.im, x.im);
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicLimit {
    pub value: Complex64,
    /// Partial-sum terms consumed.
    pub n_terms: usize,
    /// Difference of the last two extrapolants.
    pub increment: f64,
    /// The plain `1/(Re zeta + n - 1)` tail bound at the last cut-off.
    pub raw_tail_bound: f64,
}

const MAX_DOUBLINGS: usize = 22;
const NEVILLE_NODES: usize = 8;

/// Partial sums at cut-offs `n_k = 16 * 2^k`, extrapolated to `n = infinity`
/// by polynomial interpolation in `t = 1/(zeta + n_k)`.
pub fn harmonic_log_limit(zeta: Complex64, tol: f64) -> Result<HarmonicLimit> {
    if !(zeta.re > 0.0) {
        return Err(Error::Domain(format!("h(zeta) needs Re zeta > 0, got {zeta}")));
    }
    let log_zeta = zeta.ln();
    let mut sum = KahanSum::default();
    let mut j = 0usize;
    let mut nodes: Vec<(Complex64, Complex64)> = Vec::new();
    let mut prev: Option<Complex64> = None;
    let mut n = 16usize;
    let mut increment = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        while j < n {
            sum.add((zeta + j as f64).inv());
            j += 1;
        }
        let w = zeta + n as f64;
        nodes.push((w.inv(), sum.value() - (w.ln() - log_zeta)));
        let start = nodes.len().saturating_sub(NEVILLE_NODES);
        let est = neville_at_zero(&nodes[start..]);
        if let Some(p) = prev {
            increment = (est - p).norm();
            if nodes.len() >= 4 && increment < tol {
                return Ok(HarmonicLimit {
                    value: est,
                    n_terms: n,
                    increment,
                    raw_tail_bound: 1.0 / (zeta.re + n as f64 - 1.0).max(f64::MIN_POSITIVE),
                });
            }
        }
        prev = Some(est);
        n *= 2;
    }
    Err(Error::NoConvergence { n_max: n / 2, last_increment: increment })
}

/// Value at `t = 0` of the interpolating polynomial through `(t_i, v_i)`.
fn neville_at_zero(nodes: &[(Complex64, Complex64)]) -> Complex64 {
    let mut p: Vec<Complex64> = nodes.iter().map(|n| n.1).collect();
    let k = nodes.len();
    for m in 1..k {
        for i in 0..k - m {
            let (ti, tj) = (nodes[i].0, nodes[i + m].0);
            p[i] = (tj * p[i] - ti * p[i + 1]) / (tj - ti);
        }
    }
    p[0]
}

/// Closed form `log zeta - digamma(zeta)`.
pub fn harmonic_closed_form(zeta: Complex64) -> Result<Complex64> {
    Ok(zeta.ln() - digamma(zeta)?)
}
