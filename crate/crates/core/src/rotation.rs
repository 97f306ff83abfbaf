//! Rotation numbers, small divisors and Brjuno partial sums.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI, TAU};

/// Powers of lambda are renormalized to the unit circle this often.
pub const RENORM_PERIOD: usize = 1024;

/// Largest denominator recognized when deciding whether an f64 angle is rational.
const MAX_DETECTED_DENOMINATOR: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationNumber {
    phi: f64,
    cf_terms: Option<Vec<u64>>,
    ratio: Option<(u64, u64)>,
    lambda: Complex64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn detect_ratio(phi: f64) -> Option<(u64, u64)> {
    (1..=MAX_DETECTED_DENOMINATOR).find_map(|q| {
        let p = (phi * q as f64).round();
        let close = (phi - p / q as f64).abs() <= 4.0 * f64::EPSILON * phi;
        (close && p > 0.0).then(|| {
            let p = p as u64;
            let g = gcd(p, q);
            (p / g, q / g)
        })
    })
}

impl RotationNumber {
    /// Angle in turns, `lambda = exp(2 pi i phi)`.
    pub fn new(phi: f64) -> Result<Self> {
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::Domain(format!("rotation angle {phi} not in (0,1)")));
        }
        Ok(RotationNumber {
            phi,
            cf_terms: None,
            ratio: detect_ratio(phi),
            lambda: Complex64::from_polar(1.0, TAU * phi),
        })
    }

    pub fn from_ratio(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p == 0 || p >= q {
            return Err(Error::Domain(format!("ratio {p}/{q} not in (0,1)")));
        }
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        let phi = p as f64 / q as f64;
        Ok(RotationNumber {
            phi,
            cf_terms: None,
            ratio: Some((p, q)),
            lambda: Complex64::from_polar(1.0, TAU * phi),
        })
    }

    /// `phi = [0; a1, a2, ...] = 1/(a1 + 1/(a2 + ...))`.
    pub fn from_cf(terms: &[u64]) -> Result<Self> {
        if terms.is_empty() || terms.contains(&0) {
            return Err(Error::Domain("continued fraction needs positive terms".into()));
        }
        if terms == [1] {
            return Err(Error::Domain("continued fraction [0; 1] gives phi = 1".into()));
        }
        let mut x = 0.0;
        for &a in terms.iter().rev() {
            x = 1.0 / (a as f64 + x);
        }
        let mut rot = Self::new(x)?;
        rot.cf_terms = Some(terms.to_vec());
        Ok(rot)
    }

    /// The golden mean `(sqrt 5 - 1)/2`, the default angle.
    pub fn golden_mean() -> Self {
        Self::new((5f64.sqrt() - 1.0) / 2.0).expect("golden mean lies in (0,1)")
    }

    /// `sum_k 10^(-k!)` truncated to 30 decimal digits.
    pub fn liouville_like() -> Self {
        let phi = (1..=4u32)
            .map(|k| 10f64.powi(-((1..=k).product::<u32>() as i32)))
            .sum();
        Self::new(phi).expect("Liouville-like angle lies in (0,1)")
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn lambda_bar(&self) -> Complex64 {
        self.lambda.conj()
    }

    pub fn cf_terms(&self) -> Option<&[u64]> {
        self.cf_terms.as_deref()
    }

    /// Exact `(p, q)` when the angle is known to be rational.
    pub fn ratio(&self) -> Option<(u64, u64)> {
        self.ratio
    }

    /// `exp(2 pi i k phi)` evaluated directly.
    pub fn lambda_pow(&self, k: i64) -> Complex64 {
        let turns = match self.ratio {
            Some((p, q)) => (k.rem_euclid(q as i64) as u64 * p % q) as f64 / q as f64,
            None => (k as f64 * self.phi).rem_euclid(1.0),
        };
        Complex64::from_polar(1.0, TAU * turns)
    }

    /// `lambda^0, lambda^1, ...` by accumulated multiplication.
    pub fn powers(&self) -> LambdaPowers {
        LambdaPowers { lambda: self.lambda, current: Complex64::new(1.0, 0.0), k: 0 }
    }

    /// `omega(m) = min_{2<=k<=m} |lambda^k - lambda|`.
    pub fn small_divisor(&self, m: u64) -> Result<f64> {
        if m < 2 {
            return Err(Error::Domain(format!("small divisor needs m >= 2, got {m}")));
        }
        Ok(*self.small_divisor_table(&[m]).last().expect("one entry"))
    }

    /// `omega(m)` for every `m` in the ascending list `ms`, in one scan.
    fn small_divisor_table(&self, ms: &[u64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(ms.len());
        let mut best = f64::INFINITY;
        let mut k = 2u64;
        let mut pw = self.powers();
        pw.next();
        pw.next();
        for &m in ms {
            while k <= m {
                let lk = pw.next().expect("infinite iterator");
                let d = match self.ratio {
                    Some((p, q)) => {
                        let r = ((k - 1) % q) * p % q;
                        if r == 0 {
                            0.0
                        } else {
                            2.0 * (PI * r as f64 / q as f64).sin().abs()
                        }
                    }
                    None => (lk - self.lambda).norm(),
                };
                best = best.min(d);
                k += 1;
            }
            out.push(best);
        }
        out
    }

    /// `omega(2^nu)` for `nu = 1..=n`.
    pub fn dyadic_small_divisors(&self, n: u32) -> Vec<f64> {
        let ms: Vec<u64> = (1..=n).map(|nu| 1u64 << nu).collect();
        self.small_divisor_table(&ms)
    }

    /// `S_N = -sum_{nu=1}^N 2^-nu log omega(2^nu)`; infinite when some omega vanishes.
    pub fn brjuno_partial_sum(&self, n: u32) -> Result<f64> {
        if n < 1 {
            return Err(Error::Domain("Brjuno partial sum needs N >= 1".into()));
        }
        Ok(*partial_sums(&self.dyadic_small_divisors(n)).last().expect("N >= 1"))
    }

    pub fn brjuno_report(&self, n: u32) -> Result<BrjunoReport> {
        self.brjuno_report_with(n, BrjunoThresholds::default())
    }

    pub fn brjuno_report_with(&self, n: u32, th: BrjunoThresholds) -> Result<BrjunoReport> {
        if n < 2 {
            return Err(Error::Domain("Brjuno report needs N >= 2".into()));
        }
        let omegas_ext = self.dyadic_small_divisors(n + 1);
        let sums_ext = partial_sums(&omegas_ext);
        let omegas = omegas_ext[..n as usize].to_vec();
        let partial_sums = sums_ext[..n as usize].to_vec();
        let increments: Vec<f64> = sums_ext.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let tail_increment = *increments.last().expect("N >= 2");
        let logs: Vec<f64> = omegas_ext.iter().map(|w| -w.ln()).collect();
        let max_log_jump = logs
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        let verdict = if omegas_ext.contains(&0.0) {
            BrjunoVerdict::DivergentRational
        } else if max_log_jump > th.log_jump {
            BrjunoVerdict::LikelyDivergent
        } else if tail_increment < th.tail_increment {
            BrjunoVerdict::LikelyConvergent
        } else {
            BrjunoVerdict::Inconclusive
        };
        Ok(BrjunoReport {
            phi: self.phi,
            n_terms: n,
            omegas,
            partial_sums,
            increments,
            tail_increment,
            max_log_jump,
            verdict,
            heuristic: true,
            thresholds: th,
        })
    }
}

fn partial_sums(omegas: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    omegas
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            acc -= (w.ln()) * 0.5f64.powi(i as i32 + 1);
            acc
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct LambdaPowers {
    lambda: Complex64,
    current: Complex64,
    k: usize,
}

impl Iterator for LambdaPowers {
    type Item = Complex64;
    fn next(&mut self) -> Option<Complex64> {
        let out = self.current;
        self.k += 1;
        self.current *= self.lambda;
        if self.k.is_multiple_of(RENORM_PERIOD) {
            self.current /= self.current.norm();
        }
        Some(out)
    }
}

/// Continued fraction partial quotients of `x` in (0,1), from the f64 value.
pub fn cf_expansion(x: f64, max_terms: usize) -> Vec<u64> {
    let mut terms = Vec::new();
    let mut y = x;
    while terms.len() < max_terms && y > 1e-12 {
        let inv = 1.0 / y;
        let a = inv.floor();
        if a > 1e12 {
            break;
        }
        terms.push(a as u64);
        y = inv - a;
    }
    terms
}

/// Convergent denominators of `x` in (0,1) not exceeding `max_q`.
pub fn convergent_denominators(x: f64, max_q: u64) -> Vec<u64> {
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut out = vec![1];
    for a in cf_expansion(x, 64) {
        let next = a.saturating_mul(q).saturating_add(q_prev);
        if next > max_q {
            break;
        }
        (q_prev, q) = (q, next);
        if out.last() != Some(&q) {
            out.push(q);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrjunoThresholds {
    /// `|S_{N+1} - S_N|` below this reads as likely convergent.
    pub tail_increment: f64,
    /// A jump of `-log omega(2^nu)` above this reads as likely divergent.
    pub log_jump: f64,
}

impl Default for BrjunoThresholds {
    fn default() -> Self {
        BrjunoThresholds { tail_increment: 1e-3, log_jump: 3.0 * LN_2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BrjunoVerdict {
    LikelyConvergent,
    LikelyDivergent,
    Inconclusive,
    DivergentRational,
}

/// Finite-data diagnostic; the verdict is a heuristic label only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrjunoReport {
    pub phi: f64,
    pub n_terms: u32,
    /// `omega(2^nu)`, `nu = 1..=N`.
    pub omegas: Vec<f64>,
    /// `S_1..S_N`.
    pub partial_sums: Vec<f64>,
    /// `|S_{nu+1} - S_nu|`, `nu = 1..=N`.
    pub increments: Vec<f64>,
    pub tail_increment: f64,
    pub max_log_jump: f64,
    pub verdict: BrjunoVerdict,
    pub heuristic: bool,
    pub thresholds: BrjunoThresholds,
}
