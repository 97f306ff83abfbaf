//! Limits of slowly converging orbit sequences.
//!
//! Along a basin orbit the error terms of every estimator are series in
//! `log^j(s) / s^p` with `s = m + Re U_0`. A sequence `T_m` is reduced to
//! smooth-window means over geometric blocks `s in [S, rho S)`, `S = S_0 rho^k`,
//! and the block means are fed through Richardson levels, each removing one
//! `log^j(s)/s^p` term. `rho = 2` unless the shift is large. The `sin^2` window damps the oscillating
//! contributions that rotation phases add.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolator {
    /// Smallest first-block start `S_0`.
    pub n_start: usize,
    /// Power `p` eliminated by each Richardson level; repeat a power once per log factor.
    pub orders: Vec<u32>,
    /// Fewest levels an accepted value may use.
    pub min_levels: usize,
    /// Block ratio is `min(2, 1 + wide_shift / S_0)`.
    pub wide_shift: usize,
}

impl Default for Extrapolator {
    fn default() -> Self {
        Extrapolator { n_start: 16, orders: vec![1, 1, 2, 2, 2, 2, 3, 3], min_levels: 2, wide_shift: 1 << 17 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    /// Difference of the last two values at the chosen level.
    pub increment: f64,
    /// Sequence terms consumed.
    pub n_used: usize,
    pub levels: usize,
}

impl Extrapolator {
    fn first_block(&self, shift: usize) -> usize {
        self.n_start.max(shift)
    }

    pub fn ratio(&self, shift: usize) -> f64 {
        (1.0 + self.wide_shift as f64 / self.first_block(shift) as f64).min(2.0)
    }

    /// Start of block `k` in `s`.
    fn boundary(&self, k: usize, shift: usize) -> usize {
        let s0 = self.first_block(shift);
        let rho = self.ratio(shift);
        if rho == 2.0 {
            s0 << k
        } else {
            (s0 as f64 * rho.powi(k as i32)).round() as usize
        }
    }

    /// Sequence length covering `blocks` complete blocks.
    pub fn len_for_blocks(&self, blocks: usize, shift: usize) -> usize {
        self.boundary(blocks, shift) - shift
    }

    fn block_means(&self, seq: &[Complex64], shift: usize) -> Vec<Complex64> {
        let mut means = Vec::new();
        let mut k = 0;
        while self.len_for_blocks(k + 1, shift) <= seq.len() {
            let (a, b) = (self.boundary(k, shift), self.boundary(k + 1, shift));
            let width = (b - a) as f64;
            let (mut acc, mut wsum) = (Complex64::new(0.0, 0.0), 0.0);
            for (i, t) in seq[a - shift..b - shift].iter().enumerate() {
                let w = (PI * (i as f64 + 0.5) / width).sin().powi(2);
                acc += t * w;
                wsum += w;
            }
            means.push(acc / wsum);
            k += 1;
        }
        means
    }

    /// Extrapolated limit from the complete blocks of `seq`, whose term `m`
    /// sits at `s = m + shift`. Returns the shallowest level whose last
    /// increment is below `tol`, otherwise the deepest level available.
    pub fn extrapolate(&self, seq: &[Complex64], shift: usize, tol: f64) -> Option<Extrapolated> {
        let means = self.block_means(seq, shift);
        let n_used = self.len_for_blocks(means.len(), shift);
        let rho = self.ratio(shift);
        let mut level = means;
        let mut best = None;
        for (depth, &p) in self.orders.iter().enumerate() {
            let f = rho.powi(p as i32);
            level = level.windows(2).map(|w| (w[1] * f - w[0]) / (f - 1.0)).collect();
            let k = level.len();
            if k < 2 {
                break;
            }
            let e = Extrapolated {
                value: level[k - 1],
                increment: (level[k - 1] - level[k - 2]).norm(),
                n_used,
                levels: depth + 1,
            };
            if depth + 1 >= self.min_levels {
                if e.increment < tol {
                    return Some(e);
                }
                best = Some(e);
            }
        }
        best
    }

    /// Doubles the number of blocks until an increment drops below `tol`.
    /// `eval(len)` must return the extrapolation over the first `len` terms.
    pub fn converge(
        &self,
        tol: f64,
        n_max: usize,
        shift: usize,
        mut eval: impl FnMut(usize) -> Result<Option<Extrapolated>>,
    ) -> Result<Extrapolated> {
        let mut blocks = self.min_levels + 2;
        let mut last_increment = f64::INFINITY;
        loop {
            let len = self.len_for_blocks(blocks, shift);
            if len > n_max {
                return Err(Error::NoConvergence { n_max, last_increment });
            }
            if let Some(e) = eval(len)? {
                if e.increment < tol {
                    return Ok(e);
                }
                last_increment = e.increment;
            }
            blocks += 1;
        }
    }
}

/// Block shift for an orbit starting at `U_0`.
pub fn shift_for(u0: Complex64) -> usize {
    if u0.re.is_finite() && u0.re > 0.0 {
        u0.re.round() as usize
    } else {
        0
    }
}
