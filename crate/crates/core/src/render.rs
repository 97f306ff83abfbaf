//! Membership rasters of the lifted basin for a fixed `|y|` slice.

use crate::error::{Error, Result};
use crate::regions::{in_basin_up, BasinParams};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::Write;

const MEMBER: [u8; 3] = [32, 96, 200];
const BACKGROUND: [u8; 3] = [240, 240, 236];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<u8>,
    pub members: usize,
}

impl Raster {
    fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut rgb = Vec::with_capacity(width * height * 3);
        let mut members = 0;
        for row in 0..height {
            for col in 0..width {
                let hit = f(col, row);
                members += hit as usize;
                rgb.extend_from_slice(if hit { &MEMBER } else { &BACKGROUND });
            }
        }
        Raster { width, height, rgb, members }
    }

    pub fn is_empty_region(&self) -> bool {
        self.members == 0
    }

    /// Binary P6 portable pixmap.
    pub fn write_p6<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.rgb)?;
        Ok(())
    }
}

/// Pixel centre of cell `i` out of `n` spanning `[a, b]`.
fn cell(i: usize, n: usize, a: f64, b: f64) -> f64 {
    a + (b - a) * (i as f64 + 0.5) / n as f64
}

/// The `log|x|` window shown for slice `|y| = s`: the exponent band plus a margin.
pub fn log_x_window(p: &BasinParams, s: f64) -> (f64, f64) {
    let g = p.gamma();
    let (a, b) = ((1.0 / g - 1.0) * s.ln(), (g - 1.0) * s.ln());
    let (lo, hi) = (a.min(b), a.max(b));
    let margin = 0.25 * (hi - lo).max(4.0);
    (lo - margin, hi + margin)
}

/// Panel over `(log|x|, arg x)` with `y = s` real, and panel over `(arg x, arg y)`
/// with `|y| = s` and `|x|` at the centre of the exponent band.
pub fn render_slices(p: &BasinParams, s: f64, width: usize, height: usize) -> Result<(Raster, Raster)> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("slice |y| = {s} must be positive")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Domain("raster needs at least one pixel".into()));
    }
    let (lx0, lx1) = log_x_window(p, s);
    let y = Complex64::new(s, 0.0);
    let modulus = Raster::from_fn(width, height, |col, row| {
        let lx = cell(col, width, lx0, lx1);
        let ax = cell(height - 1 - row, height, -PI, PI);
        in_basin_up(Complex64::from_polar(lx.exp(), ax), y, p)
    });
    let mid = (0.5 * (lx0 + lx1)).exp();
    let argument = Raster::from_fn(width, height, |col, row| {
        let ax = cell(col, width, -PI, PI);
        let ay = cell(height - 1 - row, height, -PI, PI);
        in_basin_up(Complex64::from_polar(mid, ax), Complex64::from_polar(s, ay), p)
    });
    Ok((modulus, argument))
}
