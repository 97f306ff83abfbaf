//! The downstairs germ, its lift through the blow-up chart, inverses and
//! derivatives.
//!
//! Downstairs the map is
//! `(z, w) -> (lambda z f + w q1(z,w), conj(lambda) w f + w q2(z,w))` with
//! `f = 1 - zw/2`. Upstairs coordinates are `(x, y) = (z/w, w)`.

use crate::dd::{ComplexField, DdComplex};
use crate::error::{Error, Result};
use crate::rotation::RotationNumber;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Orbits stop once a coordinate exceeds this modulus.
pub const OVERFLOW_GUARD: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: Complex64,
    pub j: u32,
    pub k: u32,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.j + self.k
    }
}

fn ipow<T: ComplexField>(base: T, mut e: u32) -> T {
    let mut acc = T::one();
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b;
        }
        b = b * b;
        e >>= 1;
    }
    acc
}

/// `q(z, w) = sum coeff * z^j * w^k`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerturbationPoly {
    pub terms: Vec<Monomial>,
}

impl PerturbationPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: Complex64, j: u32, k: u32) -> Self {
        PerturbationPoly { terms: vec![Monomial { coeff, j, k }] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == Complex64::new(0.0, 0.0))
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.iter().map(Monomial::degree).min()
    }

    pub fn eval<T: ComplexField>(&self, z: T, w: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| {
            acc + T::from_c64(t.coeff) * ipow(z, t.j) * ipow(w, t.k)
        })
    }

    fn d_dz(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.j > 0)
            .map(|t| t.coeff * t.j as f64 * ipow(z, t.j - 1) * ipow(w, t.k))
            .sum()
    }

    fn d_dw(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.k > 0)
            .map(|t| t.coeff * t.k as f64 * ipow(z, t.j) * ipow(w, t.k - 1))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Down,
    Up,
}

/// A point tagged with its chart: `(z, w)` downstairs or `(x, y)` upstairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: Chart,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl ChartPoint {
    pub fn down(z: Complex64, w: Complex64) -> Self {
        ChartPoint { chart: Chart::Down, c1: z, c2: w }
    }

    pub fn up(x: Complex64, y: Complex64) -> Self {
        ChartPoint { chart: Chart::Up, c1: x, c2: y }
    }

    /// `(z, w) = (xy, y)`; always defined.
    pub fn to_down(self) -> Self {
        match self.chart {
            Chart::Down => self,
            Chart::Up => ChartPoint::down(self.c1 * self.c2, self.c2),
        }
    }

    /// `(x, y) = (z/w, w)`; needs `w != 0`.
    pub fn to_up(self) -> Result<Self> {
        match self.chart {
            Chart::Up => Ok(self),
            Chart::Down if self.c2 == Complex64::new(0.0, 0.0) => {
                Err(Error::Domain("w = 0 has no upstairs chart image".into()))
            }
            Chart::Down => Ok(ChartPoint::up(self.c1 / self.c2, self.c2)),
        }
    }

    pub fn to_chart(self, chart: Chart) -> Result<Self> {
        match chart {
            Chart::Down => Ok(self.to_down()),
            Chart::Up => self.to_up(),
        }
    }

    /// `u = zw = xy^2`.
    pub fn product(&self) -> Complex64 {
        match self.chart {
            Chart::Down => self.c1 * self.c2,
            Chart::Up => self.c1 * self.c2 * self.c2,
        }
    }

    /// The coordinate that decays like `n^{-1/2}` along basin orbits (`w` or `y`).
    pub fn fiber(&self) -> Complex64 {
        self.c2
    }

    pub fn max_modulus(&self) -> f64 {
        self.c1.norm().max(self.c2.norm())
    }
}

/// A chart point carried in double-double precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisePoint {
    pub chart: Chart,
    pub c1: DdComplex,
    pub c2: DdComplex,
}

impl From<ChartPoint> for PrecisePoint {
    fn from(p: ChartPoint) -> Self {
        PrecisePoint { chart: p.chart, c1: p.c1.into(), c2: p.c2.into() }
    }
}

impl From<PrecisePoint> for ChartPoint {
    fn from(p: PrecisePoint) -> Self {
        ChartPoint { chart: p.chart, c1: p.c1.into(), c2: p.c2.into() }
    }
}

impl PrecisePoint {
    pub fn product(&self) -> DdComplex {
        match self.chart {
            Chart::Down => self.c1 * self.c2,
            Chart::Up => self.c1 * self.c2 * self.c2,
        }
    }
}

/// Model map plus perturbation polynomials and the order `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFamily {
    rot: RotationNumber,
    l: u32,
    q1: PerturbationPoly,
    q2: PerturbationPoly,
    lambda_dd: DdComplex,
}

impl MapFamily {
    /// Every monomial of `q1`, `q2` must have total degree at least `l`, and `l >= 4`.
    pub fn new(rot: RotationNumber, l: u32, q1: PerturbationPoly, q2: PerturbationPoly) -> Result<Self> {
        if l < 4 {
            return Err(Error::Domain(format!("order l = {l} must be at least 4")));
        }
        for (name, q) in [("q1", &q1), ("q2", &q2)] {
            if let Some(d) = q.min_degree() {
                if d < l {
                    return Err(Error::Domain(format!(
                        "{name} has a monomial of degree {d} below l = {l}"
                    )));
                }
            }
        }
        let lambda_dd = DdComplex::from(rot.lambda()).normalized();
        Ok(MapFamily { rot, l, q1, q2, lambda_dd })
    }

    /// The unperturbed map `F_N`.
    pub fn model(rot: RotationNumber) -> Self {
        Self::new(rot, 4, PerturbationPoly::zero(), PerturbationPoly::zero())
            .expect("model map is valid")
    }

    /// `q1 = a z^l`, `q2 = b w^l`.
    pub fn default_perturbed(rot: RotationNumber, l: u32, a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(rot, l, PerturbationPoly::monomial(a, l, 0), PerturbationPoly::monomial(b, 0, l))
    }

    pub fn rotation(&self) -> &RotationNumber {
        &self.rot
    }

    pub fn order(&self) -> u32 {
        self.l
    }

    pub fn q1(&self) -> &PerturbationPoly {
        &self.q1
    }

    pub fn q2(&self) -> &PerturbationPoly {
        &self.q2
    }

    pub fn is_model(&self) -> bool {
        self.q1.is_zero() && self.q2.is_zero()
    }

    #[inline]
    fn down_with<T: ComplexField>(&self, lam: T, lam_bar: T, z: T, w: T) -> (T, T) {
        let f = T::one() - (z * w).scale(0.5);
        let mut z1 = lam * z * f;
        let mut w1 = lam_bar * w * f;
        if !self.q1.terms.is_empty() {
            z1 = z1 + w * self.q1.eval(z, w);
        }
        if !self.q2.terms.is_empty() {
            w1 = w1 + w * self.q2.eval(z, w);
        }
        (z1, w1)
    }

    /// Upstairs step, dividing the common factor `w = y` out symbolically:
    /// `x1 = (lambda x f + q1)/(conj(lambda) f + q2)`, `y1 = y (conj(lambda) f + q2)`.
    #[inline]
    fn up_with<T: ComplexField>(&self, lam: T, lam_bar: T, x: T, y: T, is_zero: impl Fn(T) -> bool) -> Option<(T, T)> {
        if is_zero(y) {
            return Some((lam * lam * x, y));
        }
        let z = x * y;
        let f = T::one() - (z * y).scale(0.5);
        let mut num = lam * x * f;
        let mut den = lam_bar * f;
        if !self.q1.terms.is_empty() {
            num = num + self.q1.eval(z, y);
        }
        if !self.q2.terms.is_empty() {
            den = den + self.q2.eval(z, y);
        }
        if is_zero(den) {
            return None;
        }
        Some((num / den, y * den))
    }

    pub fn apply_down(&self, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
        self.down_with(self.rot.lambda(), self.rot.lambda_bar(), z, w)
    }

    pub fn apply_up(&self, x: Complex64, y: Complex64) -> Result<(Complex64, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        self.up_with(self.rot.lambda(), self.rot.lambda_bar(), x, y, |t| t == zero)
            .ok_or(Error::ChartExit { step: 1 })
    }

    /// One step in whichever chart `p` lives in.
    pub fn step(&self, p: ChartPoint) -> Result<ChartPoint> {
        match p.chart {
            Chart::Down => {
                let (z, w) = self.apply_down(p.c1, p.c2);
                Ok(ChartPoint::down(z, w))
            }
            Chart::Up => {
                let (x, y) = self.apply_up(p.c1, p.c2)?;
                Ok(ChartPoint::up(x, y))
            }
        }
    }

    /// One double-double step; `None` on chart exit.
    pub fn step_precise(&self, p: PrecisePoint) -> Option<PrecisePoint> {
        let lam = self.lambda_dd;
        let lam_bar = lam.conj();
        match p.chart {
            Chart::Down => {
                let (c1, c2) = self.down_with(lam, lam_bar, p.c1, p.c2);
                Some(PrecisePoint { chart: Chart::Down, c1, c2 })
            }
            Chart::Up => {
                let (c1, c2) = self.up_with(lam, lam_bar, p.c1, p.c2, |t| t == DdComplex::ZERO)?;
                Some(PrecisePoint { chart: Chart::Up, c1, c2 })
            }
        }
    }

    /// `x1 - lambda^2 x`, the upstairs remainder of the lift.
    pub fn lift_remainder(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        let (x1, _) = self.apply_up(x, y)?;
        Ok(x1 - self.rot.lambda() * self.rot.lambda() * x)
    }

    /// Analytic Jacobian `[[dz1/dz, dz1/dw], [dw1/dz, dw1/dw]]`.
    pub fn jacobian_down(&self, z: Complex64, w: Complex64) -> [[Complex64; 2]; 2] {
        let lam = self.rot.lambda();
        let lam_bar = self.rot.lambda_bar();
        let f = 1.0 - z * w * 0.5;
        let (fz, fw) = (-w * 0.5, -z * 0.5);
        let (q1, q2) = (self.q1.eval(z, w), self.q2.eval(z, w));
        [
            [
                lam * (f + z * fz) + w * self.q1.d_dz(z, w),
                lam * z * fw + q1 + w * self.q1.d_dw(z, w),
            ],
            [
                lam_bar * w * fz + w * self.q2.d_dz(z, w),
                lam_bar * (f + w * fw) + q2 + w * self.q2.d_dw(z, w),
            ],
        ]
    }

    /// Damped Newton solve of `apply_down(p) = target` from `guess`.
    pub fn invert_down(&self, target: (Complex64, Complex64), guess: (Complex64, Complex64)) -> Result<(Complex64, Complex64)> {
        const MAX_ITER: usize = 64;
        const TOL: f64 = 1e-12;
        let residual = |p: (Complex64, Complex64)| {
            let (a, b) = self.apply_down(p.0, p.1);
            (a - target.0, b - target.1)
        };
        let norm = |r: (Complex64, Complex64)| (r.0.norm_sqr() + r.1.norm_sqr()).sqrt();
        let mut p = guess;
        let mut r = residual(p);
        let mut rn = norm(r);
        for _ in 0..MAX_ITER {
            if rn < TOL {
                return Ok(p);
            }
            let [[a, b], [c, d]] = self.jacobian_down(p.0, p.1);
            let det = a * d - b * c;
            if det.norm() < 1e-300 || !det.is_finite() {
                return Err(Error::InversionFailure("singular Jacobian".into()));
            }
            let dz = (d * r.0 - b * r.1) / det;
            let dw = (a * r.1 - c * r.0) / det;
            let mut t = 1.0;
            loop {
                let cand = (p.0 - dz * t, p.1 - dw * t);
                let rc = residual(cand);
                let rcn = norm(rc);
                if rcn < rn || t < 1e-9 {
                    p = cand;
                    r = rc;
                    rn = rcn;
                    break;
                }
                t *= 0.5;
            }
        }
        if rn < TOL {
            Ok(p)
        } else {
            Err(Error::InversionFailure(format!(
                "residual {rn:.3e} after {MAX_ITER} iterations"
            )))
        }
    }

    /// Newton inverse started from the linear guess `diag(conj(lambda), lambda) target`.
    pub fn preimage_down(&self, target: (Complex64, Complex64)) -> Result<(Complex64, Complex64)> {
        let guess = (self.rot.lambda_bar() * target.0, self.rot.lambda() * target.1);
        self.invert_down(target, guess)
    }

    /// Orbit `p_0, ..., p_N` iterated in double-double and recorded in f64.
    pub fn orbit(&self, p0: ChartPoint, n: usize) -> OrbitRecord {
        let mut points = Vec::with_capacity(n + 1);
        points.push(p0);
        let mut stop = None;
        let mut cur = PrecisePoint::from(p0);
        for step in 1..=n {
            match self.step_precise(cur) {
                None => {
                    stop = Some(OrbitStop::ChartExit { step });
                    break;
                }
                Some(next) => {
                    let q = ChartPoint::from(next);
                    if !(q.max_modulus() <= OVERFLOW_GUARD) {
                        stop = Some(OrbitStop::Overflow { step });
                        break;
                    }
                    points.push(q);
                    cur = next;
                }
            }
        }
        OrbitRecord { points, stop }
    }

    pub fn orbit_up(&self, x: Complex64, y: Complex64, n: usize) -> OrbitRecord {
        self.orbit(ChartPoint::up(x, y), n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OrbitStop {
    ChartExit { step: usize },
    Overflow { step: usize },
}

impl OrbitStop {
    pub fn step(&self) -> usize {
        match *self {
            OrbitStop::ChartExit { step } | OrbitStop::Overflow { step } => step,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    pub points: Vec<ChartPoint>,
    pub stop: Option<OrbitStop>,
}

impl OrbitRecord {
    /// `U_n = 1/(x_n y_n^2)`, `None` where the product vanishes.
    pub fn u_values(&self) -> Vec<Option<Complex64>> {
        self.points
            .iter()
            .map(|p| {
                let u = p.product();
                (u != Complex64::new(0.0, 0.0)).then(|| 1.0 / u)
            })
            .collect()
    }

    /// CSV with columns `n, re_x, im_x, re_y, im_y, re_U, im_U`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "re_x", "im_x", "re_y", "im_y", "re_U", "im_U"])?;
        for (n, (p, u)) in self.points.iter().zip(self.u_values()).enumerate() {
            let (ur, ui) = match u {
                Some(u) => (u.re.to_string(), u.im.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([
                n.to_string(),
                p.c1.re.to_string(),
                p.c1.im.to_string(),
                p.c2.re.to_string(),
                p.c2.im.to_string(),
                ur,
                ui,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quarter() -> MapFamily {
        MapFamily::model(RotationNumber::new(0.25).unwrap())
    }

    #[test]
    fn origin_is_fixed() {
        let fam = MapFamily::default_perturbed(RotationNumber::golden_mean(), 4, c(0.1, 0.0), c(0.1, 0.0)).unwrap();
        assert_eq!(fam.apply_down(c(0.0, 0.0), c(0.0, 0.0)), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn quarter_turn_model_values() {
        let fam = quarter();
        let (z1, w1) = fam.apply_down(c(1.0, 0.0), c(1.0, 0.0));
        assert!((z1 - c(0.0, 0.5)).norm() < 1e-15);
        assert!((w1 - c(0.0, -0.5)).norm() < 1e-15);
        let (x1, y1) = fam.apply_up(c(1.0, 0.0), c(0.1, 0.0)).unwrap();
        assert!((x1 - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((y1 - c(0.0, -0.0995)).norm() < 1e-15);
        let j = fam.jacobian_down(c(1.0, 0.0), c(1.0, 0.0));
        assert!(j[0][0].norm() < 1e-15);
    }

    #[test]
    fn siegel_curve_rotates() {
        let fam = MapFamily::model(RotationNumber::golden_mean());
        let lam = fam.rotation().lambda();
        let (x1, y1) = fam.apply_up(c(0.3, 0.2), c(0.0, 0.0)).unwrap();
        assert_eq!(y1, c(0.0, 0.0));
        assert_eq!(x1, lam * lam * c(0.3, 0.2));
        let (z1, w1) = fam.apply_down(c(0.3, 0.2), c(0.0, 0.0));
        assert_eq!((z1, w1), (lam * c(0.3, 0.2), c(0.0, 0.0)));
    }

    #[test]
    fn jacobian_at_origin_is_linear_part() {
        let fam = MapFamily::default_perturbed(RotationNumber::golden_mean(), 4, c(0.1, 0.0), c(0.1, 0.0)).unwrap();
        let j = fam.jacobian_down(c(0.0, 0.0), c(0.0, 0.0));
        let lam = fam.rotation().lambda();
        assert_eq!(j, [[lam, c(0.0, 0.0)], [c(0.0, 0.0), lam.conj()]]);
    }

    #[test]
    fn inverse_of_origin_and_axis() {
        let fam = MapFamily::model(RotationNumber::golden_mean());
        let zero = c(0.0, 0.0);
        assert_eq!(fam.invert_down((zero, zero), (zero, zero)).unwrap(), (zero, zero));
        let lam = fam.rotation().lambda();
        let (z, w) = fam.preimage_down((lam * c(0.4, -0.1), zero)).unwrap();
        assert!((z - c(0.4, -0.1)).norm() < 1e-12 && w.norm() < 1e-12);
    }

    #[test]
    fn siegel_orbit_record() {
        let fam = MapFamily::model(RotationNumber::golden_mean());
        let rec = fam.orbit_up(c(0.7, 0.0), c(0.0, 0.0), 5);
        assert_eq!(rec.points.len(), 6);
        assert!(rec.stop.is_none());
        assert!(rec.u_values().iter().all(Option::is_none));
        for (n, p) in rec.points.iter().enumerate() {
            let expect = fam.rotation().lambda_pow(2 * n as i64) * 0.7;
            assert!((p.c1 - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn overflow_guard_fires() {
        let fam = MapFamily::model(RotationNumber::golden_mean());
        let rec = fam.orbit_up(c(10.0, 0.0), c(10.0, 0.0), 50);
        assert!(matches!(rec.stop, Some(OrbitStop::Overflow { .. })));
    }

    #[test]
    fn low_degree_perturbation_rejected() {
        let rot = RotationNumber::golden_mean();
        let q = PerturbationPoly::monomial(c(1.0, 0.0), 2, 1);
        assert!(MapFamily::new(rot.clone(), 4, q, PerturbationPoly::zero()).is_err());
        assert!(MapFamily::new(rot, 3, PerturbationPoly::zero(), PerturbationPoly::zero()).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let fam = MapFamily::model(RotationNumber::golden_mean());
        let rec = fam.orbit_up(c(1.0, 0.0), c(0.1, 0.0), 2);
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,re_x,im_x,re_y,im_y,re_U,im_U"));
        assert_eq!(lines.count(), 3);
    }
}
