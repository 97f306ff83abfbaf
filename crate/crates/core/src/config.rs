//! Run configuration, read from TOML.
//!
//! ```toml
//! seed = 20240601
//! out_dir = "out"
//!
//! [rotation]
//! phi = 0.6180339887498949     # or: cf = [0, 1, 1, 1, ...]
//!
//! [family]
//! map = "model"                # family used by single-map commands
//! l = 4
//! a = [0.1, 0.0]               # q1 = a z^l
//! b = [0.1, 0.0]               # q2 = b w^l
//!
//! [basin]
//! r = "auto"                   # or a number
//! theta = 0.4
//! beta = 0.3
//! ```

use crate::coords::CoordSettings;
use crate::error::{Error, Result};
use crate::germ::{Chart, ChartPoint, MapFamily};
use crate::regions::{find_r0, BasinParams, R0Search};
use crate::rotation::RotationNumber;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationConfig {
    pub phi: Option<f64>,
    pub cf: Option<Vec<u64>>,
}

impl Default for RotationConfig {
    fn default() -> Self {
        RotationConfig { phi: Some(RotationNumber::golden_mean().phi()), cf: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapChoice {
    Model,
    Perturbed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub map: MapChoice,
    pub l: u32,
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig { map: MapChoice::Model, l: 4, a: [0.1, 0.0], b: [0.1, 0.0] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiusSetting {
    Fixed(f64),
    Named(AutoRadius),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoRadius {
    Auto,
}

impl RadiusSetting {
    pub const AUTO: RadiusSetting = RadiusSetting::Named(AutoRadius::Auto);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasinConfig {
    pub r: RadiusSetting,
    pub theta: f64,
    pub beta: f64,
    /// Upper end of the `r0` search.
    pub r_hi: f64,
}

impl Default for BasinConfig {
    fn default() -> Self {
        BasinConfig { r: RadiusSetting::AUTO, theta: 0.4, beta: 0.3, r_hi: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoordsConfig {
    pub tol: f64,
    pub n_max: usize,
    pub entry_max: usize,
}

impl Default for CoordsConfig {
    fn default() -> Self {
        let s = CoordSettings::default();
        CoordsConfig { tol: s.tol, n_max: s.n_max, entry_max: s.entry_max }
    }
}

/// Start point and length for the single-orbit commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitConfig {
    pub chart: Chart,
    pub p1: [f64; 2],
    pub p2: [f64; 2],
    pub n: usize,
    pub tail_frac: f64,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { chart: Chart::Up, p1: [0.5, 0.0], p2: [0.1, 0.0], n: 100_000, tail_frac: 0.5 }
    }
}

impl OrbitConfig {
    pub fn start(&self) -> ChartPoint {
        let (c1, c2) = (Complex64::new(self.p1[0], self.p1[1]), Complex64::new(self.p2[0], self.p2[1]));
        match self.chart {
            Chart::Up => ChartPoint::up(c1, c2),
            Chart::Down => ChartPoint::down(c1, c2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub slice: f64,
    pub width: usize,
    pub height: usize,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig { slice: 0.1, width: 480, height: 320 }
    }
}

/// Sample counts and lengths of the verification suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub brjuno_terms: u32,
    pub chart_points: usize,
    pub invariance_samples: usize,
    pub attraction_steps: usize,
    pub asymptotic_samples: usize,
    pub asymptotic_n: usize,
    pub c_n_min: usize,
    pub c_n_max: usize,
    /// Model-map samples for the coordinate functional equations.
    pub coord_samples: usize,
    /// Perturbed-family samples for the same equations.
    pub perturbed_coord_samples: usize,
    pub cross_samples: usize,
    pub deep_u: Vec<f64>,
    /// `Phi`/`Psi` samples per chart; half are pulled back to entry times above 10.
    pub phi_samples: usize,
    pub circle_samples: usize,
    pub circle_n: [usize; 2],
    pub rotation_n: usize,
    pub check_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            brjuno_terms: 12,
            chart_points: 10_000,
            invariance_samples: 1000,
            attraction_steps: 10_000,
            asymptotic_samples: 20,
            asymptotic_n: 100_000,
            c_n_min: 1000,
            c_n_max: 10_000,
            coord_samples: 100,
            perturbed_coord_samples: 20,
            cross_samples: 20,
            deep_u: vec![1e4, 2e4, 4e4],
            phi_samples: 100,
            circle_samples: 5,
            circle_n: [10_000, 100_000],
            rotation_n: 100_000,
            check_tol: 1e-6,
        }
    }
}

impl SuiteConfig {
    /// Reduced sizes for smoke runs.
    pub fn quick() -> Self {
        SuiteConfig {
            chart_points: 1000,
            invariance_samples: 100,
            asymptotic_samples: 3,
            coord_samples: 6,
            perturbed_coord_samples: 3,
            cross_samples: 3,
            deep_u: vec![1e4],
            phi_samples: 6,
            circle_samples: 1,
            ..SuiteConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub rotation: RotationConfig,
    pub family: FamilyConfig,
    pub basin: BasinConfig,
    pub coords: CoordsConfig,
    pub orbit: OrbitConfig,
    pub render: RenderConfig,
    pub suite: SuiteConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 20_240_601,
            out_dir: PathBuf::from("out"),
            rotation: RotationConfig::default(),
            family: FamilyConfig::default(),
            basin: BasinConfig::default(),
            coords: CoordsConfig::default(),
            orbit: OrbitConfig::default(),
            render: RenderConfig::default(),
            suite: SuiteConfig::default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    /// Parses and validates; a file must name the rotation explicitly.
    pub fn from_toml(text: &str) -> Result<(Self, Vec<String>)> {
        let value: toml::Table = text.parse().map_err(|e: toml::de::Error| config_err(e.to_string()))?;
        if !value.get("rotation").and_then(|r| r.as_table()).is_some_and(|r| r.contains_key("phi") || r.contains_key("cf")) {
            return Err(config_err("missing [rotation] phi or cf"));
        }
        let cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        let warnings = cfg.validate()?;
        Ok((cfg, warnings))
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<String>)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every invariant; returns warnings for conditions reported but not enforced.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        self.rotation()?;
        let f = &self.family;
        if f.l < 4 {
            return Err(config_err(format!("family.l = {} must be >= 4", f.l)));
        }
        if f.a.iter().chain(&f.b).any(|v| !v.is_finite()) {
            return Err(config_err("perturbation coefficients must be finite"));
        }
        let b = &self.basin;
        if !(b.theta > 0.0 && b.theta < FRAC_PI_2) {
            return Err(config_err(format!("basin.theta = {} not in (0, pi/2)", b.theta)));
        }
        if !(b.beta > 0.0 && b.beta < 0.5) {
            return Err(config_err(format!("basin.beta = {} not in (0, 1/2)", b.beta)));
        }
        if let RadiusSetting::Fixed(r) = b.r {
            if !(r > 0.0 && r.is_finite()) {
                return Err(config_err(format!("basin.r = {r} must be positive or \"auto\"")));
            }
        }
        if !(b.r_hi > f64::EPSILON && b.r_hi.is_finite()) {
            return Err(config_err(format!("basin.r_hi = {} must be positive", b.r_hi)));
        }
        if b.beta * (f.l as f64 + 1.0) < 4.0 {
            warnings.push(format!(
                "beta (l + 1) = {} < 4: the degree condition fails for l = {}, beta = {}; no l with beta < 1/2 meets it below l = 8",
                b.beta * (f.l as f64 + 1.0),
                f.l,
                b.beta
            ));
        }
        let c = &self.coords;
        if !(c.tol > 0.0 && c.tol.is_finite()) {
            return Err(config_err(format!("coords.tol = {} must be positive", c.tol)));
        }
        if c.n_max < 1024 {
            return Err(config_err(format!("coords.n_max = {} must be >= 1024", c.n_max)));
        }
        let o = &self.orbit;
        if !(o.tail_frac > 0.0 && o.tail_frac < 1.0) {
            return Err(config_err(format!("orbit.tail_frac = {} not in (0, 1)", o.tail_frac)));
        }
        if o.p1.iter().chain(&o.p2).any(|v| !v.is_finite()) {
            return Err(config_err("orbit start point must be finite"));
        }
        let s = &self.suite;
        if s.brjuno_terms == 0 || s.brjuno_terms > 62 {
            return Err(config_err("suite.brjuno_terms must be in 1..=62"));
        }
        if s.c_n_min < 10 || s.c_n_max <= s.c_n_min {
            return Err(config_err("suite needs c_n_max > c_n_min >= 10"));
        }
        if s.asymptotic_n < 1000 || s.circle_n[0] < 10_000 || s.circle_n[1] <= s.circle_n[0] {
            return Err(config_err("suite needs asymptotic_n >= 1000 and circle_n increasing from >= 10^4"));
        }
        if !(s.check_tol > 0.0) {
            return Err(config_err("suite.check_tol must be positive"));
        }
        if !(self.render.slice > 0.0 && self.render.slice.is_finite()) {
            return Err(config_err(format!("render.slice = {} must be positive", self.render.slice)));
        }
        Ok(warnings)
    }

    pub fn rotation(&self) -> Result<RotationNumber> {
        match (&self.rotation.phi, &self.rotation.cf) {
            (Some(_), Some(_)) => Err(config_err("give either rotation.phi or rotation.cf, not both")),
            (Some(phi), None) => RotationNumber::new(*phi).map_err(|e| config_err(e.to_string())),
            (None, Some(cf)) => match cf.split_first() {
                Some((0, rest)) => RotationNumber::from_cf(rest).map_err(|e| config_err(e.to_string())),
                _ => Err(config_err("rotation.cf must read [0, a1, a2, ...] with positive a_i")),
            },
            (None, None) => Err(config_err("missing rotation.phi or rotation.cf")),
        }
    }

    pub fn model(&self) -> Result<MapFamily> {
        Ok(MapFamily::model(self.rotation()?))
    }

    pub fn perturbed(&self) -> Result<MapFamily> {
        let f = &self.family;
        MapFamily::default_perturbed(
            self.rotation()?,
            f.l,
            Complex64::new(f.a[0], f.a[1]),
            Complex64::new(f.b[0], f.b[1]),
        )
        .map_err(|e| config_err(e.to_string()))
    }

    /// The family selected by `family.map`.
    pub fn family(&self) -> Result<MapFamily> {
        match self.family.map {
            MapChoice::Model => self.model(),
            MapChoice::Perturbed => self.perturbed(),
        }
    }

    pub fn coord_settings(&self) -> CoordSettings {
        CoordSettings {
            tol: self.coords.tol,
            n_max: self.coords.n_max,
            entry_max: self.coords.entry_max,
            ..CoordSettings::default()
        }
    }

    /// Basin parameters for `fam`, running the `r0` search when `r = "auto"`.
    pub fn resolve_basin(&self, fam: &MapFamily) -> Result<BasinParams> {
        let b = &self.basin;
        match b.r {
            RadiusSetting::Fixed(r) => BasinParams::new(r, b.theta, b.beta),
            RadiusSetting::Named(AutoRadius::Auto) => {
                let search = R0Search { seed: self.seed ^ R0Search::default().seed, ..R0Search::default() };
                Ok(find_r0(fam, b.theta, b.beta, b.r_hi, &search)?.params())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        let (back, warnings) = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn missing_rotation_is_a_config_error() {
        assert!(matches!(RunConfig::from_toml("seed = 3\n"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_toml("[rotation]\n"), Err(Error::Config(_))));
    }

    #[test]
    fn validation() {
        let ok = "[rotation]\nphi = 0.3819660112501051\n";
        assert!(RunConfig::from_toml(ok).is_ok());
        for bad in [
            "[coords]\ntol = 0.0\n",
            "[family]\nl = 3\n",
            "[basin]\ntheta = 1.6\n",
            "[basin]\nbeta = 0.5\n",
            "[basin]\nr = -1.0\n",
            "[basin]\nr = \"sometimes\"\n",
            "bogus = 1\n",
        ] {
            let text = format!("{ok}{bad}");
            assert!(matches!(RunConfig::from_toml(&text), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn radius_forms() {
        let (cfg, _) = RunConfig::from_toml("[rotation]\ncf = [0, 1, 1, 1, 1]\n[basin]\nr = 0.25\n").unwrap();
        assert_eq!(cfg.basin.r, RadiusSetting::Fixed(0.25));
        let (cfg, _) = RunConfig::from_toml("[rotation]\nphi = 0.1\n[basin]\nr = \"auto\"\n").unwrap();
        assert_eq!(cfg.basin.r, RadiusSetting::AUTO);
    }
}
