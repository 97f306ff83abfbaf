//! The acceptance suite behind `pcyl verify`.

use crate::analysis::{
    default_modulus, invariance_suite, limit_circle, rotation_freedom, verify_asymptotics, Band,
};
use crate::config::RunConfig;
use crate::coords::harmonic::{harmonic_closed_form, harmonic_log_limit, EULER_GAMMA};
use crate::coords::{estimate_c, reference_point, u_of, FatouCoordinates, PointCoords};
use crate::error::{Error, Result};
use crate::germ::{Chart, ChartPoint, MapFamily};
use crate::par;
use crate::regions::{in_basin, sample_basin, sample_point, sample_rng, BasinParams, SamplerSettings};
use crate::rotation::RotationNumber;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub metrics: Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: RunConfig,
    pub warnings: Vec<String>,
    pub r0_model: f64,
    pub r0_perturbed: f64,
    pub c_model: Complex64,
    pub c_perturbed: Complex64,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub failing: Vec<String>,
}

impl SuiteReport {
    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check(id: &str, name: &str, passed: bool, metrics: Value) -> Check {
    Check { id: id.into(), name: name.into(), passed, metrics, note: None }
}

/// Independent seed for each named part of the suite.
fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed.wrapping_add(tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Distance in units of the larger operand's last place.
pub fn ulps(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / (f64::EPSILON * scale)
    }
}

/// Running maximum of a residual with the errors met along the way.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
struct Residual {
    max: f64,
    count: usize,
    errors: Vec<String>,
}

impl Residual {
    fn add(&mut self, v: f64) {
        self.count += 1;
        self.max = if v.is_nan() { f64::NAN } else { self.max.max(v) };
    }

    fn fail(&mut self, e: impl ToString) {
        self.errors.push(e.to_string());
    }

    fn below(&self, tol: f64) -> bool {
        self.errors.is_empty() && self.max < tol
    }

    fn json(&self) -> Value {
        json!({ "max": self.max, "count": self.count, "errors": self.errors })
    }
}

struct Family<'a> {
    name: &'static str,
    fam: &'a MapFamily,
    params: BasinParams,
    fc: FatouCoordinates<'a>,
}

pub fn run_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let warnings = cfg.validate()?;
    let model = cfg.model()?;
    let pert = cfg.perturbed()?;
    let p_model = cfg.resolve_basin(&model)?;
    let p_pert = cfg.resolve_basin(&pert)?;
    let settings = cfg.coord_settings();
    let fm = Family {
        name: "model",
        fam: &model,
        params: p_model,
        fc: FatouCoordinates::for_family(&model, p_model, settings.clone())?,
    };
    let fp = Family {
        name: "perturbed",
        fam: &pert,
        params: p_pert,
        fc: FatouCoordinates::for_family(&pert, p_pert, settings)?,
    };
    let s = &cfg.suite;

    let mut checks = vec![brjuno_check(s.brjuno_terms)?, chart_check(cfg, &[&fm, &fp])?];
    checks.extend(basin_checks(cfg, &[&fm, &fp])?);
    checks.push(asymptotics_check(cfg, &[&fm, &fp])?);
    checks.push(residual_constant_check(cfg, &fm, &fp)?);

    let batch_m = coordinate_batch(cfg, &fm, s.coord_samples, 61)?;
    let batch_p = coordinate_batch(cfg, &fp, s.perturbed_coord_samples, 62)?;
    checks.push(psi_check(cfg, &fm, &[&batch_m, &batch_p]));
    checks.push(harmonic_check()?);
    checks.push(tau_check(cfg, &[&batch_m, &batch_p]));
    let conjugacy_runs = [
        (&fm, Chart::Up, s.phi_samples),
        (&fm, Chart::Down, s.phi_samples),
        (&fp, Chart::Up, s.perturbed_coord_samples),
    ];
    checks.push(conjugacy_check(cfg, &conjugacy_runs)?);
    checks.push(circle_check(cfg, &fm, &fp)?);
    checks.push(rotation_check(cfg, &[&fm, &fp])?);
    checks.push(determinism_check(cfg)?);

    let failing: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| format!("{} {}", c.id, c.name)).collect();
    Ok(SuiteReport {
        config: cfg.clone(),
        warnings,
        r0_model: p_model.r,
        r0_perturbed: p_pert.r,
        c_model: fm.fc.c(),
        c_perturbed: fp.fc.c(),
        passed: failing.is_empty(),
        failing,
        checks,
    })
}

fn brjuno_check(n: u32) -> Result<Check> {
    let golden = RotationNumber::golden_mean().brjuno_report(n)?;
    let liouville = RotationNumber::liouville_like().brjuno_report(n)?;
    let g_sum = *golden.partial_sums.last().expect("n >= 1");
    let l_sum = *liouville.partial_sums.last().expect("n >= 1");
    let passed = golden.tail_increment < 1e-3 && l_sum > 10.0 * g_sum;
    Ok(check(
        "1",
        "brjuno-diagnostics",
        passed,
        json!({
            "n_terms": n,
            "golden_sum": g_sum,
            "golden_tail_increment": golden.tail_increment,
            "golden_verdict": golden.verdict,
            "liouville_sum": l_sum,
            "liouville_max_log_jump": liouville.max_log_jump,
            "liouville_verdict": liouville.verdict,
            "sum_ratio": l_sum / g_sum,
        }),
    ))
}

fn chart_check(cfg: &RunConfig, fams: &[&Family]) -> Result<Check> {
    let mut metrics = serde_json::Map::new();
    let mut passed = true;
    for f in fams {
        let pts = sample_basin(&f.params, Chart::Up, cfg.suite.chart_points, sub_seed(cfg.seed, 2))?;
        let rot = f.fam.rotation();
        let lam2 = rot.lambda() * rot.lambda();
        let (mut semi, mut lift) = (0f64, 0f64);
        for q in &pts {
            let (x1, y1) = f.fam.apply_up(q.c1, q.c2)?;
            let (z1, w1) = f.fam.apply_down(q.c1 * q.c2, q.c2);
            semi = semi.max(ulps(x1 * y1, z1)).max(ulps(y1, w1));
            lift = lift.max(ulps(x1, lam2 * q.c1));
        }
        passed &= semi <= 8.0;
        if f.fam.is_model() {
            passed &= lift <= 4.0;
        }
        metrics.insert(
            f.name.into(),
            json!({ "points": pts.len(), "semiconjugacy_max_ulps": semi, "lambda_sq_x_max_ulps": lift }),
        );
    }
    Ok(check("2", "chart-semiconjugacy", passed, Value::Object(metrics)))
}

fn basin_checks(cfg: &RunConfig, fams: &[&Family]) -> Result<[Check; 2]> {
    let s = &cfg.suite;
    let (mut one, mut attr) = (serde_json::Map::new(), serde_json::Map::new());
    let (mut one_ok, mut attr_ok) = (true, true);
    for f in fams {
        let r = invariance_suite(f.fam, &f.params, s.invariance_samples, sub_seed(cfg.seed, 3), s.attraction_steps)?;
        one_ok &= r.one_step_ok();
        attr_ok &= r.attraction_ok();
        one.insert(
            f.name.into(),
            json!({
                "r0": f.params.r, "theta": f.params.theta, "beta": f.params.beta,
                "degree_condition": r.degree_condition,
                "samples": r.n_samples, "failures": r.one_step_failures, "witnesses": r.one_step_witnesses,
            }),
        );
        attr.insert(
            f.name.into(),
            json!({
                "samples": r.n_samples, "steps": r.n_steps, "max_norm": r.max_norm,
                "max_norm_lower_bound": r.max_norm_lower_bound,
                "min_norm_lower_bound": r.min_norm_lower_bound,
                "failures": r.attraction_failures, "witnesses": r.attraction_witnesses,
            }),
        );
    }
    let mut attraction = check("3b", "basin-attraction", attr_ok, Value::Object(attr));
    attraction.note = Some(
        "||(z_N, w_N)|| >= sqrt(2 |z_N w_N|) and |z_N w_N| ~ 1/(U_0 + N), so the bound is about 0.014 at N = 10^4"
            .into(),
    );
    Ok([check("3a", "basin-one-step", one_ok, Value::Object(one)), attraction])
}

fn band_json(b: Band) -> Value {
    json!([b.lo, b.hi])
}

fn asymptotics_check(cfg: &RunConfig, fams: &[&Family]) -> Result<Check> {
    let s = &cfg.suite;
    let mut metrics = serde_json::Map::new();
    let mut passed = true;
    for f in fams {
        let pts = sample_basin(&f.params, Chart::Up, s.asymptotic_samples, sub_seed(cfg.seed, 4))?;
        let results = par::map(&pts, |q| verify_asymptotics(f.fam, q, s.asymptotic_n).map(|d| d.summary));
        let mut ratio = Residual::default();
        let mut y_band = Band { lo: f64::INFINITY, hi: f64::NEG_INFINITY };
        let mut x_band = y_band;
        let mut all_ok = true;
        for r in results {
            match r {
                Ok(sum) => {
                    ratio.add((sum.ratio_final - 1.0).abs());
                    all_ok &= sum.ratio_ok;
                    y_band = Band { lo: y_band.lo.min(sum.y_band.lo), hi: y_band.hi.max(sum.y_band.hi) };
                    x_band = Band { lo: x_band.lo.min(sum.x_band.lo), hi: x_band.hi.max(sum.x_band.hi) };
                }
                Err(e) => ratio.fail(e),
            }
        }
        let bands_ok = [y_band, x_band].iter().all(|b| b.lo > 0.0 && b.hi.is_finite());
        passed &= all_ok && ratio.errors.is_empty() && bands_ok;
        metrics.insert(
            f.name.into(),
            json!({
                "n": s.asymptotic_n,
                "ratio_deviation": ratio.json(),
                "y_scaled_band": band_json(y_band),
                "x_mod_band": band_json(x_band),
            }),
        );
    }
    Ok(check("4", "orbit-asymptotics", passed, Value::Object(metrics)))
}

fn residual_constant_check(cfg: &RunConfig, fm: &Family, fp: &Family) -> Result<Check> {
    let s = &cfg.suite;
    let mut metrics = serde_json::Map::new();
    let mut passed = true;
    for (f, allowed) in [(fm, 1e-2), (fp, 5e-2)] {
        let r = estimate_c(f.fam, &reference_point(), s.c_n_min, s.c_n_max)?;
        let err = (r.tail_median - 0.75).norm();
        passed &= err < allowed;
        metrics.insert(
            f.name.into(),
            json!({
                "tail_median": r.tail_median, "error": err, "allowed": allowed,
                "extrapolated": r.extrapolated, "c_used": f.fc.c(),
                "n_min": r.n_min, "n_max": r.n_max,
            }),
        );
    }
    Ok(check("5", "residual-constant", passed, Value::Object(metrics)))
}

/// `psi`, `sigma`, `tau` at basin samples and at their images.
struct CoordinateBatch {
    name: &'static str,
    lambda_bar: Complex64,
    pairs: Vec<Result<(PointCoords, PointCoords)>>,
}

fn coordinate_batch(cfg: &RunConfig, f: &Family, n: usize, tag: u64) -> Result<CoordinateBatch> {
    let pts = sample_basin(&f.params, Chart::Up, n, sub_seed(cfg.seed, tag))?;
    let pairs = par::map(&pts, |q| {
        let a = f.fc.evaluate(q)?;
        let b = f.fc.evaluate(&f.fam.step(*q)?)?;
        Ok((a, b))
    });
    Ok(CoordinateBatch { name: f.name, lambda_bar: f.fam.rotation().lambda_bar(), pairs })
}

fn psi_check(cfg: &RunConfig, fm: &Family, batches: &[&CoordinateBatch]) -> Check {
    let tol = cfg.suite.check_tol;
    let mut metrics = serde_json::Map::new();
    let mut passed = true;
    for b in batches {
        let mut r = Residual::default();
        for pair in &b.pairs {
            match pair {
                Ok((a, fa)) => r.add((fa.psi.value - a.psi.value - 1.0).norm()),
                Err(e) => r.fail(e),
            }
        }
        passed &= r.below(tol);
        metrics.insert(b.name.into(), json!({ "functional_equation": r.json() }));
    }
    let deep: Vec<Result<(f64, f64, f64)>> = par::map(&cfg.suite.deep_u, |&u| {
        let p = ChartPoint::up(Complex64::new(1.0, 0.0), Complex64::new(u.sqrt().recip(), 0.0));
        let big_u = u_of(&p)?;
        let psi = fm.fc.psi(&p)?.value;
        let corrected = (psi - big_u + 0.75 * big_u.ln()).norm() * big_u.norm();
        let plus_log = (psi - big_u - 0.75 * big_u.ln()).norm() * big_u.norm();
        Ok((big_u.norm(), corrected, plus_log))
    });
    let mut rows = Vec::new();
    let mut deep_errors = Vec::new();
    for d in deep {
        match d {
            Ok((u, c, p)) => rows.push(json!({ "u": u, "corrected": c, "plus_log": p })),
            Err(e) => deep_errors.push(e.to_string()),
        }
    }
    let consts: Vec<f64> = rows.iter().filter_map(|r| r["corrected"].as_f64()).collect();
    let (lo, hi) = consts.iter().fold((f64::INFINITY, 0f64), |(l, h), &v| (l.min(v), h.max(v)));
    let bounded = deep_errors.is_empty() && !consts.is_empty() && hi.is_finite() && hi <= 2.0 * lo;
    passed &= bounded;
    metrics.insert(
        "deep_points".into(),
        json!({
            "rows": rows, "errors": deep_errors, "reported_constant": hi, "bounded": bounded,
            "form": "|psi - U + 0.75 log U| |U|; the + log U form grows like 1.5 |U| log |U|",
        }),
    );
    check("6", "fatou-psi", passed, Value::Object(metrics))
}

fn harmonic_check() -> Result<Check> {
    let h1 = harmonic_log_limit(Complex64::new(1.0, 0.0), 1e-12)?;
    let oracle = harmonic_closed_form(Complex64::new(1.0, 0.0))?;
    let h1_err = (h1.value - EULER_GAMMA).norm().max((h1.value - oracle).norm());
    let mut max_zh = 0f64;
    let mut max_oracle = 0f64;
    for re in [10.0, 100.0, 1e3, 1e4] {
        for im in [-1e3, -10.0, 0.0, 10.0, 1e3] {
            let z = Complex64::new(re, im);
            let h = harmonic_log_limit(z, 1e-12)?.value;
            max_zh = max_zh.max((z * h).norm());
            max_oracle = max_oracle.max((h - harmonic_closed_form(z)?).norm());
        }
    }
    let passed = h1_err < 1e-8 && max_zh <= 1.0;
    Ok(check(
        "7",
        "harmonic-log",
        passed,
        json!({ "h1": h1.value, "h1_error": h1_err, "max_zeta_h": max_zh, "grid_max_oracle_gap": max_oracle }),
    ))
}

fn tau_check(cfg: &RunConfig, batches: &[&CoordinateBatch]) -> Check {
    let tol = cfg.suite.check_tol;
    let mut metrics = serde_json::Map::new();
    let mut passed = true;
    for b in batches {
        let (mut tau, mut sigma, mut cross, mut plus_sign) =
            (Residual::default(), Residual::default(), Residual::default(), Residual::default());
        for (i, pair) in b.pairs.iter().enumerate() {
            let (a, fa) = match pair {
                Ok(v) => v,
                Err(e) => {
                    tau.fail(e);
                    continue;
                }
            };
            let psi = a.psi.value;
            tau.add((fa.tau.value - b.lambda_bar * a.tau.value).norm());
            sigma.add((fa.sigma.value - b.lambda_bar * (-0.5 / psi).exp() * a.sigma.value).norm());
            if i < cfg.suite.cross_samples {
                match harmonic_log_limit(psi, 1e-13) {
                    Ok(h) => {
                        let base = psi.sqrt() * a.sigma.value;
                        cross.add((a.tau.value - (-0.5 * h.value).exp() * base).norm());
                        plus_sign.add((a.tau.value - (0.5 * h.value).exp() * base).norm());
                    }
                    Err(e) => cross.fail(e),
                }
            }
        }
        passed &= tau.below(tol) && sigma.below(tol) && cross.below(tol);
        metrics.insert(
            b.name.into(),
            json!({
                "tau_equivariance": tau.json(),
                "sigma_functional_equation": sigma.json(),
                "cross_identity": cross.json(),
                "cross_identity_plus_sign": plus_sign.json(),
            }),
        );
    }
    check("8", "tau-machinery", passed, Value::Object(metrics))
}

/// Preimages of a basin point until eleven consecutive ones lie outside the basin.
fn pull_back(f: &Family, q: ChartPoint, max_steps: usize) -> Option<ChartPoint> {
    let mut cur = q.to_down();
    let mut outside = 0;
    for _ in 0..max_steps {
        let (z, w) = f.fam.preimage_down((cur.c1, cur.c2)).ok()?;
        cur = ChartPoint::down(z, w);
        if !(cur.max_modulus() < 1.0) {
            return None;
        }
        outside = if in_basin(&cur, &f.params) { 0 } else { outside + 1 };
        if outside > 10 {
            return Some(cur);
        }
    }
    None
}

/// Half direct basin samples, half pulled back to entry times above 10.
fn phi_samples(cfg: &RunConfig, f: &Family, chart: Chart, n: usize) -> Result<Vec<ChartPoint>> {
    let seed = sub_seed(cfg.seed, 9);
    let settings = SamplerSettings::default();
    let n_direct = n - n / 2;
    let mut pts = sample_basin(&f.params, chart, n_direct, seed)?;
    let mut index = n_direct as u64;
    while pts.len() < n {
        if index > 100 * (n as u64 + 1) {
            return Err(Error::Sampling(format!("only {} pulled-back samples with entry > 10", pts.len() - n_direct)));
        }
        let q = sample_point(&mut sample_rng(seed, index), &f.params, Chart::Down, &settings)?;
        index += 1;
        let Some(p) = pull_back(f, q, 4000) else { continue };
        let Ok(p) = p.to_chart(chart) else { continue };
        if matches!(f.fc.basin_entry(&p), Ok((e, _)) if e > 10) {
            pts.push(p);
        }
    }
    Ok(pts)
}

fn conjugacy_check(cfg: &RunConfig, runs: &[(&Family, Chart, usize)]) -> Result<Check> {
    let tol = cfg.suite.check_tol;
    let mut metrics = serde_json::Map::new();
    let mut passed = true;
    for &(f, chart, n) in runs {
        let pts = phi_samples(cfg, f, chart, n)?;
        let lb = f.fam.rotation().lambda_bar();
        let rows = par::map(&pts, |p| -> Result<(usize, f64, f64, f64)> {
            let phi = f.fc.phi(p)?;
            let phi_f = f.fc.phi(&f.fam.step(*p)?)?;
            let later = f.fc.phi_at(p, phi.entry + 1)?;
            let (a, b) = (phi.coords, phi_f.coords);
            let conj = (b.psi - a.psi - 1.0).norm().max((b.tau - lb * a.tau).norm());
            let (ra, rb) = (f.fc.remove_rotation(a), f.fc.remove_rotation(b));
            // second components: relative gap
            let rot_free = (rb.psi - ra.psi - 1.0).norm().max((rb.tau - ra.tau).norm() / ra.tau.norm());
            let well = (later.psi - a.psi).norm().max((later.tau - a.tau).norm());
            Ok((phi.entry, conj, rot_free, well))
        });
        let (mut conj, mut rot_free, mut well) = (Residual::default(), Residual::default(), Residual::default());
        let mut max_entry = 0;
        let mut deep_entries = 0;
        for r in rows {
            match r {
                Ok((e, c, r, w)) => {
                    max_entry = max_entry.max(e);
                    deep_entries += (e > 10) as usize;
                    conj.add(c);
                    rot_free.add(r);
                    well.add(w);
                }
                Err(e) => conj.fail(e),
            }
        }
        passed &= conj.below(tol) && rot_free.below(tol) && well.below(tol) && deep_entries > 0;
        let key = format!("{}_{}", f.name, if chart == Chart::Up { "up" } else { "down" });
        metrics.insert(
            key,
            json!({
                "samples": pts.len(),
                "entry_above_10": deep_entries,
                "max_entry": max_entry,
                "phi_conjugacy": conj.json(),
                "psi_translation": rot_free.json(),
                "well_definedness": well.json(),
            }),
        );
    }
    Ok(check("9", "global-conjugacy", passed, Value::Object(metrics)))
}

fn circle_check(cfg: &RunConfig, fm: &Family, fp: &Family) -> Result<Check> {
    let s = &cfg.suite;
    let [n_short, n_long] = s.circle_n;
    let p0 = ChartPoint::up(Complex64::new(0.5, 0.0), Complex64::new(0.1, 0.0));
    let model = limit_circle(&fm.fc, &p0, n_short, 0.5)?;
    let exact = (model.radius_hat - 0.5).abs() <= 4.0 * f64::EPSILON * 0.5;
    let mut passed = exact && (model.product - 1.0).abs() < 2e-2 && model.discrepancy < 0.02;

    let pts = sample_basin(&fp.params, Chart::Up, s.circle_samples, sub_seed(cfg.seed, 10))?;
    let runs = par::map(&pts, |q| -> Result<_> {
        Ok((limit_circle(&fp.fc, q, n_short, 0.5)?, limit_circle(&fp.fc, q, n_long, 0.5)?))
    });
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for r in runs {
        match r {
            Ok((a, b)) => {
                let ok = (a.product - 1.0).abs() < 5e-2
                    && (b.product - 1.0).abs() < 5e-2
                    && b.max_radial_dev < a.max_radial_dev
                    && a.discrepancy < 0.02;
                passed &= ok;
                rows.push(json!({
                    "product": [a.product, b.product],
                    "max_radial_dev": [a.max_radial_dev, b.max_radial_dev],
                    "max_pointwise_dev": [a.max_pointwise_dev, b.max_pointwise_dev],
                    "discrepancy": a.discrepancy,
                    "radius_over_tau_sq": a.radius_over_tau_sq,
                    "passed": ok,
                }));
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    passed &= errors.is_empty() && !rows.is_empty();
    Ok(check(
        "10",
        "limit-circles",
        passed,
        json!({
            "model": {
                "x0": 0.5, "radius_hat": model.radius_hat, "radius_exact": exact,
                "tau_sq_mod": model.tau_sq_mod, "product": model.product,
                "radius_over_tau_sq": model.radius_over_tau_sq,
                "max_pointwise_dev": model.max_pointwise_dev, "discrepancy": model.discrepancy,
            },
            "perturbed": { "n": [n_short, n_long], "samples": rows, "errors": errors },
        }),
    ))
}

fn rotation_check(cfg: &RunConfig, fams: &[&Family]) -> Result<Check> {
    let n = cfg.suite.rotation_n;
    let mut metrics = serde_json::Map::new();
    let mut passed = true;
    for f in fams {
        let p = sample_basin(&f.params, Chart::Up, 1, sub_seed(cfg.seed, 11))?[0];
        let m = default_modulus(f.fam, (n / 20) as u64);
        let r = rotation_freedom(f.fam, &p, n, m, &[(0, 1), (1, m / 2), (0, m - 1)])?;
        passed &= r.max_error < 1e-3;
        metrics.insert(f.name.into(), serde_json::to_value(&r)?);
    }
    Ok(check("11", "rotation-freedom", passed, Value::Object(metrics)))
}

/// Samples, `r0`, a small coordinate batch and the Brjuno table, serialized.
pub fn fingerprint(cfg: &RunConfig) -> Result<String> {
    let fam = cfg.perturbed()?;
    let params = cfg.resolve_basin(&fam)?;
    let pts = sample_basin(&params, Chart::Up, 64, sub_seed(cfg.seed, 12))?;
    let fc = FatouCoordinates::new(&fam, params, Complex64::new(0.75, 0.0), cfg.coord_settings());
    let coords: Vec<_> = par::map(&pts[..4], |p| fc.evaluate(p).ok());
    let brjuno = cfg.rotation()?.brjuno_report(cfg.suite.brjuno_terms)?;
    Ok(serde_json::to_string(&json!({
        "r0": params.r, "samples": pts, "coords": coords, "brjuno": brjuno,
    }))?)
}

fn determinism_check(cfg: &RunConfig) -> Result<Check> {
    let a = fingerprint(cfg)?;
    let b = fingerprint(cfg)?;
    let mut c = check("12", "determinism", a == b, json!({ "fingerprint_bytes": a.len(), "identical": a == b }));
    c.note = Some("fingerprint recomputed twice in-process; full reports are compared across runs by the test suite".into());
    Ok(c)
}
