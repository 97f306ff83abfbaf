//! One PASS/FAIL line per acceptance criterion on the default configuration.

use num_complex::Complex64;
use parabolic_cylinder::config::RunConfig;
use parabolic_cylinder::suite::{run_suite, Check, SuiteReport};
use std::panic::catch_unwind;
use std::process::ExitCode;
use serde_json::Value;
use std::f64::consts::TAU;
use std::sync::OnceLock;

fn report() -> &'static SuiteReport {
    static REPORT: OnceLock<SuiteReport> = OnceLock::new();
    REPORT.get_or_init(|| run_suite(&RunConfig::default()).expect("suite runs"))
}

fn gate(id: &str) -> &'static Check {
    let c = report().check(id).unwrap_or_else(|| panic!("no check {id}"));
    assert!(c.passed, "criterion {id} failed: {:#}", c.metrics);
    c
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn cx(v: &Value) -> Complex64 {
    Complex64::new(f(&v[0]), f(&v[1]))
}

fn criterion_01_brjuno() {
    let m = &gate("1").metrics;
    // omega(m) = min over 1 <= j < m of |lambda^j - 1|
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut omega = f64::INFINITY;
    let mut sum = 0.0;
    for j in 1..4096u64 {
        omega = omega.min((Complex64::from_polar(1.0, TAU * (j as f64 * phi).fract()) - 1.0).norm());
        let m = j + 1;
        if m.is_power_of_two() {
            sum -= omega.ln() / m as f64;
        }
    }
    assert!((f(&m["golden_sum"]) - sum).abs() < 1e-12);
    assert_eq!(m["golden_verdict"], "likely-convergent");
    assert_eq!(m["liouville_verdict"], "likely-divergent");
}

fn criterion_02_chart_semiconjugacy() {
    let m = &gate("2").metrics;
    assert!(f(&m["model"]["semiconjugacy_max_ulps"]) <= 4.0);
    assert!(f(&m["perturbed"]["semiconjugacy_max_ulps"]) <= 4.0);
    assert!(f(&m["model"]["lambda_sq_x_max_ulps"]) <= 4.0);
}

fn criterion_03a_basin_one_step() {
    let m = &gate("3a").metrics;
    for fam in ["model", "perturbed"] {
        assert_eq!(m[fam]["failures"], 0);
        assert_eq!(m[fam]["samples"], 1000);
    }
    assert_eq!(f(&m["model"]["r0"]), 1.0);
}

/// Known failure: after 10^4 steps every point keeps a norm of order
/// `sqrt(2 |z w|)`, above the 10^-2 threshold. Passing would mean the
/// bound no longer holds and the check needs a second look.
fn criterion_03b_basin_attraction() {
    let c = report().check("3b").expect("check 3b");
    assert!(!c.passed, "3b passed; revisit the lower bound");
    for fam in ["model", "perturbed"] {
        let m = &c.metrics[fam];
        assert_eq!(m["steps"], 10_000);
        assert!(f(&m["min_norm_lower_bound"]) > 1e-2);
        assert!(f(&m["max_norm"]) >= f(&m["max_norm_lower_bound"]));
    }
}

fn criterion_04_orbit_asymptotics() {
    let m = &gate("4").metrics;
    assert!(f(&m["model"]["ratio_deviation"]["max"]) < 0.05);
    assert!(f(&m["perturbed"]["ratio_deviation"]["max"]) < 0.05);
    for fam in ["model", "perturbed"] {
        for band in ["x_mod_band", "y_scaled_band"] {
            let b = &m[fam][band];
            assert!(f(&b[0]) > 0.0 && f(&b[1]).is_finite());
        }
    }
}

fn criterion_05_residual_constant() {
    let c = gate("5");
    let m = &c.metrics;
    assert!((cx(&m["model"]["tail_median"]) - 0.75).norm() < 1e-2);
    assert!((cx(&m["perturbed"]["tail_median"]) - 0.75).norm() < 5e-2);
    assert!((report().c_model - 0.75).norm() < 1e-9);
    assert!((report().c_perturbed - 0.75).norm() < 1e-9);
}

fn criterion_06_fatou_psi() {
    let m = &gate("6").metrics;
    assert!(f(&m["model"]["functional_equation"]["max"]) < 1e-6);
    assert!(f(&m["perturbed"]["functional_equation"]["max"]) < 1e-6);
    // leading correction |U| (psi - U + 3/4 log U) -> 5/16
    for row in m["deep_points"]["rows"].as_array().unwrap() {
        assert!((f(&row["corrected"]) - 0.3125).abs() < 1e-3);
        assert!(f(&row["plus_log"]) > 1e3 * f(&row["corrected"]));
    }
}

fn criterion_07_harmonic_log() {
    let m = &gate("7").metrics;
    assert!((cx(&m["h1"]) - 0.577_215_664_901_532_9).norm() < 1e-10);
    assert!(f(&m["grid_max_oracle_gap"]) < 1e-10);
}

fn criterion_08_tau_machinery() {
    let m = &gate("8").metrics;
    for fam in ["model", "perturbed"] {
        for key in ["tau_equivariance", "sigma_functional_equation", "cross_identity"] {
            assert!(f(&m[fam][key]["max"]) < 1e-6, "{fam} {key}");
        }
        assert!(f(&m[fam]["cross_identity_plus_sign"]["max"]) > 1e-2);
    }
}

fn criterion_09_global_conjugacy() {
    let m = &gate("9").metrics;
    for run in ["model_up", "model_down", "perturbed_up"] {
        for key in ["phi_conjugacy", "psi_translation", "well_definedness"] {
            assert!(f(&m[run][key]["max"]) < 1e-6, "{run} {key}");
        }
        assert!(f(&m[run]["max_entry"]) > 10.0);
    }
}

fn criterion_10_limit_circles() {
    let m = &gate("10").metrics;
    assert_eq!(f(&m["model"]["radius_hat"]), 0.5);
    assert!((f(&m["model"]["product"]) - 1.0).abs() < 2e-2);
    for s in m["perturbed"]["samples"].as_array().unwrap() {
        for p in s["product"].as_array().unwrap() {
            assert!((f(p) - 1.0).abs() < 2e-2);
        }
    }
}

fn criterion_11_rotation_freedom() {
    let m = &gate("11").metrics;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for fam in ["model", "perturbed"] {
        assert_eq!(m[fam]["modulus"], 1292);
        for pair in m[fam]["pairs"].as_array().unwrap() {
            let k = f(&pair["b"]) - f(&pair["a"]);
            let expected = Complex64::from_polar(1.0, -TAU * (2.0 * phi * k).fract());
            assert!((cx(&pair["ratio"]) - expected).norm() < 1e-6);
        }
    }
}

fn criterion_12_determinism() {
    gate("12");
    let again = run_suite(&RunConfig::default()).expect("suite runs");
    assert_eq!(again.to_json(), report().to_json());
}

/// Criteria expected to fail, with the test that pins down why.
const KNOWN_FAILURES: [&str; 1] = ["3b"];

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 13] = [
        ("1", criterion_01_brjuno),
        ("2", criterion_02_chart_semiconjugacy),
        ("3a", criterion_03a_basin_one_step),
        ("3b", criterion_03b_basin_attraction),
        ("4", criterion_04_orbit_asymptotics),
        ("5", criterion_05_residual_constant),
        ("6", criterion_06_fatou_psi),
        ("7", criterion_07_harmonic_log),
        ("8", criterion_08_tau_machinery),
        ("9", criterion_09_global_conjugacy),
        ("10", criterion_10_limit_circles),
        ("11", criterion_11_rotation_freedom),
        ("12", criterion_12_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, run) in criteria {
        let ok = catch_unwind(run).is_ok();
        let check = report().check(id).expect("check present");
        let passed = ok && check.passed;
        let known = KNOWN_FAILURES.contains(&id);
        println!(
            "{} criterion {id} {}{}",
            if passed { "PASS" } else { "FAIL" },
            check.name,
            if known { " (known failure)" } else { "" }
        );
        if !ok {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("unexpected results: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
