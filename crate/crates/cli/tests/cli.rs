use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

const QUICK_SUITE: &str = r#"
[suite]
chart_points = 1000
invariance_samples = 100
attraction_steps = 1000
asymptotic_samples = 2
asymptotic_n = 10000
coord_samples = 4
perturbed_coord_samples = 2
cross_samples = 2
deep_u = [10000.0]
phi_samples = 4
circle_samples = 1
rotation_n = 50000
"#;

fn pcyl(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pcyl"));
    cmd.current_dir(dir).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("run.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.args(args).output().expect("pcyl runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn golden_brjuno_table() {
    let dir = TempDir::new().unwrap();
    let out = pcyl(dir.path(), None, &["brjuno"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut rdr = csv::Reader::from_path(dir.path().join("out/brjuno.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["nu", "m", "omega", "partial_sum", "increment"]);
    let nus: Vec<u32> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(nus, (1..=12).collect::<Vec<_>>());
}

#[test]
fn rational_brjuno_table_is_truncated() {
    let dir = TempDir::new().unwrap();
    let out = pcyl(dir.path(), Some("[rotation]\ncf = [0, 3]\n"), &["brjuno"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("diverges"));
    let rows = csv::Reader::from_path(dir.path().join("out/brjuno.csv")).unwrap().records().count();
    assert_eq!(rows, 2);
}

#[test]
fn invalid_configs_exit_2() {
    let cases = [
        "[family]\nmap = \"model\"\n",
        "[rotation]\nphi = 0.3\n[coords]\ntol = 0.0\n",
        "[rotation]\nphi = 0.3\n[basin]\nbeta = 0.5\n",
        "[rotation]\nphi = 0.3\nunknown = 1\n",
        "[rotation]\nphi = 1.5\n",
    ];
    for text in cases {
        let dir = TempDir::new().unwrap();
        let out = pcyl(dir.path(), Some(text), &["brjuno"]);
        assert_eq!(code(&out), 2, "{text}: {}", stderr(&out));
    }
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&pcyl(dir.path(), None, &["render", "--slice", "0"])), 2);
    assert_eq!(code(&pcyl(dir.path(), None, &["render", "--slice", "-1"])), 2);
}

#[test]
fn single_pixel_render() {
    let dir = TempDir::new().unwrap();
    let cfg = "[rotation]\nphi = 0.6180339887498949\n[basin]\nr = 1.0\n[render]\nwidth = 1\nheight = 1\n";
    let out = pcyl(dir.path(), Some(cfg), &["render"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for name in ["basin_modulus.ppm", "basin_argument.ppm"] {
        let bytes = std::fs::read(dir.path().join("out").join(name)).unwrap();
        assert!(bytes.starts_with(b"P6\n1 1\n255\n"));
        assert_eq!(bytes.len(), b"P6\n1 1\n255\n".len() + 3);
    }
}

#[test]
fn empty_slice_warns() {
    let dir = TempDir::new().unwrap();
    let cfg = "[rotation]\nphi = 0.6180339887498949\n[basin]\nr = 1.0\n[render]\nwidth = 8\nheight = 8\n";
    let out = pcyl(dir.path(), Some(cfg), &["render", "--slice", "50"]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("no basin points"));
}

#[test]
fn outputs_are_deterministic() {
    let runs: Vec<String> = (0..2)
        .map(|_| {
            let dir = TempDir::new().unwrap();
            let out = pcyl(dir.path(), None, &["coords", "--n", "4", "--seed", "5"]);
            assert_eq!(code(&out), 0, "{}", stderr(&out));
            std::fs::read_to_string(dir.path().join("out/coords.json")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let v: serde_json::Value = serde_json::from_str(&runs[0]).unwrap();
    let rec = &v["records"][0]["psi"];
    for key in ["value_re", "value_im", "n_used", "residual", "c_re", "c_im"] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn orbit_and_limitset_outputs() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&pcyl(dir.path(), None, &["orbit", "--n", "2000"])), 0);
    let rows = csv::Reader::from_path(dir.path().join("out/orbit.csv")).unwrap().records().count();
    assert_eq!(rows, 2001);
    assert_eq!(code(&pcyl(dir.path(), None, &["limitset", "--n", "10000"])), 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/limitset.json")).unwrap()).unwrap();
    assert_eq!(v["radius_hat"], 0.5);
    assert_eq!(code(&pcyl(dir.path(), None, &["limitset", "--n", "100"])), 1);
}

#[test]
fn huge_radius_fails_invariance() {
    let dir = TempDir::new().unwrap();
    // the perturbed map fails on about one sample in a thousand at this radius
    let suite = QUICK_SUITE.replace("invariance_samples = 100", "invariance_samples = 5000");
    let cfg = format!("[rotation]\nphi = 0.6180339887498949\n[basin]\nr = 100.0\n{suite}");
    let out = pcyl(dir.path(), Some(&cfg), &["verify"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("3a basin-one-step"));
    assert!(dir.path().join("out/verify.json").exists());
}

#[test]
fn default_verify_fails_only_on_attraction() {
    let dir = TempDir::new().unwrap();
    let out = pcyl(dir.path(), None, &["verify"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let failing: Vec<&str> = stdout.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failing, vec!["FAIL criterion 3b  basin-attraction"]);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 12);
}
