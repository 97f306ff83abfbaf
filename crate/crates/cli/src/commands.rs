use crate::Failure;
use parabolic_cylinder::analysis::{diagnose_orbit, invariance_suite, limit_circle};
use parabolic_cylinder::config::RunConfig;
use parabolic_cylinder::coords::FatouCoordinates;
use parabolic_cylinder::par;
use parabolic_cylinder::regions::sample_basin;
use parabolic_cylinder::render::render_slices;
use parabolic_cylinder::rotation::BrjunoVerdict;
use parabolic_cylinder::suite::run_suite;
use parabolic_cylinder::Chart;
use serde::Serialize;
use serde_json::json;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Infrastructure(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, Failure> {
    csv::Writer::from_path(path).map_err(|e| Failure::Infrastructure(e.to_string()))
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Infrastructure(e.to_string())
}

pub fn brjuno(cfg: &RunConfig) -> Result<(), Failure> {
    let rot = cfg.rotation()?;
    let n = cfg.suite.brjuno_terms.max(2);
    let report = rot.brjuno_report(n)?;
    let path = cfg.out_dir.join("brjuno.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["nu", "m", "omega", "partial_sum", "increment"]).map_err(csv_err)?;
    println!("{:>4} {:>12} {:>14} {:>14}", "nu", "m", "omega", "S_nu");
    for (i, (&omega, &sum)) in report.omegas.iter().zip(&report.partial_sums).enumerate() {
        let nu = i + 1;
        let m = 1u64 << nu;
        println!("{nu:>4} {m:>12} {omega:>14.6e} {sum:>14.6e}");
        w.write_record([
            nu.to_string(),
            m.to_string(),
            omega.to_string(),
            sum.to_string(),
            report.increments[i].to_string(),
        ])
        .map_err(csv_err)?;
        if omega == 0.0 {
            println!("omega(2^{nu}) = 0: rational rotation, the Brjuno sum diverges; table truncated");
            break;
        }
    }
    w.flush()?;
    if report.verdict != BrjunoVerdict::DivergentRational {
        println!(
            "tail increment {:.3e}, largest log jump {:.3}, heuristic verdict: {}",
            report.tail_increment,
            report.max_log_jump,
            serde_json::to_value(report.verdict).expect("verdict serializes").as_str().unwrap_or("?")
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn orbit(cfg: &RunConfig) -> Result<(), Failure> {
    let fam = cfg.family()?;
    let start = cfg.orbit.start();
    let rec = fam.orbit(start, cfg.orbit.n);
    let path = cfg.out_dir.join("orbit.csv");
    rec.write_csv(BufWriter::new(File::create(&path)?))?;
    let mut summary = json!({ "start": start, "steps": rec.points.len() - 1, "stop": rec.stop });
    if start.to_up().is_ok_and(|p| p.c2.norm() > 0.0) {
        let d = diagnose_orbit(&fam, &start, cfg.orbit.n)?;
        summary["asymptotics"] = serde_json::to_value(d.summary).expect("summary serializes");
    }
    write_json(&cfg.out_dir.join("orbit.json"), &summary)?;
    println!("{} steps, stop: {:?}; wrote {}", rec.points.len() - 1, rec.stop, path.display());
    Ok(())
}

pub fn basin(cfg: &RunConfig) -> Result<(), Failure> {
    let fam = cfg.family()?;
    let params = cfg.resolve_basin(&fam)?;
    println!("basin r = {}, theta = {}, beta = {}", params.r, params.theta, params.beta);
    let s = &cfg.suite;
    let report = invariance_suite(&fam, &params, s.invariance_samples, cfg.seed, s.attraction_steps)?;
    println!(
        "{} samples: {} one-step failures, max norm after {} steps {:.4e} ({} above 1e-2)",
        report.n_samples, report.one_step_failures, report.n_steps, report.max_norm, report.attraction_failures
    );
    write_json(&cfg.out_dir.join("basin.json"), &report)?;
    let pts = sample_basin(&params, Chart::Down, s.invariance_samples, cfg.seed)?;
    let mut w = csv_writer(&cfg.out_dir.join("samples.csv"))?;
    w.write_record(["index", "re_z", "im_z", "re_w", "im_w"]).map_err(csv_err)?;
    for (i, p) in pts.iter().enumerate() {
        w.write_record([i.to_string(), p.c1.re.to_string(), p.c1.im.to_string(), p.c2.re.to_string(), p.c2.im.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn coords(cfg: &RunConfig) -> Result<(), Failure> {
    let fam = cfg.family()?;
    let params = cfg.resolve_basin(&fam)?;
    let fc = FatouCoordinates::for_family(&fam, params, cfg.coord_settings())?;
    let pts = sample_basin(&params, Chart::Up, cfg.suite.coord_samples, cfg.seed)?;
    let records = par::map(&pts, |p| match (fc.evaluate(p), fc.phi(p)) {
        (Ok(c), Ok(phi)) => json!({
            "point": p,
            "psi": c.psi,
            "sigma": c.sigma,
            "tau": c.tau,
            "phi": phi.coords,
            "psi_rotation_free": fc.remove_rotation(phi.coords),
            "entry": phi.entry,
        }),
        (Err(e), _) | (_, Err(e)) => json!({ "point": p, "error": e.to_string() }),
    });
    let failed = records.iter().filter(|r| r.get("error").is_some()).count();
    write_json(&cfg.out_dir.join("coords.json"), &json!({ "params": params, "c": fc.c(), "records": records }))?;
    println!("{} samples ({failed} without convergence), c = {:.12}", records.len(), fc.c());
    Ok(())
}

pub fn limitset(cfg: &RunConfig) -> Result<(), Failure> {
    let fam = cfg.family()?;
    let params = cfg.resolve_basin(&fam)?;
    let fc = FatouCoordinates::for_family(&fam, params, cfg.coord_settings())?;
    let report = limit_circle(&fc, &cfg.orbit.start(), cfg.orbit.n, cfg.orbit.tail_frac)?;
    println!(
        "radius {:.15}, |tau|^2 {:.12}, radius |tau|^2 = {:.12}, radius / |tau|^2 = {:.6}, discrepancy {:.4}",
        report.radius_hat, report.tau_sq_mod, report.product, report.radius_over_tau_sq, report.discrepancy
    );
    write_json(&cfg.out_dir.join("limitset.json"), &report)?;
    Ok(())
}

pub fn verify(cfg: &RunConfig) -> Result<(), Failure> {
    let report = run_suite(cfg)?;
    for c in &report.checks {
        println!("{} criterion {:<3} {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name);
    }
    let path = cfg.out_dir.join("verify.json");
    std::fs::write(&path, report.to_json() + "\n")?;
    println!("wrote {}", path.display());
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Checks(report.failing))
    }
}

pub fn render(cfg: &RunConfig) -> Result<(), Failure> {
    let fam = cfg.family()?;
    let params = cfg.resolve_basin(&fam)?;
    let r = &cfg.render;
    let (modulus, argument) = render_slices(&params, r.slice, r.width, r.height)?;
    if modulus.is_empty_region() && argument.is_empty_region() {
        eprintln!("warning: no basin points on the slice |y| = {}", r.slice);
    }
    for (name, raster) in [("basin_modulus.ppm", &modulus), ("basin_argument.ppm", &argument)] {
        let path = cfg.out_dir.join(name);
        raster.write_p6(BufWriter::new(File::create(&path)?))?;
        println!("wrote {} ({} member pixels)", path.display(), raster.members);
    }
    Ok(())
}
