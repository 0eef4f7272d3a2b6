use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use toeplitz_spectra::analysis::{build_report, polyline_error_bound};
use toeplitz_spectra::linalg::{eigenvalues, singular_values};
use toeplitz_spectra::operators::{hs_bound, hs_difference_sq_series, hs_difference_sq_truncated, FiniteSection, SectionKind};
use toeplitz_spectra::spectra::pseudospectrum;
use toeplitz_spectra::symbol::CurveDiagnostics;

use crate::config::RunConfig;
use crate::{CliError, Status};

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn hs_check(cfg: &RunConfig) -> Result<Status, CliError> {
    let s = &cfg.symbol;
    let tol = cfg.series_tol();
    for &n in &cfg.ladder {
        println!("N = {n:<6} hs_truncated = {:.10e}", hs_difference_sq_truncated(s, n));
    }
    let series = hs_difference_sq_series(s, tol)?;
    let bound = hs_bound(s);
    println!("hs_series     = {:.10e} (+/- {:.1e}, {} terms)", series.value, series.tail_bound, series.terms);
    println!("hs_bound      = {bound:.10e}");
    if series.value <= bound + tol {
        println!("bound holds");
        Ok(Status::Success)
    } else {
        println!("bound VIOLATED");
        Ok(Status::BoundViolation)
    }
}

#[derive(Serialize)]
struct RungFile {
    order: usize,
    converged: bool,
    sweeps: usize,
    file: String,
}

#[derive(Serialize)]
struct SpectrumSummary {
    kind: SectionKind,
    rungs: Vec<RungFile>,
}

pub fn spectrum(cfg: &RunConfig) -> Result<Status, CliError> {
    ensure_dir(&cfg.output_dir)?;
    let mut summary = SpectrumSummary {
        kind: cfg.kind.into(),
        rungs: Vec::new(),
    };
    for &n in &cfg.ladder {
        let section = FiniteSection::new(cfg.kind.into(), &cfg.symbol, n)?;
        let eig = eigenvalues(section.matrix(), cfg.max_sweeps)?;
        let mut csv = String::from("re,im\n");
        for z in &eig.values {
            let _ = writeln!(csv, "{:.16e},{:.16e}", z.re, z.im);
        }
        let file = format!("eigenvalues_{n}.csv");
        write_file(&cfg.output_dir, &file, &csv)?;
        if eig.converged {
            println!("N = {n}: {} eigenvalues, {} sweeps -> {file}", eig.values.len(), eig.sweeps);
        } else {
            eprintln!("warning: N = {n}: eigensolver did not converge; {file} holds unconverged diagonal entries");
        }
        summary.rungs.push(RungFile {
            order: n,
            converged: eig.converged,
            sweeps: eig.sweeps,
            file,
        });
    }
    write_file(&cfg.output_dir, "spectrum.json", &to_json(&summary))?;
    if summary.rungs.iter().all(|r| r.converged) {
        Ok(Status::Success)
    } else {
        Ok(Status::NonConvergence)
    }
}

pub fn pseudospectrum_cmd(cfg: &RunConfig, svd_check: bool) -> Result<Status, CliError> {
    ensure_dir(&cfg.output_dir)?;
    let section = FiniteSection::new(cfg.kind.into(), &cfg.symbol, cfg.order)?;
    let field = pseudospectrum(section.matrix(), cfg.region, cfg.grid.nx, cfg.grid.ny)?;
    write_file(&cfg.output_dir, "pseudospectrum.csv", &field.to_csv())?;
    let (lo, hi) = field.sigma_min.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    println!(
        "N = {}: {} x {} grid, sigma_min in [{lo:.6e}, {hi:.6e}] -> pseudospectrum.csv",
        cfg.order, cfg.grid.nx, cfg.grid.ny
    );
    if svd_check {
        let mut csv = String::from("re,im,sigma_min,sigma_min_svd\n");
        let mut worst = 0.0f64;
        for (z, v) in field.nodes() {
            let exact = singular_values(&section.matrix().shifted(z)).last().copied().unwrap_or(0.0);
            worst = worst.max((v - exact).abs() / exact.max(f64::MIN_POSITIVE));
            let _ = writeln!(csv, "{:.16e},{:.16e},{:.16e},{:.16e}", z.re, z.im, v, exact);
        }
        write_file(&cfg.output_dir, "pseudospectrum_svd_check.csv", &csv)?;
        println!("svd check: max relative gap {worst:.3e} -> pseudospectrum_svd_check.csv");
    }
    Ok(Status::Success)
}

pub fn report(cfg: &RunConfig) -> Result<Status, CliError> {
    ensure_dir(&cfg.output_dir)?;
    let report = build_report(&cfg.symbol, &cfg.report_options())?;
    write_file(&cfg.output_dir, "report.json", &to_json(&report))?;
    print!("{}", report.summary_table());
    println!("-> report.json");
    if !report.converged() {
        eprintln!("warning: rungs {:?} did not converge and were skipped", report.skipped_rungs);
        Ok(Status::NonConvergence)
    } else if !report.hs_bound_holds {
        Ok(Status::BoundViolation)
    } else {
        Ok(Status::Success)
    }
}

#[derive(Serialize)]
struct CurveSummary {
    samples: usize,
    wiener_norm: f64,
    dist_error_bound: f64,
    /// Absent for curves that collapse to a point.
    diagnostics: Option<CurveDiagnostics>,
}

pub fn curve(cfg: &RunConfig) -> Result<Status, CliError> {
    ensure_dir(&cfg.output_dir)?;
    let s = &cfg.symbol;
    let samples = cfg.curve_samples.unwrap_or_else(|| s.default_curve_samples());
    let curve = s.sample_curve(samples)?;
    let mut csv = String::from("theta,re,im,tangent_re,tangent_im\n");
    for (k, (p, t)) in curve.points().iter().zip(curve.tangents()).enumerate() {
        let theta = TAU * k as f64 / samples as f64;
        let _ = writeln!(csv, "{theta:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p.re, p.im, t.re, t.im);
    }
    write_file(&cfg.output_dir, "curve.csv", &csv)?;
    let diagnostics = curve.diagnostics().ok();
    match &diagnostics {
        Some(d) => println!(
            "jordan = {}, cusp_free = {}, min tangent speed = {:.6e}, min self distance = {:.6e}",
            d.jordan, d.cusp_free, d.min_tangent_speed, d.min_self_distance
        ),
        None => println!("degenerate curve (a single point)"),
    }
    let summary = CurveSummary {
        samples,
        wiener_norm: s.wiener_norm(),
        dist_error_bound: polyline_error_bound(s, samples),
        diagnostics,
    };
    write_file(&cfg.output_dir, "curve.json", &to_json(&summary))?;
    println!("{samples} samples -> curve.csv, curve.json");
    Ok(Status::Success)
}
