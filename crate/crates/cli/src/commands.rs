use std::fmt::Write as _;

use prodgeom::cmc::{self, constant_theta_residual, example_catalog, linspace, scan_constant_solutions};
use prodgeom::verify::run_suite;
use prodgeom::{
    ClassAImmersion, FactorModel, FdConfig, ReportStatus, SampleSpec, ScanConfig, ThetaProfile,
};
use serde::Serialize;

use crate::config::{RunConfig, ThetaMode};
use crate::error::CliError;

/// Rows above this count are refused rather than written.
const MAX_SAMPLE_ROWS: usize = 10_000_000;

/// Tolerance for the exact-value comparisons in `examples`.
const EXAMPLE_TOL: f64 = 1e-12;

/// Text to emit and the exit code that goes with it.
#[derive(Debug)]
pub struct Output {
    pub body: String,
    pub code: u8,
}

impl Output {
    fn ok(body: String) -> Self {
        Self { body, code: 0 }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

/// `lo, lo + step, ...` up to `hi`.
fn step_grid((lo, hi): (f64, f64), step: f64) -> impl Iterator<Item = f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count).map(move |j| lo + j as f64 * step)
}

pub fn schema(command: &str) -> &'static str {
    match command {
        "profile" => {
            "profile: CSV with header factor,s,H\n\
             factor  1 or 2\n\
             s       displacement of the parallel hypersurface\n\
             H       its mean curvature\n\
             Rows at or beyond a focal distance are dropped with a warning.\n"
        }
        "solve" => {
            "solve: CSV with header s,theta,a,b,H_residual\n\
             s           arc length along the profile curve, one row per RK4 node\n\
             theta       angle of the profile curve\n\
             a, b        displacements of the two factors\n\
             H_residual  |H(s) - theta.H| for the mean curvature rebuilt from the node\n"
        }
        "scan" => {
            "scan: JSON array of {\"theta\", \"residual\"}, sorted by theta\n\
             residual  sup over the s grid of |lhs(theta, s) - n H|\n"
        }
        "verify" => "verify: JSON verification report (status, notice, seed, point counts, checks)\n",
        "sample" => {
            "sample: CSV with header s,x1_1..x1_{k-1},x2_1..x2_{n-k},f_1..f_N,Theta,H\n\
             s, x1_i, x2_j  chart coordinates\n\
             f_i            ambient coordinates, first factor block then second\n\
             Theta          product angle function\n\
             H              mean curvature\n"
        }
        "examples" => {
            "examples: JSON summary {seed, points, passed, total, examples[]}\n\
             each example: name, k, n, theta, residual, big_theta, expected_big_theta,\n\
             mean_curvature, expected_mean_curvature, verify_status, failed_checks, passed\n"
        }
        _ => "",
    }
}

fn models(cfg: &RunConfig) -> Result<(FactorModel, FactorModel), CliError> {
    Ok((FactorModel::new(cfg.spec(1)?)?, FactorModel::new(cfg.spec(2)?)?))
}

/// The immersion described by the config, solving the ODE when asked to.
fn immersion(cfg: &RunConfig) -> Result<ClassAImmersion, CliError> {
    let profile = match cfg.theta.mode {
        ThetaMode::Constant => ThetaProfile::constant(cfg.theta_start()),
        ThetaMode::Ode => {
            let sol = cmc::solve(&cfg.problem()?)?;
            for h in &sol.halts {
                eprintln!("warning: factor{} focal boundary near s = {}", h.factor, h.s);
            }
            ThetaProfile::Tabulated(sol.profile)
        }
    };
    let (m1, m2) = models(cfg)?;
    Ok(ClassAImmersion::new(cfg.k, cfg.n, m1, m2, profile)?)
}

pub fn profile(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut out = String::from("factor,s,H\n");
    if cfg.range_is_empty() {
        return Ok(Output::ok(out));
    }
    for which in [1u8, 2] {
        let prof = cfg.spec(which)?.profile();
        let mut dropped = 0usize;
        for s in step_grid(cfg.theta.s_range, cfg.theta.step) {
            match prof.mean_curvature(s) {
                Ok(h) => writeln!(out, "{which},{},{}", num(s), num(h)).unwrap(),
                Err(_) => dropped += 1,
            }
        }
        if dropped > 0 {
            let (lo, hi) = prof.valid_interval();
            eprintln!("warning: factor{which}: dropped {dropped} rows outside the focal-free interval ({lo}, {hi})");
        }
    }
    Ok(Output::ok(out))
}

pub fn solve(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut out = String::from("s,theta,a,b,H_residual\n");
    let Some(target) = cfg.theta.h else {
        return Err(CliError::Config("solve requires theta.H".into()));
    };
    if cfg.range_is_empty() {
        return Ok(Output::ok(out));
    }
    let sol = cmc::solve(&cfg.problem()?)?;
    let (m1, m2) = models(cfg)?;
    let f = ClassAImmersion::new(cfg.k, cfg.n, m1, m2, ThetaProfile::Tabulated(sol.profile.clone()))?;
    let (x1, x2) = (vec![0.0; cfg.k - 1], vec![0.0; cfg.n - cfg.k]);
    for j in 0..sol.profile.len() {
        let (s, theta, _, a, b) = sol.profile.node(j);
        let residual = (f.mean_curvature(s, &x1, &x2)? - target).abs();
        writeln!(out, "{},{},{},{},{}", num(s), num(theta), num(a), num(b), num(residual)).unwrap();
    }
    let mut code = 0;
    for h in &sol.halts {
        let side = if h.direction > 0 { "forward" } else { "backward" };
        eprintln!("warning: {side} integration stopped at s = {} near a focal distance of factor{}", h.s, h.factor);
        code = 3;
    }
    Ok(Output { body: out, code })
}

#[derive(Serialize)]
struct RootRow {
    theta: f64,
    residual: f64,
}

pub fn scan(cfg: &RunConfig, theta_grid: usize) -> Result<Output, CliError> {
    if theta_grid == 0 {
        return Err(CliError::Config("--theta-grid must be positive".into()));
    }
    let template = cfg.problem()?;
    template.validate()?;
    let (lo, hi) = cfg.theta.s_range;
    let sc = ScanConfig {
        h_mode: cfg.h_mode(),
        theta_grid: ScanConfig::uniform_theta_grid(theta_grid),
        s_grid: linspace(lo, hi, cfg.scan.s_nodes),
        tol: cfg.scan.tol,
        resolution: cfg.scan.resolution,
    };
    let rows: Vec<RootRow> = scan_constant_solutions(&template, &sc)
        .into_iter()
        .map(|r| RootRow {
            theta: r.theta,
            residual: r.residual,
        })
        .collect();
    Ok(Output::ok(json(&rows)))
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = immersion(cfg)?;
    let spec = SampleSpec {
        seed: cfg.seed,
        points: cfg.verify.points,
        s_range: cfg.theta.s_range,
        extent: cfg.verify.extent,
    };
    let report = run_suite(&f, &spec, &cfg.tolerances);
    let code = if report.status == ReportStatus::Passed { 0 } else { 4 };
    if let Some(notice) = &report.notice {
        eprintln!("notice: {notice}");
    }
    Ok(Output {
        body: json(&report),
        code,
    })
}

pub fn sample(cfg: &RunConfig) -> Result<Output, CliError> {
    let (k, n) = (cfg.k, cfg.n);
    let mut header = vec!["s".to_string()];
    header.extend((1..k).map(|i| format!("x1_{i}")));
    header.extend((1..=n - k).map(|i| format!("x2_{i}")));
    let ambient = cfg.spec(1)?.form().ambient_dim() + cfg.spec(2)?.form().ambient_dim();
    header.extend((1..=ambient).map(|i| format!("f_{i}")));
    header.extend(["Theta".to_string(), "H".to_string()]);
    let mut out = header.join(",");
    out.push('\n');
    if cfg.range_is_empty() {
        return Ok(Output::ok(out));
    }

    let sc = cfg.sample;
    let dims = n - 1;
    let rows = (sc.x_points as f64).powi(dims as i32 - 1) * (sc.x_points * sc.s_points) as f64;
    if rows > MAX_SAMPLE_ROWS as f64 {
        return Err(CliError::Config(format!("sample grid has {rows} rows, limit {MAX_SAMPLE_ROWS}")));
    }
    let f = immersion(cfg)?;
    let (lo, hi) = cfg.theta.s_range;
    let (dlo, dhi) = f.theta_profile().domain();
    let s_grid = if sc.s_points == 1 {
        vec![0.5 * (lo + hi)]
    } else {
        linspace(lo.max(dlo), hi.min(dhi), sc.s_points)
    };
    let x_grid = if sc.x_points == 1 {
        vec![0.0]
    } else {
        linspace(-sc.extent, sc.extent, sc.x_points)
    };

    let mut skipped = 0usize;
    let mut digits = vec![0usize; dims];
    for &s in &s_grid {
        digits.iter_mut().for_each(|d| *d = 0);
        loop {
            let x: Vec<f64> = digits.iter().map(|&d| x_grid[d]).collect();
            let (x1, x2) = x.split_at(k - 1);
            let row = (|| -> prodgeom::Result<String> {
                let p = f.evaluate(s, x1, x2)?;
                let big_theta = f.product_data(s)?.big_theta;
                let h = f.mean_curvature(s, x1, x2)?;
                let cols: Vec<String> = std::iter::once(s)
                    .chain(x.iter().copied())
                    .chain(p.coords().iter().copied())
                    .chain([big_theta, h])
                    .map(num)
                    .collect();
                Ok(cols.join(","))
            })();
            match row {
                Ok(line) => {
                    out.push_str(&line);
                    out.push('\n');
                }
                Err(_) => skipped += 1,
            }
            // odometer over the chart coordinates, last one fastest
            let Some(pos) = digits.iter().rposition(|&d| d + 1 < x_grid.len()) else {
                break;
            };
            digits[pos] += 1;
            digits[pos + 1..].iter_mut().for_each(|d| *d = 0);
        }
    }
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} singular grid points");
    }
    Ok(Output::ok(out))
}

#[derive(Serialize)]
struct ExampleSummary {
    name: &'static str,
    k: usize,
    n: usize,
    theta: f64,
    residual: f64,
    big_theta: f64,
    expected_big_theta: f64,
    mean_curvature: f64,
    expected_mean_curvature: f64,
    verify_status: ReportStatus,
    failed_checks: Vec<String>,
    passed: bool,
}

#[derive(Serialize)]
struct CatalogSummary {
    seed: u64,
    points: usize,
    passed: usize,
    total: usize,
    examples: Vec<ExampleSummary>,
}

pub fn examples(seed: u64, points: usize, tol: &FdConfig) -> Result<Output, CliError> {
    let s_grid = linspace(-0.2, 0.2, 101);
    let spec = SampleSpec {
        seed,
        points,
        ..SampleSpec::default()
    };
    let mut rows = Vec::new();
    for ex in example_catalog() {
        let prob = ex.problem();
        let residual = constant_theta_residual(ex.theta, &prob, &s_grid)?;
        let f = ex.immersion()?;
        let big_theta = f.product_data(0.0)?.big_theta;
        let h = f.mean_curvature(0.0, &vec![0.0; ex.k - 1], &vec![0.0; ex.n - ex.k])?;
        let report = run_suite(&f, &spec, tol);
        let passed = residual <= EXAMPLE_TOL
            && (big_theta - ex.big_theta).abs() <= EXAMPLE_TOL
            && (h - ex.mean_curvature).abs() <= EXAMPLE_TOL
            && report.status == ReportStatus::Passed;
        rows.push(ExampleSummary {
            name: ex.id.name(),
            k: ex.k,
            n: ex.n,
            theta: ex.theta,
            residual,
            big_theta,
            expected_big_theta: ex.big_theta,
            mean_curvature: h,
            expected_mean_curvature: ex.mean_curvature,
            verify_status: report.status,
            failed_checks: report.failed_checks().into_iter().map(String::from).collect(),
            passed,
        });
    }
    let passed = rows.iter().filter(|r| r.passed).count();
    let summary = CatalogSummary {
        seed,
        points,
        passed,
        total: rows.len(),
        examples: rows,
    };
    let code = if passed == summary.total { 0 } else { 4 };
    Ok(Output {
        body: json(&summary),
        code,
    })
}
