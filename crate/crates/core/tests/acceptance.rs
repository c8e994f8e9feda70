//! End-to-end acceptance criteria. Runs as a plain binary so every criterion
//! prints exactly one PASS/FAIL line; exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use prodgeom::ambient::SpaceForm;
use prodgeom::classa::ThetaProfile;
use prodgeom::cmc::{
    constant_theta_residual, example_catalog, linspace, scan_constant_solutions, solve,
    CmcProblem, ExampleConfig, ExampleId, HMode, ScanConfig,
};
use prodgeom::factors::{FactorModel, IsoKind, IsoparametricSpec};
use prodgeom::verify::{fd_factor_weingarten, run_suite, FdConfig, SampleSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn example(id: ExampleId) -> ExampleConfig {
    example_catalog().into_iter().find(|e| e.id == id).unwrap()
}

fn random_points(seed: u64, count: usize, k: usize, n: usize) -> Vec<(f64, Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = rng.random_range(-0.2..0.2);
            let x1 = (0..k - 1).map(|_| rng.random_range(-0.5..0.5)).collect();
            let x2 = (0..n - k).map(|_| rng.random_range(-0.5..0.5)).collect();
            (s, x1, x2)
        })
        .collect()
}

fn grid101() -> Vec<f64> {
    linspace(-0.2, 0.2, 101)
}

/// `-2 sin t (tanh(p - s cos t) + coth(p - s cos t))/2 + 4 cos t coth(2p - s sin t)`,
/// coded directly from the closed forms.
fn two_curvature_sphere_lhs(theta: f64, phi: f64, s: f64) -> f64 {
    let (sn, cs) = theta.sin_cos();
    let u = phi - s * cs;
    let hh = 0.5 * (u.tanh() + 1.0 / u.tanh());
    let hg = 1.0 / (2.0 * phi - s * sn).tanh();
    -2.0 * sn * hh + 4.0 * cs * hg
}

fn ex53() -> Outcome {
    let ex = example(ExampleId::TwoCurvatureSphere);
    let theta = 2f64.atan();
    let lib = constant_theta_residual(theta, &ex.problem(), &grid101()).unwrap();
    let oracle = grid101()
        .iter()
        .map(|&s| two_curvature_sphere_lhs(theta, 0.7, s).abs())
        .fold(0.0, f64::max);
    let big = ex.immersion().unwrap().product_data(0.1).unwrap().big_theta;
    let ok = lib <= 1e-12 && oracle <= 1e-12 && (big - 0.6).abs() <= 1e-12;
    outcome(
        ok,
        format!("residual {lib:.2e} (direct {oracle:.2e}), Theta {big:.15}"),
    )
}

fn ex54() -> Outcome {
    let ex = example(ExampleId::SphereTwoCurvature);
    let theta = 0.5f64.atan();
    let res = constant_theta_residual(theta, &ex.problem(), &grid101()).unwrap();
    let big = ex.immersion().unwrap().product_data(-0.1).unwrap().big_theta;
    let ok = (ex.theta - theta).abs() == 0.0 && res <= 1e-12 && (big + 0.6).abs() <= 1e-12;
    outcome(ok, format!("residual {res:.2e}, Theta {big:.15}"))
}

fn ex51() -> Outcome {
    let ex = example(ExampleId::HorosphereHyperplane);
    let f = ex.immersion().unwrap();
    let want = -2.0 * FRAC_PI_6.sin() / 5.0;
    let hs: Vec<f64> = random_points(51, 200, 3, 5)
        .iter()
        .map(|(s, x1, x2)| f.mean_curvature(*s, x1, x2).unwrap())
        .collect();
    let spread = hs.iter().fold(0.0f64, |m, h| m.max((h - hs[0]).abs()));
    let dev = hs.iter().fold(0.0f64, |m, h| m.max((h - want).abs()));
    let ok = (ex.k, ex.n, ex.theta) == (3, 5, FRAC_PI_6) && spread <= 1e-10 && dev <= 1e-10;
    outcome(
        ok,
        format!("H spread {spread:.2e}, |H + 0.2| {dev:.2e} over 200 points"),
    )
}

fn ex55() -> Outcome {
    let mut worst = 0.0f64;
    for (lambda, mu) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let ex = ExampleConfig::horospheres(lambda, mu, FRAC_PI_3).unwrap();
        let f = ex.immersion().unwrap();
        let (sn, cs) = FRAC_PI_3.sin_cos();
        let want = (-f64::from(lambda) * 2.0 * sn + f64::from(mu) * 2.0 * cs) / 5.0;
        for (s, x1, x2) in random_points(55, 50, 3, 5) {
            worst = worst.max((f.mean_curvature(s, &x1, &x2).unwrap() - want).abs());
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |H - formula| {worst:.2e} over 4 orientations x 50 points"),
    )
}

fn ex52() -> Outcome {
    let ex = example(ExampleId::SphereSphere);
    let res = constant_theta_residual(FRAC_PI_4, &ex.problem(), &grid101()).unwrap();
    let f = ex.immersion().unwrap();
    let h = random_points(52, 50, ex.k, ex.n)
        .iter()
        .map(|(s, x1, x2)| f.mean_curvature(*s, x1, x2).unwrap().abs())
        .fold(0.0, f64::max);
    let big = f.product_data(0.0).unwrap().big_theta;
    let ok = res <= 1e-12 && h <= 1e-12 && big.abs() <= 1e-12;
    outcome(ok, format!("residual {res:.2e}, max |H| {h:.2e}, Theta {big:.1e}"))
}

fn fd_certification() -> Outcome {
    let cfg = FdConfig::default();
    let spec = SampleSpec {
        seed: 6,
        ..SampleSpec::default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for ex in example_catalog() {
        let start = Instant::now();
        let rep = run_suite(&ex.immersion().unwrap(), &spec, &cfg);
        let elapsed = start.elapsed();
        let get = |name: &str| rep.check(name).map_or(f64::INFINITY, |c| c.max_error);
        let pass = rep.all_passed()
            && rep.points_checked == 200
            && get("weingarten_fd") <= 1e-6
            && get("commutation_ar") <= 1e-9
            && get("pi_identities") <= 1e-12
            && get("first_fundamental_form") <= 1e-7
            && elapsed < Duration::from_secs(5);
        if !pass {
            ok = false;
            parts.push(format!("{} failed {:?}", ex.id.name(), rep.failed_checks()));
        } else {
            parts.push(format!(
                "{} W {:.1e} AR {:.1e} pi {:.1e} g {:.1e} {:.2}s",
                ex.id.name(),
                get("weingarten_fd"),
                get("commutation_ar"),
                get("pi_identities"),
                get("first_fundamental_form"),
                elapsed.as_secs_f64()
            ));
        }
    }
    outcome(ok, parts.join("; "))
}

/// Forward Euler on `theta' = n H + (k-1) sin theta` (horosphere x hyperplane),
/// sampled every `stride` steps.
fn euler_horosphere(theta0: f64, h_target: f64, dir: f64, len: f64) -> Vec<(f64, f64)> {
    let h = 1e-6;
    let steps = (len / h).round() as usize;
    let (mut th, mut out) = (theta0, vec![(0.0, theta0)]);
    for j in 1..=steps {
        th += dir * h * (5.0 * h_target + 2.0 * th.sin());
        if j % 10_000 == 0 {
            out.push((dir * j as f64 * h, th));
        }
    }
    out
}

fn ode() -> Outcome {
    let ex = example(ExampleId::HorosphereHyperplane);
    let mut prob = ex.problem();
    prob.s_range = (-0.2, 0.2);
    let eq = solve(&prob).unwrap();
    let eq_dev = (0..eq.profile.len())
        .map(|j| (eq.profile.node(j).1 - ex.theta).abs())
        .fold(0.0, f64::max);

    // off-equilibrium start, so the oracles see a moving angle
    let theta0 = 1.2;
    let moving = CmcProblem { theta0, ..prob.clone() };
    let rk = ThetaProfile::Tabulated(solve(&moving).unwrap().profile);
    let mut euler_dev = 0.0f64;
    for dir in [1.0, -1.0] {
        for (s, th) in euler_horosphere(theta0, ex.mean_curvature, dir, 0.2) {
            euler_dev = euler_dev.max((rk.theta(s).unwrap() - th).abs());
        }
    }

    let reference = ThetaProfile::Tabulated(
        solve(&CmcProblem { step: 1e-6, ..moving.clone() }).unwrap().profile,
    );
    let err = |step: f64| {
        let p = ThetaProfile::Tabulated(solve(&CmcProblem { step, ..moving.clone() }).unwrap().profile);
        linspace(-0.2, 0.2, 11)
            .into_iter()
            .map(|s| (p.theta(s).unwrap() - reference.theta(s).unwrap()).abs())
            .fold(0.0, f64::max)
    };
    let ratio = err(0.04) / err(0.02);
    let ok = eq_dev <= 1e-8 && euler_dev <= 1e-6 && (12.0..=20.0).contains(&ratio);
    outcome(
        ok,
        format!("equilibrium drift {eq_dev:.1e}, RK4 vs Euler {euler_dev:.1e}, halving ratio {ratio:.2}"),
    )
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn scanner() -> Outcome {
    let template = example(ExampleId::TwoCurvatureSphere).problem();
    let cfg = ScanConfig {
        h_mode: HMode::Fixed(0.0),
        theta_grid: ScanConfig::uniform_theta_grid(2000),
        s_grid: grid101(),
        tol: 1e-9,
        resolution: 1e-10,
    };
    let roots = scan_constant_solutions(&template, &cfg);
    // the four arctan(+-2) branches, filtered by their residual
    let base = 2f64.atan();
    let branches: Vec<f64> = [base, PI - base, PI + base, 2.0 * PI - base]
        .into_iter()
        .filter(|&t| constant_theta_residual(t, &template, &cfg.s_grid).unwrap() <= 1e-9)
        .collect();
    let matched = roots.len() == branches.len()
        && branches
            .iter()
            .all(|b| roots.iter().any(|r| angle_gap(r.theta, *b) <= 1e-6));

    let sphere = |phi| {
        IsoparametricSpec::new(SpaceForm::hyperbolic(3), IsoKind::HypGeodesicSphere { phi })
            .unwrap()
            .profile()
    };
    let mismatched = CmcProblem {
        k: 3,
        n: 5,
        profile_h: sphere(0.5),
        profile_g: sphere(0.9),
        h_target: 0.0,
        theta0: 0.0,
        s_range: (-0.2, 0.2),
        step: 0.01,
    };
    let spurious = scan_constant_solutions(&mismatched, &cfg);
    outcome(
        matched && !branches.is_empty() && spurious.is_empty(),
        format!(
            "found {:?} for branches {:?}; mismatched template {} roots",
            roots.iter().map(|r| r.theta).collect::<Vec<_>>(),
            branches,
            spurious.len()
        ),
    )
}

fn profiles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let identity = (0..20)
        .map(|_| {
            let phi: f64 = rng.random_range(0.1..2.0);
            ((1.0 / (2.0 * phi).tanh()) - 0.5 * (phi.tanh() + 1.0 / phi.tanh())).abs()
        })
        .fold(0.0, f64::max);

    let cases = [
        (SpaceForm::hyperbolic(3), IsoKind::HypHorosphere),
        (SpaceForm::hyperbolic(3), IsoKind::HypEquidistant { phi: 0.6 }),
        (SpaceForm::hyperbolic(4), IsoKind::HypGeodesicSphere { phi: 0.8 }),
        (SpaceForm::hyperbolic(5), IsoKind::HypTwoCurvature { phi: 0.7, m: 2 }),
        (SpaceForm::euclidean(4), IsoKind::EucSphereCylinder { lambda: 1.5, k: 2 }),
        (SpaceForm::sphere(3), IsoKind::SphMulti { curvatures: vec![(0.9, 2)] }),
        (
            SpaceForm::sphere(4),
            IsoKind::SphMulti {
                curvatures: vec![(0.5, 1), (0.5 + std::f64::consts::FRAC_PI_2, 2)],
            },
        ),
    ];
    let cfg = FdConfig::default();
    let mut trace_dev = 0.0f64;
    for (form, kind) in cases {
        let spec = IsoparametricSpec::new(form, kind).unwrap();
        let model = FactorModel::new(spec.clone()).unwrap();
        let profile = spec.profile();
        for s in [-0.3, -0.1, 0.0, 0.15, 0.3] {
            let x: Vec<f64> = (0..spec.dim()).map(|_| rng.random_range(-0.5..0.5)).collect();
            let w = fd_factor_weingarten(&model, s, &x, &cfg).unwrap();
            let h = profile.mean_curvature(s).unwrap();
            trace_dev = trace_dev.max((w.trace() / spec.dim() as f64 - h).abs());
        }
    }
    outcome(
        identity <= 1e-12 && trace_dev <= 1e-6,
        format!("coth identity {identity:.1e}, profile vs FD trace {trace_dev:.1e}"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 9] = [
        ("two-curvature x sphere: residual and Theta = 3/5", ex53, Duration::from_millis(100)),
        ("sphere x two-curvature: residual and Theta = -3/5", ex54, Duration::from_millis(100)),
        ("horosphere x hyperplane: constant H = -0.2", ex51, Duration::from_millis(500)),
        ("horospheres with orientations: H formula", ex55, Duration::from_secs(5)),
        ("congruent spheres: minimal, Theta = 0", ex52, Duration::from_secs(5)),
        ("FD certification of the catalog", fd_certification, Duration::from_secs(25)),
        ("ODE equilibrium, Euler oracle, 4th-order convergence", ode, Duration::from_secs(2)),
        ("constant-angle scanner", scanner, Duration::from_secs(5)),
        ("mean-curvature profile identities", profiles, Duration::from_secs(5)),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let passed = out.passed && elapsed <= *budget;
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {} [{}] {name}: {} ({:.3}s, budget {:.1}s)",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
    }
    println!("acceptance: {}/9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
