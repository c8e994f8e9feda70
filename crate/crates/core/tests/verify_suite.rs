use prodgeom::ambient::SpaceForm;
use prodgeom::classa::{ClassAImmersion, ThetaProfile};
use prodgeom::cmc::{example_catalog, solve, CmcProblem, ExampleConfig, ExampleId};
use prodgeom::factors::{FactorModel, IsoKind, IsoparametricSpec};
use prodgeom::verify::{
    fd_jacobian, fd_weingarten, run_suite, run_suite_with_mutation, ChartPoint, FdConfig,
    Mutation, ReportStatus, SampleSpec,
};

fn example(id: ExampleId) -> ExampleConfig {
    example_catalog().into_iter().find(|e| e.id == id).unwrap()
}

fn spec(points: usize) -> SampleSpec {
    SampleSpec {
        seed: 17,
        points,
        ..SampleSpec::default()
    }
}

/// The two-curvature x sphere example, started off its constant solution.
fn moving_two_curvature() -> ClassAImmersion {
    let ex = example(ExampleId::TwoCurvatureSphere);
    let prob = CmcProblem {
        theta0: ex.theta + 0.2,
        ..ex.problem()
    };
    let sol = solve(&prob).unwrap();
    assert!(sol.is_complete());
    ex.immersion_with(ThetaProfile::Tabulated(sol.profile)).unwrap()
}

#[test]
fn catalog_passes_with_default_tolerances() {
    for ex in example_catalog() {
        let rep = run_suite(&ex.immersion().unwrap(), &spec(40), &FdConfig::default());
        assert_eq!(rep.status, ReportStatus::Passed, "{}: {:?}", ex.id.name(), rep.failed_checks());
    }
}

#[test]
fn ode_profile_passes() {
    let rep = run_suite(&moving_two_curvature(), &spec(40), &FdConfig::default());
    assert_eq!(rep.status, ReportStatus::Passed, "{:?}", rep.checks);
    // the s-direction identities are not vacuous here
    let f = moving_two_curvature();
    assert!(f.theta_profile().theta_prime(0.1).unwrap().abs() > 0.1);
}

#[test]
fn second_order_stencil_also_passes() {
    let cfg = FdConfig {
        order: 2,
        step: 1e-5,
        ..FdConfig::default()
    };
    let ex = example(ExampleId::HorosphereHyperplane);
    let rep = run_suite(&ex.immersion().unwrap(), &spec(20), &cfg);
    assert!(rep.check("weingarten_fd").unwrap().passed);
}

#[test]
fn every_mutation_trips_its_target() {
    let constant = example(ExampleId::TwoCurvatureSphere).immersion().unwrap();
    let moving = moving_two_curvature();
    for m in Mutation::ALL {
        let f = if m == Mutation::ScaleThetaPrime { &moving } else { &constant };
        let rep = run_suite_with_mutation(f, &spec(10), &FdConfig::default(), Some(m));
        let check = rep.check(m.target()).unwrap();
        assert!(!check.passed, "{m:?} left {} passing: {check:?}", m.target());
        assert_eq!(rep.status, ReportStatus::Failed);
    }
}

#[test]
fn checks_without_a_dedicated_mutation_still_fail() {
    let moving = moving_two_curvature();
    let cfg = FdConfig::default();
    let run = |m| run_suite_with_mutation(&moving, &spec(10), &cfg, Some(m));
    assert!(!run(Mutation::OffsetH).check("mean_curvature_fd").unwrap().passed);
    assert!(!run(Mutation::ScaleXi).check("ders2").unwrap().passed);
    assert!(!run(Mutation::ScaleThetaPrime).check("ders2").unwrap().passed);
}

#[test]
fn flipped_second_block_commutes_but_fails_weingarten() {
    let f = example(ExampleId::TwoCurvatureSphere).immersion().unwrap();
    let rep = run_suite_with_mutation(&f, &spec(10), &FdConfig::default(), Some(Mutation::FlipA2));
    assert!(rep.check("commutation_ar").unwrap().passed);
    assert!(!rep.check("weingarten_fd").unwrap().passed);
}

#[test]
fn splitting_angle_is_refused() {
    let ex = example(ExampleId::HorosphereHyperplane);
    let f = ex
        .immersion_with(ThetaProfile::constant(0.3))
        .and_then(|_| {
            ClassAImmersion::new(
                3,
                5,
                FactorModel::new(ex.factor1.clone())?,
                FactorModel::new(ex.factor2.clone())?,
                ThetaProfile::constant(std::f64::consts::FRAC_PI_2),
            )
        })
        .unwrap();
    let rep = run_suite(&f, &spec(5), &FdConfig::default());
    assert_eq!(rep.status, ReportStatus::Refused);
    assert!(rep.notice.as_deref().unwrap().contains("split"));
}

#[test]
fn report_round_trips_through_json() {
    let f = example(ExampleId::SphereSphere).immersion().unwrap();
    let rep = run_suite(&f, &spec(5), &FdConfig::default());
    let json = serde_json::to_string(&rep).unwrap();
    let back: prodgeom::verify::VerificationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rep);
    assert_eq!(run_suite(&f, &spec(5), &FdConfig::default()), rep);
}

fn model(form: SpaceForm, kind: IsoKind) -> FactorModel {
    FactorModel::new(IsoparametricSpec::new(form, kind).unwrap()).unwrap()
}

#[test]
fn totally_geodesic_flat_factors_have_zero_weingarten() {
    let f = ClassAImmersion::new(
        3,
        5,
        model(SpaceForm::euclidean(3), IsoKind::EucHyperplane),
        model(SpaceForm::euclidean(3), IsoKind::EucHyperplane),
        ThetaProfile::constant(0.9),
    )
    .unwrap();
    let p = ChartPoint {
        s: 0.1,
        x1: vec![0.2, -0.3],
        x2: vec![0.4, 0.1],
    };
    let w = fd_weingarten(&f, &p, &FdConfig::default()).unwrap();
    assert!(w.abs().max() <= 1e-6);
}

#[test]
fn horosphere_hyperplane_weingarten_blocks() {
    let ex = example(ExampleId::HorosphereHyperplane);
    let f = ex.immersion().unwrap();
    let p = ChartPoint {
        s: -0.05,
        x1: vec![0.3, 0.2],
        x2: vec![-0.1, 0.4],
    };
    let w = fd_weingarten(&f, &p, &FdConfig::default()).unwrap();
    let sin = ex.theta.sin();
    // horosphere shape operator is the identity; the hyperplane's vanishes
    for i in 0..5 {
        for j in 0..5 {
            let want = if i == j && (1..3).contains(&i) { -sin } else { 0.0 };
            assert!((w[(i, j)] - want).abs() <= 1e-6, "({i},{j}) {}", w[(i, j)]);
        }
    }
}

#[test]
fn jacobian_columns_are_normal_to_eta() {
    let ex = example(ExampleId::SphereTwoCurvature);
    let f = ex.immersion().unwrap();
    let p = ChartPoint {
        s: 0.12,
        x1: vec![0.1, -0.2, 0.3, 0.05],
        x2: vec![0.2, -0.4],
    };
    let k = f.k();
    let jac = fd_jacobian(
        |q| Ok(f.evaluate(q[0], &q[1..k], &q[k..])?.into_coords()),
        &p.to_vec(),
        &FdConfig::default(),
    )
    .unwrap();
    let eta = f.unit_normal(p.s, &p.x1, &p.x2).unwrap();
    let layout = f.layout();
    for j in 0..jac.ncols() {
        let col: Vec<f64> = jac.column(j).iter().copied().collect();
        assert!(layout.dot(&col, eta.coords()).abs() <= 1e-6);
    }
}
