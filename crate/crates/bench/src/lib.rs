//! Fixtures shared by the benchmarks.

use prodgeom::cmc::{example_catalog, linspace};
use prodgeom::{CmcProblem, ExampleConfig, ExampleId, HMode, ScanConfig};

pub fn example(id: ExampleId) -> ExampleConfig {
    example_catalog()
        .into_iter()
        .find(|e| e.id == id)
        .expect("every id is in the catalog")
}

/// The two-curvature example started off its equilibrium, so the ODE moves.
pub fn moving_problem() -> CmcProblem {
    let ex = example(ExampleId::TwoCurvatureSphere);
    CmcProblem {
        theta0: ex.theta + 0.2,
        ..ex.problem()
    }
}

pub fn minimal_scan(theta_count: usize) -> ScanConfig {
    ScanConfig {
        h_mode: HMode::Fixed(0.0),
        theta_grid: ScanConfig::uniform_theta_grid(theta_count),
        s_grid: linspace(-0.2, 0.2, 101),
        tol: 1e-9,
        resolution: 1e-10,
    }
}
