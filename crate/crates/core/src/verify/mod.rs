//! Finite-difference oracles for the closed forms of [`crate::factors`] and
//! [`crate::classa`].
//!
//! Everything here differentiates maps into the flat ambient space directly;
//! no intrinsic connection is computed. Weingarten maps and the product
//! tensor are recovered in the chart basis by solving the normal equations
//! `J^T G J X = J^T G V` against the FD Jacobian `J`, where `G` is the
//! ambient signature.

mod suite;

pub use suite::{run_suite, run_suite_with_mutation, Mutation, SampleSpec, MUTATION_SIZE};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::classa::ClassAImmersion;
use crate::error::{invalid, GeomError, Result};
use crate::factors::FactorModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdConfig {
    pub step: f64,
    /// Central-difference order, 2 or 4.
    pub order: u8,
    /// FD-vs-analytic comparisons of first-order geometry.
    pub tol_geometry: f64,
    /// Exact algebraic identities between analytic quantities.
    pub tol_algebraic: f64,
    /// Block structure of the FD first fundamental form.
    pub tol_metric: f64,
    /// Product-structure identities evaluated in closed form.
    pub tol_identity: f64,
    /// Scalar derivative identities along `d/ds`.
    pub tol_derivative: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: 1e-4,
            order: 4,
            tol_geometry: 1e-6,
            tol_algebraic: 1e-9,
            tol_metric: 1e-7,
            tol_identity: 1e-12,
            tol_derivative: 1e-7,
        }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return invalid(format!("FD step must be positive, got {}", self.step));
        }
        if !matches!(self.order, 2 | 4) {
            return invalid(format!("FD order must be 2 or 4, got {}", self.order));
        }
        let tols = [
            self.tol_geometry,
            self.tol_algebraic,
            self.tol_metric,
            self.tol_identity,
            self.tol_derivative,
        ];
        if tols.iter().any(|t| !(*t >= 0.0)) {
            return invalid("tolerances must be non-negative");
        }
        Ok(())
    }

    /// Offsets (in steps) and weights of the central stencil.
    fn stencil(&self) -> &'static [(f64, f64)] {
        match self.order {
            2 => &[(1.0, 0.5), (-1.0, -0.5)],
            _ => &[
                (2.0, -1.0 / 12.0),
                (1.0, 8.0 / 12.0),
                (-1.0, -8.0 / 12.0),
                (-2.0, 1.0 / 12.0),
            ],
        }
    }

    /// Largest offset the stencil reaches from the base point.
    pub fn reach(&self) -> f64 {
        self.step * f64::from(self.order / 2)
    }
}

/// Central-difference Jacobian of `map` at `point`: one column per chart
/// direction.
pub fn fd_jacobian<F>(map: F, point: &[f64], cfg: &FdConfig) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    let h = cfg.step;
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(point.len());
    let mut p = point.to_vec();
    for j in 0..point.len() {
        let mut col: Option<Vec<f64>> = None;
        for &(m, w) in cfg.stencil() {
            p[j] = point[j] + m * h;
            let v = map(&p)?;
            let c = col.get_or_insert_with(|| vec![0.0; v.len()]);
            if c.len() != v.len() {
                return invalid("map changed output dimension");
            }
            c.iter_mut().zip(&v).for_each(|(ci, vi)| *ci += w * vi);
        }
        p[j] = point[j];
        cols.push(col.unwrap_or_default().into_iter().map(|c| c / h).collect());
    }
    let rows = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]))
}

/// Central-difference derivative of a scalar function.
pub fn fd_derivative<F>(f: F, x: f64, cfg: &FdConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let jac = fd_jacobian(|p| Ok(vec![f(p[0])?]), &[x], cfg)?;
    Ok(jac[(0, 0)])
}

/// `J^T G J`.
pub fn induced_metric(jac: &DMatrix<f64>, signs: &[f64]) -> DMatrix<f64> {
    jac.transpose() * weighted(jac, signs)
}

fn weighted(m: &DMatrix<f64>, signs: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| signs[i] * m[(i, j)])
}

/// Coefficients `X` of the tangential part of the columns of `v` in the
/// frame `jac`, from `J^T G J X = J^T G V`.
pub fn tangent_coefficients(
    jac: &DMatrix<f64>,
    signs: &[f64],
    v: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let g = induced_metric(jac, signs);
    let eig = g.clone().symmetric_eigenvalues();
    let max = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let min = eig.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
    if !(max > 0.0 && min / max > 1e-12) {
        return Err(GeomError::IllConditioned(format!(
            "FD tangent frame is rank deficient (eigenvalue ratio {:e})",
            min / max
        )));
    }
    let rhs = weighted(jac, signs).transpose() * v;
    g.full_piv_lu()
        .solve(&rhs)
        .ok_or_else(|| GeomError::IllConditioned("FD metric is singular".into()))
}

fn layout_signs(f: &ClassAImmersion) -> Vec<f64> {
    let layout = f.layout();
    (0..layout.total_dim()).map(|i| layout.sign(i)).collect()
}

fn chart_maps(
    f: &ClassAImmersion,
) -> (
    impl Fn(&[f64]) -> Result<Vec<f64>> + '_,
    impl Fn(&[f64]) -> Result<Vec<f64>> + '_,
) {
    let k = f.k();
    let point = move |p: &[f64]| Ok(f.evaluate(p[0], &p[1..k], &p[k..])?.into_coords());
    let normal = move |p: &[f64]| Ok(f.unit_normal(p[0], &p[1..k], &p[k..])?.into_coords());
    (point, normal)
}

/// A point `(s, x1, x2)` of the chart of a class-A immersion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub s: f64,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

impl ChartPoint {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(1 + self.x1.len() + self.x2.len());
        v.push(self.s);
        v.extend_from_slice(&self.x1);
        v.extend_from_slice(&self.x2);
        v
    }

    /// Split a flat chart vector; `x1` takes `k - 1` entries.
    pub fn from_slice(p: &[f64], k: usize) -> Self {
        Self {
            s: p[0],
            x1: p[1..k].to_vec(),
            x2: p[k..].to_vec(),
        }
    }
}

/// Weingarten map of `f` at `point` from FD derivatives of `evaluate` and
/// `unit_normal`, with the sign `f_* A X = -(d eta)(X)^T`.
pub fn fd_weingarten(f: &ClassAImmersion, point: &ChartPoint, cfg: &FdConfig) -> Result<DMatrix<f64>> {
    if !f.is_regular(point.s, &point.x1, &point.x2) {
        return Err(GeomError::Degenerate(format!("irregular point at s = {}", point.s)));
    }
    let p = point.to_vec();
    let (map, normal) = chart_maps(f);
    let jac = fd_jacobian(map, &p, cfg)?;
    let dn = fd_jacobian(normal, &p, cfg)?;
    tangent_coefficients(&jac, &layout_signs(f), &(-dn))
}

/// Weingarten map of the parallel hypersurface `h_s` of a factor at `x`.
pub fn fd_factor_weingarten(
    model: &FactorModel,
    s: f64,
    x: &[f64],
    cfg: &FdConfig,
) -> Result<DMatrix<f64>> {
    let sig = model.form().signature();
    let signs: Vec<f64> = (0..sig.total_dim()).map(|i| sig.sign(i)).collect();
    let jac = fd_jacobian(|y| Ok(model.parallel_immersion(s, y)?.into_coords()), x, cfg)?;
    let dn = fd_jacobian(|y| Ok(model.parallel_normal(s, y)?.into_coords()), x, cfg)?;
    tangent_coefficients(&jac, &signs, &(-dn))
}

/// The product tensor `R` recovered from the FD frame: tangential part of
/// the second-factor projection of each chart direction.
pub fn fd_product_tensor(
    f: &ClassAImmersion,
    point: &ChartPoint,
    cfg: &FdConfig,
) -> Result<DMatrix<f64>> {
    let (map, _) = chart_maps(f);
    let jac = fd_jacobian(map, &point.to_vec(), cfg)?;
    tangent_coefficients(&jac, &layout_signs(f), &project_second(&jac, f))
}

fn project_second(m: &DMatrix<f64>, f: &ClassAImmersion) -> DMatrix<f64> {
    let n1 = f.layout().first.total_dim();
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if i < n1 { 0.0 } else { m[(i, j)] })
}

/// Outcome of one check across all sampled points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Passed,
    Failed,
    /// The configuration splits locally; nothing was checked.
    Refused,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub status: ReportStatus,
    pub notice: Option<String>,
    pub seed: u64,
    pub points_requested: usize,
    pub points_checked: usize,
    pub points_skipped: usize,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.status == ReportStatus::Passed
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_map_is_exact() {
        let cfg = FdConfig::default();
        let m = |p: &[f64]| Ok(vec![2.0 * p[0] - p[1], 3.0 * p[1], p[0] + 0.5 * p[1]]);
        let j = fd_jacobian(m, &[0.3, -0.7], &cfg).unwrap();
        let want = DMatrix::from_row_slice(3, 2, &[2.0, -1.0, 0.0, 3.0, 1.0, 0.5]);
        assert!((j - want).abs().max() < 1e-12);
    }

    #[test]
    fn order_four_converges_at_fourth_order() {
        let f = |x: f64| Ok((2.0 * x).sin());
        let exact = 2.0 * (2.0f64 * 0.4).cos();
        let err = |h| {
            let cfg = FdConfig {
                step: h,
                ..FdConfig::default()
            };
            (fd_derivative(f, 0.4, &cfg).unwrap() - exact).abs()
        };
        let ratio = err(0.04) / err(0.02);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn order_two_converges_at_second_order() {
        let f = |x: f64| Ok(x.exp());
        let err = |h| {
            let cfg = FdConfig {
                step: h,
                order: 2,
                ..FdConfig::default()
            };
            (fd_derivative(f, 0.1, &cfg).unwrap() - 0.1f64.exp()).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn config_validation() {
        let bad_step = FdConfig {
            step: 0.0,
            ..FdConfig::default()
        };
        let bad_order = FdConfig {
            order: 3,
            ..FdConfig::default()
        };
        assert!(bad_step.validate().is_err());
        assert!(bad_order.validate().is_err());
        assert!(FdConfig::default().validate().is_ok());
    }

    #[test]
    fn rank_deficient_frame_is_reported() {
        let jac = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 0.0, 1.0, 2.0]);
        let v = DMatrix::zeros(3, 2);
        assert!(matches!(
            tangent_coefficients(&jac, &[1.0, 1.0, 1.0], &v),
            Err(GeomError::IllConditioned(_))
        ));
    }

    #[test]
    fn chart_point_round_trip() {
        let p = ChartPoint {
            s: 0.1,
            x1: vec![0.2, 0.3],
            x2: vec![0.4],
        };
        assert_eq!(ChartPoint::from_slice(&p.to_vec(), 3), p);
    }
}
