//! Search for constant-angle CMC solutions.
//!
//! The residual `max_s |LHS(theta, s) - n H|` is sampled on an angle grid.
//! Grid points already within tolerance are accepted as they are; every other
//! local minimum is refined by bisecting on the sign of the one-sided slope
//! and kept only if the refined residual is within tolerance. Angles closer
//! than a quarter of the grid spacing to a multiple of `pi/2` are excluded,
//! since there the hypersurface splits.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{constant_theta_residual, CmcProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum HMode {
    /// Match a prescribed mean curvature.
    Fixed(f64),
    /// Take `n H` from the left-hand side at `s = 0` for each candidate angle.
    FromOrigin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub h_mode: HMode,
    pub theta_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub tol: f64,
    /// Bracket width at which refinement stops.
    pub resolution: f64,
}

impl ScanConfig {
    /// Cell-centred grid of `count` angles on `[0, 2 pi)`.
    pub fn uniform_theta_grid(count: usize) -> Vec<f64> {
        (0..count)
            .map(|j| 2.0 * PI * (j as f64 + 0.5) / count as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRoot {
    pub theta: f64,
    pub residual: f64,
    /// Mean curvature matched by this angle.
    pub mean_curvature: f64,
}

fn grid_spacing(grid: &[f64]) -> f64 {
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min)
}

fn splitting_distance(theta: f64) -> f64 {
    let r = theta.rem_euclid(FRAC_PI_2);
    r.min(FRAC_PI_2 - r)
}

struct Residual<'a> {
    template: CmcProblem,
    cfg: &'a ScanConfig,
}

impl Residual<'_> {
    fn target(&self, theta: f64) -> Option<f64> {
        match self.cfg.h_mode {
            HMode::Fixed(h) => Some(h),
            HMode::FromOrigin => self
                .template
                .constant_theta_lhs(theta, 0.0)
                .ok()
                .map(|lhs| lhs / self.template.n as f64),
        }
    }

    fn eval(&self, theta: f64) -> (f64, f64) {
        let Some(h) = self.target(theta) else {
            return (f64::INFINITY, f64::NAN);
        };
        let mut prob = self.template.clone();
        prob.h_target = h;
        let r = constant_theta_residual(theta, &prob, &self.cfg.s_grid).unwrap_or(f64::INFINITY);
        (r, h)
    }

    fn refine(&self, mut lo: f64, mut hi: f64) -> f64 {
        let delta = 0.25 * self.cfg.resolution;
        while hi - lo > self.cfg.resolution {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid + delta).0 < self.eval(mid - delta).0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Constant angles solving the CMC equation for the factors of `template`,
/// sorted by angle. `template.h_target` is ignored in favour of `cfg.h_mode`.
pub fn scan_constant_solutions(template: &CmcProblem, cfg: &ScanConfig) -> Vec<ScanRoot> {
    let grid = &cfg.theta_grid;
    let spacing = grid_spacing(grid);
    let exclusion = if spacing.is_finite() {
        0.25 * spacing
    } else {
        cfg.resolution
    };
    let res = Residual {
        template: template.clone(),
        cfg,
    };
    let values: Vec<(f64, f64)> = grid
        .iter()
        .map(|&th| {
            if splitting_distance(th) < exclusion {
                (f64::INFINITY, f64::NAN)
            } else {
                res.eval(th)
            }
        })
        .collect();

    let mut roots: Vec<ScanRoot> = Vec::new();
    let push = |roots: &mut Vec<ScanRoot>, root: ScanRoot| {
        if splitting_distance(root.theta) < exclusion {
            return;
        }
        if roots
            .iter()
            .all(|r| (r.theta - root.theta).abs() > cfg.resolution.max(1e-9))
        {
            roots.push(root);
        }
    };

    for (j, &(r, h)) in values.iter().enumerate() {
        if r <= cfg.tol {
            push(
                &mut roots,
                ScanRoot {
                    theta: grid[j],
                    residual: r,
                    mean_curvature: h,
                },
            );
        }
    }
    for j in 0..values.len() {
        let r = values[j].0;
        if r <= cfg.tol || !r.is_finite() {
            continue;
        }
        let left = j.checked_sub(1);
        let right = (j + 1 < values.len()).then_some(j + 1);
        let below = |i: Option<usize>| i.is_none_or(|i| r <= values[i].0);
        if !(below(left) && below(right)) {
            continue;
        }
        let lo = left.map_or(grid[j] - 0.5 * spacing.min(1.0), |i| grid[i]);
        let hi = right.map_or(grid[j] + 0.5 * spacing.min(1.0), |i| grid[i]);
        let theta = res.refine(lo, hi);
        let (residual, h) = res.eval(theta);
        if residual <= cfg.tol {
            push(
                &mut roots,
                ScanRoot {
                    theta,
                    residual,
                    mean_curvature: h,
                },
            );
        }
    }
    roots.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    roots
}
