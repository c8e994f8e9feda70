//! Constant mean curvature: the angle ODE
//!
//! ```text
//! theta' = n H + (k-1) sin(theta) H^h(a) - (n-k) cos(theta) H^g(b)
//! a'     = cos(theta)
//! b'     = sin(theta)
//! ```
//!
//! its fixed-step RK4 integration, and the constant-angle residual used by
//! the scanner in [`scan`].

pub mod catalog;
pub mod scan;

pub use catalog::{example_catalog, ExampleConfig, ExampleId};
pub use scan::{scan_constant_solutions, HMode, ScanConfig, ScanRoot};

use serde::{Deserialize, Serialize};

use crate::ambient::Factor;
use crate::classa::TabulatedTheta;
use crate::error::{invalid, GeomError, Result};
use crate::factors::MeanCurvatureProfile;

/// Distance, in steps, at which integration stops before a focal distance.
pub const FOCAL_GUARD_STEPS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub s: f64,
    pub theta: f64,
    pub a: f64,
    pub b: f64,
}

impl OdeState {
    pub fn origin(theta0: f64) -> Self {
        Self {
            s: 0.0,
            theta: theta0,
            a: 0.0,
            b: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmcProblem {
    pub k: usize,
    pub n: usize,
    pub profile_h: MeanCurvatureProfile,
    pub profile_g: MeanCurvatureProfile,
    pub h_target: f64,
    pub theta0: f64,
    pub s_range: (f64, f64),
    pub step: f64,
}

impl CmcProblem {
    pub fn validate(&self) -> Result<()> {
        if !(2 <= self.k && self.k < self.n) {
            return invalid(format!("need 2 <= k <= n - 1, got k = {}, n = {}", self.k, self.n));
        }
        if self.profile_h.spec().dim() != self.k - 1 {
            return invalid(format!(
                "first factor must have dimension k - 1 = {}",
                self.k - 1
            ));
        }
        if self.profile_g.spec().dim() != self.n - self.k {
            return invalid(format!(
                "second factor must have dimension n - k = {}",
                self.n - self.k
            ));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return invalid(format!("step must be positive, got {}", self.step));
        }
        let (lo, hi) = self.s_range;
        if !(lo <= 0.0 && 0.0 <= hi) {
            return invalid(format!("s range [{lo}, {hi}] must contain 0"));
        }
        Ok(())
    }

    fn factor_h(&self, which: Factor, u: f64, s: f64) -> Result<f64> {
        let profile = match which {
            Factor::First => &self.profile_h,
            Factor::Second => &self.profile_g,
        };
        profile.mean_curvature(u).map_err(|_| GeomError::FocalBoundary {
            factor: which.number(),
            s,
        })
    }

    /// Left-hand side of the constant-angle equation at `s`:
    /// `-(k-1) sin(theta) H^h(s cos theta) + (n-k) cos(theta) H^g(s sin theta)`.
    pub fn constant_theta_lhs(&self, theta: f64, s: f64) -> Result<f64> {
        let (sn, cs) = theta.sin_cos();
        let hh = self.factor_h(Factor::First, s * cs, s)?;
        let hg = self.factor_h(Factor::Second, s * sn, s)?;
        Ok(-((self.k - 1) as f64) * sn * hh + ((self.n - self.k) as f64) * cs * hg)
    }
}

/// `(theta', a', b')` at a state.
pub fn rhs(state: &OdeState, prob: &CmcProblem) -> Result<[f64; 3]> {
    let (sn, cs) = state.theta.sin_cos();
    let hh = prob.factor_h(Factor::First, state.a, state.s)?;
    let hg = prob.factor_h(Factor::Second, state.b, state.s)?;
    let k = prob.k as f64;
    let n = prob.n as f64;
    let dtheta = n * prob.h_target + (k - 1.0) * sn * hh - (n - k) * cs * hg;
    Ok([dtheta, cs, sn])
}

fn rk4_step(state: &OdeState, h: f64, prob: &CmcProblem) -> Result<OdeState> {
    let shift = |d: &[f64; 3], c: f64| OdeState {
        s: state.s + c * h,
        theta: state.theta + c * h * d[0],
        a: state.a + c * h * d[1],
        b: state.b + c * h * d[2],
    };
    let k1 = rhs(state, prob)?;
    let k2 = rhs(&shift(&k1, 0.5), prob)?;
    let k3 = rhs(&shift(&k2, 0.5), prob)?;
    let k4 = rhs(&shift(&k3, 1.0), prob)?;
    let mix = |i: usize| h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    Ok(OdeState {
        s: state.s + h,
        theta: state.theta + mix(0),
        a: state.a + mix(1),
        b: state.b + mix(2),
    })
}

/// Where and why an integration stopped short of the requested range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalHalt {
    /// Last `s` reached before the guard tripped.
    pub s: f64,
    pub factor: u8,
    /// `+1` for the forward sweep, `-1` for the backward one.
    pub direction: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmcSolution {
    pub profile: TabulatedTheta,
    pub halts: Vec<FocalHalt>,
}

impl CmcSolution {
    pub fn is_complete(&self) -> bool {
        self.halts.is_empty()
    }
}

fn guard(prob: &CmcProblem, st: &OdeState) -> Option<u8> {
    let margin = FOCAL_GUARD_STEPS * prob.step;
    let near = |p: &MeanCurvatureProfile, u: f64| {
        let (lo, hi) = p.valid_interval();
        u <= lo + margin || u >= hi - margin
    };
    if near(&prob.profile_h, st.a) {
        Some(1)
    } else if near(&prob.profile_g, st.b) {
        Some(2)
    } else {
        None
    }
}

fn sweep(prob: &CmcProblem, steps: usize, dir: f64) -> (Vec<OdeState>, Option<FocalHalt>) {
    let mut out = Vec::with_capacity(steps);
    let mut st = OdeState::origin(prob.theta0);
    let halt = |st: &OdeState, factor| FocalHalt {
        s: st.s,
        factor,
        direction: dir as i8,
    };
    for _ in 0..steps {
        let next = match rk4_step(&st, dir * prob.step, prob) {
            Ok(next) => next,
            Err(GeomError::FocalBoundary { factor, .. }) => return (out, Some(halt(&st, factor))),
            Err(_) => return (out, Some(halt(&st, 0))),
        };
        if let Some(factor) = guard(prob, &next) {
            return (out, Some(halt(&st, factor)));
        }
        out.push(next);
        st = next;
    }
    (out, None)
}

/// Integrate the angle ODE from `s = 0` over `prob.s_range` with fixed-step
/// RK4. Integration halts (recorded in [`CmcSolution::halts`]) once `a` or
/// `b` comes within [`FOCAL_GUARD_STEPS`] steps of a focal distance.
pub fn solve(prob: &CmcProblem) -> Result<CmcSolution> {
    prob.validate()?;
    let origin = OdeState::origin(prob.theta0);
    let mut halts = Vec::new();
    if let Some(factor) = guard(prob, &origin) {
        halts.push(FocalHalt {
            s: 0.0,
            factor,
            direction: 0,
        });
    }
    let (lo, hi) = prob.s_range;
    let n_fwd = (hi / prob.step + 1e-9).floor() as usize;
    let n_bwd = (-lo / prob.step + 1e-9).floor() as usize;
    let (fwd, bwd) = if halts.is_empty() {
        let (fwd, hf) = sweep(prob, n_fwd, 1.0);
        let (bwd, hb) = sweep(prob, n_bwd, -1.0);
        halts.extend(hb);
        halts.extend(hf);
        (fwd, bwd)
    } else {
        (Vec::new(), Vec::new())
    };

    let states: Vec<OdeState> = bwd
        .iter()
        .rev()
        .copied()
        .chain(std::iter::once(origin))
        .chain(fwd.iter().copied())
        .collect();
    let nodes = states
        .iter()
        .map(|st| Ok([st.theta, rhs(st, prob)?[0]]))
        .collect::<Result<Vec<_>>>()?;
    let s0 = -(bwd.len() as f64) * prob.step;
    Ok(CmcSolution {
        profile: TabulatedTheta::from_nodes(s0, prob.step, &nodes)?,
        halts,
    })
}

/// `max_s |LHS(theta, s) - n H|` over `s_grid` for a constant angle.
pub fn constant_theta_residual(theta: f64, prob: &CmcProblem, s_grid: &[f64]) -> Result<f64> {
    let nh = prob.n as f64 * prob.h_target;
    s_grid.iter().try_fold(0.0f64, |acc, &s| {
        Ok(acc.max((prob.constant_theta_lhs(theta, s)? - nh).abs()))
    })
}

/// `n` equally spaced nodes on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
