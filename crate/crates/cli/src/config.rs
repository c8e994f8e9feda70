//! The JSON run configuration shared by every subcommand.

use prodgeom::cmc::{CmcProblem, HMode};
use prodgeom::factors::{IsoKind, IsoparametricSpec, Orientation};
use prodgeom::{FdConfig, SpaceForm};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub factor1: FactorConfig,
    pub factor2: FactorConfig,
    pub theta: ThetaConfig,
    pub k: usize,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: FdConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub sample: SampleConfig,
    #[serde(default)]
    pub scan: ScanSettings,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub space: SpaceConfig,
    pub kind: String,
    #[serde(default)]
    pub params: Params,
    #[serde(default = "standard_orientation")]
    pub orientation: i32,
}

fn standard_orientation() -> i32 {
    1
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub eps: i8,
    #[serde(default = "unit_radius")]
    pub radius: f64,
    pub dim: usize,
}

fn unit_radius() -> f64 {
    1.0
}

/// Shape parameters; which ones are required depends on `kind`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub phi: Option<f64>,
    pub m: Option<usize>,
    pub lambda: Option<f64>,
    pub k: Option<usize>,
    pub curvatures: Option<Vec<(f64, usize)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaMode {
    Constant,
    Ode,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaConfig {
    pub mode: ThetaMode,
    pub value: Option<f64>,
    #[serde(rename = "H")]
    pub h: Option<f64>,
    pub theta0: Option<f64>,
    pub s_range: (f64, f64),
    pub step: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub points: usize,
    pub extent: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            points: 200,
            extent: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub s_points: usize,
    pub x_points: usize,
    pub extent: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            s_points: 11,
            x_points: 3,
            extent: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSettings {
    pub s_nodes: usize,
    pub tol: f64,
    pub resolution: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            s_nodes: 101,
            tol: 1e-9,
            resolution: 1e-10,
        }
    }
}

impl RunConfig {
    /// Parse and validate; every failure here is a configuration error.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let (k, n) = (self.k, self.n);
        if !(2 <= k && k < n) {
            return config(format!("need 2 <= k < n, got k = {k}, n = {n}"));
        }
        let (f1, f2) = (self.spec(1)?, self.spec(2)?);
        if f1.form().dim() != k {
            return config(format!("factor1 must have dim = k = {k}"));
        }
        if f2.form().dim() != n - k + 1 {
            return config(format!("factor2 must have dim = n - k + 1 = {}", n - k + 1));
        }

        let t = &self.theta;
        let (lo, hi) = t.s_range;
        if !(lo.is_finite() && hi.is_finite()) {
            return config("theta.s_range must be finite");
        }
        if !(t.step.is_finite() && t.step > 0.0) {
            return config(format!("theta.step must be positive, got {}", t.step));
        }
        match t.mode {
            ThetaMode::Constant => {
                if t.value.is_none() {
                    return config("theta.mode = constant requires theta.value");
                }
                if t.theta0.is_some() {
                    return config("theta.theta0 only applies to mode = ode");
                }
            }
            ThetaMode::Ode => {
                if t.theta0.is_none() || t.h.is_none() {
                    return config("theta.mode = ode requires theta.theta0 and theta.H");
                }
                if t.value.is_some() {
                    return config("theta.value only applies to mode = constant");
                }
            }
        }
        let finite = [t.value, t.h, t.theta0].into_iter().flatten().all(f64::is_finite);
        if !finite {
            return config("theta values must be finite");
        }

        self.tolerances.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.verify.points == 0 || !(self.verify.extent > 0.0) {
            return config("verify.points and verify.extent must be positive");
        }
        if self.sample.s_points == 0 || self.sample.x_points == 0 || !(self.sample.extent >= 0.0) {
            return config("sample.s_points and sample.x_points must be positive");
        }
        if self.scan.s_nodes == 0 || !(self.scan.tol > 0.0) || !(self.scan.resolution > 0.0) {
            return config("scan.s_nodes, scan.tol and scan.resolution must be positive");
        }
        Ok(())
    }

    pub fn spec(&self, which: u8) -> Result<IsoparametricSpec, CliError> {
        let f = if which == 1 { &self.factor1 } else { &self.factor2 };
        f.spec().map_err(|e| CliError::Config(format!("factor{which}: {e}")))
    }

    /// The angle the ODE starts from, or the constant angle.
    pub fn theta_start(&self) -> f64 {
        self.theta.theta0.or(self.theta.value).unwrap_or(0.0)
    }

    /// `hi <= lo` describes an empty run.
    pub fn range_is_empty(&self) -> bool {
        self.theta.s_range.1 <= self.theta.s_range.0
    }

    pub fn h_mode(&self) -> HMode {
        self.theta.h.map_or(HMode::FromOrigin, HMode::Fixed)
    }

    pub fn problem(&self) -> Result<CmcProblem, CliError> {
        Ok(CmcProblem {
            k: self.k,
            n: self.n,
            profile_h: self.spec(1)?.profile(),
            profile_g: self.spec(2)?.profile(),
            h_target: self.theta.h.unwrap_or(0.0),
            theta0: self.theta_start(),
            s_range: self.theta.s_range,
            step: self.theta.step,
        })
    }
}

impl FactorConfig {
    fn spec(&self) -> Result<IsoparametricSpec, String> {
        let sp = self.space;
        let form = SpaceForm::new(sp.dim, sp.eps, sp.radius).map_err(|e| e.to_string())?;
        let orientation = Orientation::from_sign(self.orientation).map_err(|e| e.to_string())?;
        let kind = self.params.kind(&self.kind)?;
        IsoparametricSpec::with_orientation(form, kind, orientation).map_err(|e| e.to_string())
    }
}

impl Params {
    fn kind(&self, tag: &str) -> Result<IsoKind, String> {
        let need = |v: Option<f64>, name: &str| v.ok_or(format!("{tag} requires params.{name}"));
        let need_n = |v: Option<usize>, name: &str| v.ok_or(format!("{tag} requires params.{name}"));
        let (kind, used): (IsoKind, &[&str]) = match tag {
            "hyp_totally_geodesic" => (IsoKind::HypTotallyGeodesic, &[]),
            "hyp_horosphere" => (IsoKind::HypHorosphere, &[]),
            "euc_hyperplane" => (IsoKind::EucHyperplane, &[]),
            "hyp_equidistant" => (IsoKind::HypEquidistant { phi: need(self.phi, "phi")? }, &["phi"]),
            "hyp_geodesic_sphere" => (
                IsoKind::HypGeodesicSphere { phi: need(self.phi, "phi")? },
                &["phi"],
            ),
            "hyp_two_curvature" => (
                IsoKind::HypTwoCurvature {
                    phi: need(self.phi, "phi")?,
                    m: need_n(self.m, "m")?,
                },
                &["phi", "m"],
            ),
            "euc_sphere_cylinder" => (
                IsoKind::EucSphereCylinder {
                    lambda: need(self.lambda, "lambda")?,
                    k: need_n(self.k, "k")?,
                },
                &["lambda", "k"],
            ),
            "sph_multi" => (
                IsoKind::SphMulti {
                    curvatures: self
                        .curvatures
                        .clone()
                        .ok_or(format!("{tag} requires params.curvatures"))?,
                },
                &["curvatures"],
            ),
            other => return Err(format!("unknown kind {other:?}")),
        };
        let given = [
            ("phi", self.phi.is_some()),
            ("m", self.m.is_some()),
            ("lambda", self.lambda.is_some()),
            ("k", self.k.is_some()),
            ("curvatures", self.curvatures.is_some()),
        ];
        if let Some((name, _)) = given.iter().find(|(name, set)| *set && !used.contains(name)) {
            return Err(format!("params.{name} does not apply to {tag}"));
        }
        Ok(kind)
    }
}

fn config<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

/// Apply a `name=value` override to the tolerance block.
pub fn override_tolerance(cfg: &FdConfig, assignment: &str) -> Result<FdConfig, CliError> {
    let (name, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected name=value, got {assignment:?}")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("tolerance {name}: not a number")))?;
    let mut doc = serde_json::to_value(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let slot = doc
        .get_mut(name.trim())
        .ok_or_else(|| CliError::Config(format!("unknown tolerance {name:?}")))?;
    *slot = if slot.is_u64() {
        serde_json::Value::from(value as u64)
    } else {
        serde_json::Value::from(value)
    };
    let out: FdConfig = serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))?;
    out.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(out)
}
