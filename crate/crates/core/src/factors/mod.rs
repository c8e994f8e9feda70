//! Isoparametric hypersurfaces of the space forms and their parallel families.
//!
//! Every entry is described by an [`IsoparametricSpec`]. The spec alone
//! gives the mean-curvature profile `H(s)` of the parallel family and its
//! focal set; [`FactorModel`] adds an explicit chart for the entries that
//! have one.
//!
//! Curvature conventions: angles `phi` are measured in units of the space
//! form radius `r`, so a geodesic sphere of `H^n(r)` with angle `phi` has
//! principal curvature `coth(phi) / r` and the parallel profile is
//! `coth(phi - s/r) / r`. Shape operators use `A X = -(dN X)^T`.

mod model;

pub use model::FactorModel;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ambient::SpaceForm;
use crate::error::{invalid, GeomError, Result};

/// Sign applied to the catalog normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    Standard,
    Flipped,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Standard => 1.0,
            Orientation::Flipped => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Orientation::Standard),
            -1 => Ok(Orientation::Flipped),
            _ => invalid(format!("orientation must be +1 or -1, got {sign}")),
        }
    }
}

/// Principal-curvature data of a catalog isoparametric hypersurface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum IsoKind {
    HypTotallyGeodesic,
    /// Distance-`phi` equidistant of a totally geodesic hyperplane, curvature `tanh phi`.
    HypEquidistant { phi: f64 },
    /// Horosphere, curvature `1`.
    HypHorosphere,
    /// Geodesic sphere of radius `phi`, curvature `coth phi`.
    HypGeodesicSphere { phi: f64 },
    /// `H^m x S^{d-m}`: `tanh phi` with multiplicity `m`, `coth phi` on the rest.
    HypTwoCurvature { phi: f64, m: usize },
    EucHyperplane,
    /// `S^k(1/|lambda|) x R^{d-k}`: `lambda` with multiplicity `k`, zero on the rest.
    EucSphereCylinder { lambda: f64, k: usize },
    /// Curvatures `cot phi_i` with multiplicities `m_i`.
    SphMulti { curvatures: Vec<(f64, usize)> },
}

impl IsoKind {
    fn family_eps(&self) -> i8 {
        match self {
            IsoKind::HypTotallyGeodesic
            | IsoKind::HypEquidistant { .. }
            | IsoKind::HypHorosphere
            | IsoKind::HypGeodesicSphere { .. }
            | IsoKind::HypTwoCurvature { .. } => -1,
            IsoKind::EucHyperplane | IsoKind::EucSphereCylinder { .. } => 0,
            IsoKind::SphMulti { .. } => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            IsoKind::HypTotallyGeodesic => "hyp_totally_geodesic",
            IsoKind::HypEquidistant { .. } => "hyp_equidistant",
            IsoKind::HypHorosphere => "hyp_horosphere",
            IsoKind::HypGeodesicSphere { .. } => "hyp_geodesic_sphere",
            IsoKind::HypTwoCurvature { .. } => "hyp_two_curvature",
            IsoKind::EucHyperplane => "euc_hyperplane",
            IsoKind::EucSphereCylinder { .. } => "euc_sphere_cylinder",
            IsoKind::SphMulti { .. } => "sph_multi",
        }
    }
}

/// A validated isoparametric hypersurface of `form`, of dimension `form.dim() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoparametricSpec {
    form: SpaceForm,
    kind: IsoKind,
    orientation: Orientation,
}

impl IsoparametricSpec {
    pub fn new(form: SpaceForm, kind: IsoKind) -> Result<Self> {
        Self::with_orientation(form, kind, Orientation::Standard)
    }

    pub fn with_orientation(
        form: SpaceForm,
        kind: IsoKind,
        orientation: Orientation,
    ) -> Result<Self> {
        if kind.family_eps() != form.eps() {
            return invalid(format!(
                "{} requires eps = {}, space form has eps = {}",
                kind.name(),
                kind.family_eps(),
                form.eps()
            ));
        }
        if form.dim() < 2 {
            return invalid("ambient space form must have dimension at least 2");
        }
        let d = form.dim() - 1;
        let positive_angle = |phi: f64| {
            if phi.is_finite() && phi > 0.0 {
                Ok(())
            } else {
                invalid(format!("{}: phi must be positive, got {phi}", kind.name()))
            }
        };
        match &kind {
            IsoKind::HypEquidistant { phi } | IsoKind::HypGeodesicSphere { phi } => {
                positive_angle(*phi)?
            }
            IsoKind::HypTwoCurvature { phi, m } => {
                positive_angle(*phi)?;
                if *m == 0 || *m >= d {
                    return invalid(format!(
                        "hyp_two_curvature: multiplicity m = {m} must lie in 1..{d}"
                    ));
                }
            }
            IsoKind::EucSphereCylinder { lambda, k } => {
                if !(lambda.is_finite() && *lambda != 0.0) {
                    return invalid("euc_sphere_cylinder: lambda must be non-zero");
                }
                if *k == 0 || *k > d {
                    return invalid(format!(
                        "euc_sphere_cylinder: multiplicity k = {k} must lie in 1..={d}"
                    ));
                }
            }
            IsoKind::SphMulti { curvatures } => {
                if curvatures.is_empty() {
                    return invalid("sph_multi: at least one curvature required");
                }
                let mut total = 0;
                for (i, &(phi, m)) in curvatures.iter().enumerate() {
                    if !(phi > 0.0 && phi < PI) {
                        return invalid(format!("sph_multi: phi = {phi} must lie in (0, pi)"));
                    }
                    if m == 0 {
                        return invalid("sph_multi: multiplicities must be positive");
                    }
                    if curvatures[..i].iter().any(|&(q, _)| (q - phi).abs() < 1e-12) {
                        return invalid("sph_multi: angles must be pairwise distinct");
                    }
                    total += m;
                }
                if total != d {
                    return invalid(format!(
                        "sph_multi: multiplicities sum to {total}, hypersurface dimension is {d}"
                    ));
                }
            }
            IsoKind::HypTotallyGeodesic | IsoKind::HypHorosphere | IsoKind::EucHyperplane => {}
        }
        Ok(Self {
            form,
            kind,
            orientation,
        })
    }

    pub fn form(&self) -> &SpaceForm {
        &self.form
    }

    pub fn kind(&self) -> &IsoKind {
        &self.kind
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Dimension of the hypersurface.
    pub fn dim(&self) -> usize {
        self.form.dim() - 1
    }

    /// Focal set of the parallel family, oriented.
    pub fn focal_distances(&self) -> FocalSet {
        let r = self.form.radius();
        let o = self.orientation.sign();
        match &self.kind {
            IsoKind::HypTotallyGeodesic
            | IsoKind::HypEquidistant { .. }
            | IsoKind::HypHorosphere
            | IsoKind::EucHyperplane => FocalSet::Empty,
            IsoKind::HypGeodesicSphere { phi } | IsoKind::HypTwoCurvature { phi, .. } => {
                FocalSet::Finite(vec![o * r * phi])
            }
            IsoKind::EucSphereCylinder { lambda, .. } => FocalSet::Finite(vec![o / lambda]),
            IsoKind::SphMulti { curvatures } => FocalSet::Periodic {
                offsets: curvatures.iter().map(|&(phi, _)| o * r * phi).collect(),
                period: PI * r,
            },
        }
    }

    /// Principal curvatures of the base hypersurface (oriented) with multiplicities.
    pub fn principal_curvatures(&self) -> Vec<(f64, usize)> {
        let r = self.form.radius();
        let o = self.orientation.sign();
        let d = self.dim();
        let base: Vec<(f64, usize)> = match &self.kind {
            IsoKind::HypTotallyGeodesic => vec![(0.0, d)],
            IsoKind::HypEquidistant { phi } => vec![(phi.tanh() / r, d)],
            IsoKind::HypHorosphere => vec![(1.0 / r, d)],
            IsoKind::HypGeodesicSphere { phi } => vec![(1.0 / (r * phi.tanh()), d)],
            IsoKind::HypTwoCurvature { phi, m } => {
                vec![(phi.tanh() / r, *m), (1.0 / (r * phi.tanh()), d - m)]
            }
            IsoKind::EucHyperplane => vec![(0.0, d)],
            IsoKind::EucSphereCylinder { lambda, k } => {
                let mut v = vec![(*lambda, *k)];
                if *k < d {
                    v.push((0.0, d - k));
                }
                v
            }
            IsoKind::SphMulti { curvatures } => curvatures
                .iter()
                .map(|&(phi, m)| (1.0 / (r * phi.tan()), m))
                .collect(),
        };
        base.into_iter().map(|(l, m)| (o * l, m)).collect()
    }

    pub fn profile(&self) -> MeanCurvatureProfile {
        MeanCurvatureProfile::new(self.clone())
    }
}

/// Set of focal distances of a parallel family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FocalSet {
    Empty,
    Finite(Vec<f64>),
    /// `{ offset + j * period : j in Z }` for each offset.
    Periodic { offsets: Vec<f64>, period: f64 },
}

impl FocalSet {
    /// Distance from `s` to the nearest focal distance (`inf` when empty).
    pub fn distance(&self, s: f64) -> f64 {
        match self {
            FocalSet::Empty => f64::INFINITY,
            FocalSet::Finite(v) => v.iter().map(|f| (s - f).abs()).fold(f64::INFINITY, f64::min),
            FocalSet::Periodic { offsets, period } => offsets
                .iter()
                .map(|f| {
                    let x = (s - f).rem_euclid(*period);
                    x.min(period - x)
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, s: f64, tol: f64) -> bool {
        self.distance(s) <= tol
    }

    /// Largest open interval around `0` free of focal distances.
    pub fn interval_around_zero(&self) -> (f64, f64) {
        let candidates: Vec<f64> = match self {
            FocalSet::Empty => Vec::new(),
            FocalSet::Finite(v) => v.clone(),
            FocalSet::Periodic { offsets, period } => offsets
                .iter()
                .flat_map(|&f| {
                    let j = (-f / period).floor();
                    [f + j * period, f + (j + 1.0) * period]
                })
                .collect(),
        };
        let hi = candidates
            .iter()
            .copied()
            .filter(|&f| f > 0.0)
            .fold(f64::INFINITY, f64::min);
        let lo = candidates
            .iter()
            .copied()
            .filter(|&f| f < 0.0)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Mean curvature `H(s)` of the parallel family `h_s` of an isoparametric spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvatureProfile {
    spec: IsoparametricSpec,
    valid_interval: (f64, f64),
}

impl MeanCurvatureProfile {
    pub fn new(spec: IsoparametricSpec) -> Self {
        let valid_interval = spec.focal_distances().interval_around_zero();
        Self {
            spec,
            valid_interval,
        }
    }

    pub fn spec(&self) -> &IsoparametricSpec {
        &self.spec
    }

    /// Open interval around `0` on which the profile is smooth.
    pub fn valid_interval(&self) -> (f64, f64) {
        self.valid_interval
    }

    pub fn contains(&self, s: f64) -> bool {
        let (lo, hi) = self.valid_interval;
        s > lo && s < hi
    }

    /// `H(s)` from the closed-form parallel curvature formulas, divided by the
    /// hypersurface dimension. A flipped orientation gives `-H(-s)`.
    pub fn mean_curvature(&self, s: f64) -> Result<f64> {
        if !self.contains(s) {
            let (lo, hi) = self.valid_interval;
            return Err(GeomError::Domain { s, lo, hi });
        }
        let o = self.spec.orientation.sign();
        let r = self.spec.form.radius();
        // Unoriented profile at u = o*s, in units of the radius.
        let u = o * s / r;
        let d = self.spec.dim() as f64;
        let n_h = match &self.spec.kind {
            IsoKind::EucHyperplane => 0.0,
            IsoKind::HypTotallyGeodesic => d * (-u).tanh(),
            IsoKind::HypHorosphere => d,
            IsoKind::HypEquidistant { phi } => d * (phi - u).tanh(),
            IsoKind::HypGeodesicSphere { phi } => d / (phi - u).tanh(),
            IsoKind::HypTwoCurvature { phi, m } => {
                let m = *m as f64;
                m * (phi - u).tanh() + (d - m) / (phi - u).tanh()
            }
            IsoKind::EucSphereCylinder { lambda, k } => {
                (*k as f64) * lambda / (1.0 - u * lambda)
            }
            IsoKind::SphMulti { curvatures } => curvatures
                .iter()
                .map(|&(phi, m)| m as f64 / (phi - u).tan())
                .sum(),
        };
        Ok(o * n_h / (d * r))
    }
}

/// Convenience wrapper matching the profile operation.
pub fn mean_curvature(profile: &MeanCurvatureProfile, s: f64) -> Result<f64> {
    profile.mean_curvature(s)
}

/// Convenience wrapper matching the focal-set operation.
pub fn focal_distances(spec: &IsoparametricSpec) -> FocalSet {
    spec.focal_distances()
}
