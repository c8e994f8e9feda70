//! Worked constant-angle CMC examples with their closed-form data.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use serde::{Deserialize, Serialize};

use super::CmcProblem;
use crate::ambient::SpaceForm;
use crate::classa::{ClassAImmersion, ProductData, ThetaProfile};
use crate::error::Result;
use crate::factors::{FactorModel, IsoKind, IsoparametricSpec, Orientation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleId {
    /// Horosphere in `H^3` times a hyperplane in `R^3`.
    HorosphereHyperplane,
    /// Congruent geodesic spheres in `S^3 x S^3`.
    SphereSphere,
    /// Two-curvature hypersurface in `H^3` times a geodesic sphere in `H^5`.
    TwoCurvatureSphere,
    /// Geodesic sphere in `H^5` times a two-curvature hypersurface in `H^3`.
    SphereTwoCurvature,
    /// Horospheres in `H^3 x H^3` with chosen orientations.
    HorosphereHorosphere,
}

impl ExampleId {
    pub const ALL: [ExampleId; 5] = [
        ExampleId::HorosphereHyperplane,
        ExampleId::SphereSphere,
        ExampleId::TwoCurvatureSphere,
        ExampleId::SphereTwoCurvature,
        ExampleId::HorosphereHorosphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::HorosphereHyperplane => "horosphere_hyperplane",
            ExampleId::SphereSphere => "sphere_sphere",
            ExampleId::TwoCurvatureSphere => "two_curvature_sphere",
            ExampleId::SphereTwoCurvature => "sphere_two_curvature",
            ExampleId::HorosphereHorosphere => "horosphere_horosphere",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleConfig {
    pub id: ExampleId,
    pub k: usize,
    pub n: usize,
    pub factor1: IsoparametricSpec,
    pub factor2: IsoparametricSpec,
    /// A constant angle solving the CMC equation.
    pub theta: f64,
    /// Closed-form mean curvature at `theta`.
    pub mean_curvature: f64,
    /// Closed-form `Theta = 2 r - 1` at `theta`.
    pub big_theta: f64,
    pub s_range: (f64, f64),
    pub step: f64,
}

impl ExampleConfig {
    pub fn problem(&self) -> CmcProblem {
        CmcProblem {
            k: self.k,
            n: self.n,
            profile_h: self.factor1.profile(),
            profile_g: self.factor2.profile(),
            h_target: self.mean_curvature,
            theta0: self.theta,
            s_range: self.s_range,
            step: self.step,
        }
    }

    pub fn immersion(&self) -> Result<ClassAImmersion> {
        self.immersion_with(ThetaProfile::constant(self.theta))
    }

    pub fn immersion_with(&self, theta: ThetaProfile) -> Result<ClassAImmersion> {
        ClassAImmersion::non_splitting(
            self.k,
            self.n,
            FactorModel::new(self.factor1.clone())?,
            FactorModel::new(self.factor2.clone())?,
            theta,
        )
    }

    pub fn product_data(&self) -> ProductData {
        ProductData::from_angle(self.theta)
    }

    /// Horospheres in `H^3 x H^3` oriented by `lambda, mu = +-1`, at angle `theta`.
    pub fn horospheres(lambda: i32, mu: i32, theta: f64) -> Result<Self> {
        let horo = |sign| {
            IsoparametricSpec::with_orientation(
                SpaceForm::hyperbolic(3),
                IsoKind::HypHorosphere,
                Orientation::from_sign(sign)?,
            )
        };
        let (k, n) = (3usize, 5usize);
        let (sn, cs) = theta.sin_cos();
        let h = (-(lambda as f64) * (k - 1) as f64 * sn + mu as f64 * (n - k) as f64 * cs)
            / n as f64;
        Ok(Self {
            id: ExampleId::HorosphereHorosphere,
            k,
            n,
            factor1: horo(lambda)?,
            factor2: horo(mu)?,
            theta,
            mean_curvature: h,
            big_theta: -(2.0 * theta).cos(),
            s_range: (-0.3, 0.3),
            step: 0.01,
        })
    }
}

fn spec(form: SpaceForm, kind: IsoKind) -> IsoparametricSpec {
    IsoparametricSpec::new(form, kind).expect("catalog factors are valid")
}

/// The worked examples, in a fixed order matching [`ExampleId::ALL`].
pub fn example_catalog() -> Vec<ExampleConfig> {
    let base = |id, k, n, factor1, factor2, theta: f64, h| ExampleConfig {
        id,
        k,
        n,
        factor1,
        factor2,
        theta,
        mean_curvature: h,
        big_theta: -(2.0 * theta).cos(),
        s_range: (-0.3, 0.3),
        step: 0.01,
    };
    let sph3 = || {
        spec(
            SpaceForm::sphere(3),
            IsoKind::SphMulti {
                curvatures: vec![(0.6, 2)],
            },
        )
    };
    vec![
        base(
            ExampleId::HorosphereHyperplane,
            3,
            5,
            spec(SpaceForm::hyperbolic(3), IsoKind::HypHorosphere),
            spec(SpaceForm::euclidean(3), IsoKind::EucHyperplane),
            FRAC_PI_6,
            -0.2,
        ),
        base(ExampleId::SphereSphere, 3, 5, sph3(), sph3(), FRAC_PI_4, 0.0),
        base(
            ExampleId::TwoCurvatureSphere,
            3,
            7,
            spec(
                SpaceForm::hyperbolic(3),
                IsoKind::HypTwoCurvature { phi: 0.7, m: 1 },
            ),
            spec(
                SpaceForm::hyperbolic(5),
                IsoKind::HypGeodesicSphere { phi: 1.4 },
            ),
            2f64.atan(),
            0.0,
        ),
        base(
            ExampleId::SphereTwoCurvature,
            5,
            7,
            spec(
                SpaceForm::hyperbolic(5),
                IsoKind::HypGeodesicSphere { phi: 0.7 },
            ),
            spec(
                SpaceForm::hyperbolic(3),
                IsoKind::HypTwoCurvature { phi: 0.35, m: 1 },
            ),
            0.5f64.atan(),
            0.0,
        ),
        ExampleConfig::horospheres(1, 1, FRAC_PI_3).expect("catalog factors are valid"),
    ]
}
