//! Class-A hypersurfaces in products of space forms.
//!
//! Immersions of the form `f(s, x1, x2) = h_{a(s)}(x1) + g_{b(s)}(x2)` built
//! from parallel families of isoparametric hypersurfaces, their exact
//! geometric data, the constant mean curvature ODE, and a finite-difference
//! verification suite.

pub mod ambient;
pub mod classa;
pub mod cmc;
pub mod error;
pub mod factors;
pub mod verify;

pub use ambient::{AVec, Factor, ProductLayout, Signature, SpaceForm};
pub use classa::{ClassAImmersion, GeometryData, ProductData, ShapeBlocks, TabulatedTheta, ThetaProfile};
pub use cmc::{CmcProblem, CmcSolution, ExampleConfig, ExampleId, HMode, ScanConfig, ScanRoot};
pub use error::{GeomError, Result};
pub use factors::{FactorModel, FocalSet, IsoKind, IsoparametricSpec, MeanCurvatureProfile, Orientation};
pub use verify::{ChartPoint, FdConfig, Mutation, ReportStatus, SampleSpec, VerificationReport};
