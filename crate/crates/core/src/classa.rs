//! Hypersurfaces `f(s, x1, x2) = h_{a(s)}(x1) + g_{b(s)}(x2)` of a product of
//! two space forms, built from parallel families of the factors and an
//! angle function `theta(s)` with `a' = cos theta`, `b' = sin theta`.
//!
//! Chart coordinates are ordered `(s, x1, x2)`, so every tangent-space
//! matrix below is `n x n` with a `1 | k-1 | n-k` block structure.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ambient::{assemble_product_point, AVec, Factor, ProductLayout};
use crate::error::{invalid, GeomError, Result};
use crate::factors::{FactorModel, MeanCurvatureProfile};

/// A tabulated angle function on a uniform grid through `s = 0`.
///
/// `theta` between nodes is the cubic Hermite interpolant with slopes
/// `theta'`; `a` and `b` are its exact primitives of `cos`, `sin` up to
/// quadrature error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedTheta {
    s0: f64,
    step: f64,
    theta: Vec<f64>,
    dtheta: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

struct Cell {
    j: usize,
    t: f64,
}

/// Positive nodes and weights of the eight-point Gauss-Legendre rule on `[-1, 1]`.
const GAUSS_LEGENDRE_8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

fn hermite(y0: f64, m0: f64, y1: f64, m1: f64, t: f64, h: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * m1;
    let dv = ((6.0 * t2 - 6.0 * t) * y0
        + (3.0 * t2 - 4.0 * t + 1.0) * h * m0
        + (-6.0 * t2 + 6.0 * t) * y1
        + (3.0 * t2 - 2.0 * t) * h * m1)
        / h;
    (v, dv)
}

impl TabulatedTheta {
    /// Build from nodes carrying `(theta, theta')`; node `j` sits at
    /// `s0 + j * step` and one node must sit at `s = 0`. The primitives `a`,
    /// `b` are integrated from the interpolated angle, so `a' = cos theta(s)`
    /// and `b' = sin theta(s)` hold between nodes as well as on them.
    pub fn from_nodes(s0: f64, step: f64, nodes: &[[f64; 2]]) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return invalid(format!("grid step must be positive, got {step}"));
        }
        if nodes.is_empty() {
            return invalid("tabulated theta needs at least one node");
        }
        let origin = -s0 / step;
        if s0 > 0.0 || (origin - origin.round()).abs() > 1e-9 || origin.round() as usize >= nodes.len()
        {
            return invalid("tabulated theta grid must contain s = 0 as a node");
        }
        let j0 = origin.round() as usize;
        let len = nodes.len();
        let mut tab = Self {
            s0,
            step,
            theta: nodes.iter().map(|n| n[0]).collect(),
            dtheta: nodes.iter().map(|n| n[1]).collect(),
            a: vec![0.0; len],
            b: vec![0.0; len],
        };
        for j in j0 + 1..len {
            let (ca, cb) = tab.cell_integrals(j - 1, 1.0);
            tab.a[j] = tab.a[j - 1] + ca;
            tab.b[j] = tab.b[j - 1] + cb;
        }
        for j in (0..j0).rev() {
            let (ca, cb) = tab.cell_integrals(j, 1.0);
            tab.a[j] = tab.a[j + 1] - ca;
            tab.b[j] = tab.b[j + 1] - cb;
        }
        Ok(tab)
    }

    /// Build from angle samples alone, with `theta'` from fourth-order
    /// finite differences.
    pub fn from_samples(s0: f64, step: f64, theta: &[f64]) -> Result<Self> {
        let len = theta.len();
        if len < 5 {
            return invalid("at least five samples are needed to differentiate theta");
        }
        let h = step;
        let nodes: Vec<[f64; 2]> = (0..len)
            .map(|j| {
                let y = |i: usize| theta[i];
                let d = if j >= 2 && j + 2 < len {
                    (y(j - 2) - 8.0 * y(j - 1) + 8.0 * y(j + 1) - y(j + 2)) / (12.0 * h)
                } else if j < 2 {
                    (-25.0 * y(j) + 48.0 * y(j + 1) - 36.0 * y(j + 2) + 16.0 * y(j + 3)
                        - 3.0 * y(j + 4))
                        / (12.0 * h)
                } else {
                    (25.0 * y(j) - 48.0 * y(j - 1) + 36.0 * y(j - 2) - 16.0 * y(j - 3)
                        + 3.0 * y(j - 4))
                        / (12.0 * h)
                };
                [theta[j], d]
            })
            .collect();
        Self::from_nodes(s0, step, &nodes)
    }

    /// `(int cos theta, int sin theta)` over `[s_j, s_j + t * step]` by
    /// eight-point Gauss-Legendre quadrature of the interpolant.
    fn cell_integrals(&self, j: usize, t: f64) -> (f64, f64) {
        if t == 0.0 || self.len() == 1 {
            return (0.0, 0.0);
        }
        let half = 0.5 * t;
        let (mut ca, mut cb) = (0.0, 0.0);
        for (x, w) in GAUSS_LEGENDRE_8 {
            for sign in [-1.0, 1.0] {
                let u = half * (1.0 + sign * x);
                let th = hermite(
                    self.theta[j],
                    self.dtheta[j],
                    self.theta[j + 1],
                    self.dtheta[j + 1],
                    u,
                    self.step,
                )
                .0;
                ca += w * th.cos();
                cb += w * th.sin();
            }
        }
        let scale = half * self.step;
        (scale * ca, scale * cb)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn node_s(&self, j: usize) -> f64 {
        self.s0 + j as f64 * self.step
    }

    /// `(s, theta, theta', a, b)` at node `j`.
    pub fn node(&self, j: usize) -> (f64, f64, f64, f64, f64) {
        (
            self.node_s(j),
            self.theta[j],
            self.dtheta[j],
            self.a[j],
            self.b[j],
        )
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.s0, self.node_s(self.len() - 1))
    }

    fn cell(&self, s: f64) -> Result<Cell> {
        let (lo, hi) = self.domain();
        let slack = 1e-9 * self.step + 4.0 * f64::EPSILON * s.abs();
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(GeomError::Domain { s, lo, hi });
        }
        if self.len() == 1 {
            return Ok(Cell { j: 0, t: 0.0 });
        }
        let x = (s - self.s0) / self.step;
        let j = (x.floor().max(0.0) as usize).min(self.len() - 2);
        Ok(Cell { j, t: x - j as f64 })
    }

    fn interp(&self, y: &[f64], m: impl Fn(usize) -> f64, c: &Cell) -> (f64, f64) {
        if self.len() == 1 {
            return (y[0], m(0));
        }
        hermite(y[c.j], m(c.j), y[c.j + 1], m(c.j + 1), c.t, self.step)
    }

    fn theta_pair(&self, s: f64) -> Result<(f64, f64)> {
        let c = self.cell(s)?;
        Ok(self.interp(&self.theta, |j| self.dtheta[j], &c))
    }

    fn ab_at(&self, s: f64) -> Result<(f64, f64)> {
        let c = self.cell(s)?;
        let (da, db) = self.cell_integrals(c.j, c.t);
        Ok((self.a[c.j] + da, self.b[c.j] + db))
    }
}

/// The angle function `theta(s)` with `a(s) = int cos theta`, `b(s) = int sin theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThetaProfile {
    Constant { theta: f64 },
    Tabulated(TabulatedTheta),
}

impl ThetaProfile {
    pub fn constant(theta: f64) -> Self {
        ThetaProfile::Constant { theta }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            ThetaProfile::Constant { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            ThetaProfile::Tabulated(t) => t.domain(),
        }
    }

    pub fn theta(&self, s: f64) -> Result<f64> {
        match self {
            ThetaProfile::Constant { theta } => Ok(*theta),
            ThetaProfile::Tabulated(t) => Ok(t.theta_pair(s)?.0),
        }
    }

    pub fn theta_prime(&self, s: f64) -> Result<f64> {
        match self {
            ThetaProfile::Constant { .. } => Ok(0.0),
            ThetaProfile::Tabulated(t) => Ok(t.theta_pair(s)?.1),
        }
    }

    pub fn a(&self, s: f64) -> Result<f64> {
        match self {
            ThetaProfile::Constant { theta } => Ok(s * theta.cos()),
            ThetaProfile::Tabulated(t) => Ok(t.ab_at(s)?.0),
        }
    }

    pub fn b(&self, s: f64) -> Result<f64> {
        match self {
            ThetaProfile::Constant { theta } => Ok(s * theta.sin()),
            ThetaProfile::Tabulated(t) => Ok(t.ab_at(s)?.1),
        }
    }

    pub fn a_prime(&self, s: f64) -> Result<f64> {
        Ok(self.theta(s)?.cos())
    }

    pub fn b_prime(&self, s: f64) -> Result<f64> {
        Ok(self.theta(s)?.sin())
    }
}

/// Shape operator of `f` split along the invariant blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeBlocks {
    /// Eigenvalue on `d/ds`, equal to `theta'(s)`.
    pub a_s: f64,
    /// `-sin theta * A^h_{a(s)}` on the factor-1 chart.
    pub a1: DMatrix<f64>,
    /// `cos theta * A^g_{b(s)}` on the factor-2 chart.
    pub a2: DMatrix<f64>,
}

impl ShapeBlocks {
    /// Block-diagonal `n x n` matrix in the `(s, x1, x2)` chart basis.
    pub fn assemble(&self) -> DMatrix<f64> {
        let d1 = self.a1.nrows();
        let d2 = self.a2.nrows();
        let n = 1 + d1 + d2;
        let mut m = DMatrix::zeros(n, n);
        m[(0, 0)] = self.a_s;
        m.view_mut((1, 1), (d1, d1)).copy_from(&self.a1);
        m.view_mut((1 + d1, 1 + d1), (d2, d2)).copy_from(&self.a2);
        m
    }

    pub fn trace(&self) -> f64 {
        self.a_s + self.a1.trace() + self.a2.trace()
    }
}

/// Product-structure data at a value of `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductData {
    /// Eigenvalue of `R` on `d/ds`: `sin^2 theta`.
    pub r_eigen: f64,
    /// `xi = xi_coeff * d/ds`, `xi_coeff = sin(2 theta) / 2`.
    pub xi_coeff: f64,
    /// `t = cos^2 theta`.
    pub t: f64,
    /// Product angle function `2 r - 1 = -cos 2 theta`.
    pub big_theta: f64,
}

impl ProductData {
    pub fn from_angle(theta: f64) -> Self {
        let (sn, cs) = theta.sin_cos();
        let r_eigen = sn * sn;
        Self {
            r_eigen,
            xi_coeff: sn * cs,
            t: cs * cs,
            big_theta: 2.0 * r_eigen - 1.0,
        }
    }
}

/// All exact geometric data of `f` at a chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryData {
    pub eta: AVec,
    pub shape: ShapeBlocks,
    pub product: ProductData,
    pub mean_curvature: f64,
}

/// `f(s, x1, x2) = h_{a(s)}(x1) + g_{b(s)}(x2)` into
/// `Q^k_{c1} x Q^{n-k+1}_{c2}`.
#[derive(Debug, Clone)]
pub struct ClassAImmersion {
    k: usize,
    n: usize,
    factor1: FactorModel,
    factor2: FactorModel,
    profile_h: MeanCurvatureProfile,
    profile_g: MeanCurvatureProfile,
    theta: ThetaProfile,
    layout: ProductLayout,
}

impl ClassAImmersion {
    pub fn new(
        k: usize,
        n: usize,
        factor1: FactorModel,
        factor2: FactorModel,
        theta: ThetaProfile,
    ) -> Result<Self> {
        if !(2 <= k && k < n) {
            return invalid(format!("need 2 <= k <= n - 1, got k = {k}, n = {n}"));
        }
        if factor1.form().dim() != k {
            return invalid(format!(
                "factor 1 must live in a space form of dimension k = {k}, got {}",
                factor1.form().dim()
            ));
        }
        if factor2.form().dim() != n - k + 1 {
            return invalid(format!(
                "factor 2 must live in a space form of dimension n - k + 1 = {}, got {}",
                n - k + 1,
                factor2.form().dim()
            ));
        }
        let layout = ProductLayout {
            first: factor1.form().signature(),
            second: factor2.form().signature(),
        };
        Ok(Self {
            k,
            n,
            profile_h: factor1.spec().profile(),
            profile_g: factor2.spec().profile(),
            factor1,
            factor2,
            theta,
            layout,
        })
    }

    /// As [`ClassAImmersion::new`], rejecting constant angles with `sin 2 theta = 0`.
    pub fn non_splitting(
        k: usize,
        n: usize,
        factor1: FactorModel,
        factor2: FactorModel,
        theta: ThetaProfile,
    ) -> Result<Self> {
        if let ThetaProfile::Constant { theta } = theta {
            if (2.0 * theta).sin().abs() <= 1e-12 {
                return invalid(format!(
                    "constant angle {theta} is a multiple of pi/2; the hypersurface splits"
                ));
            }
        }
        Self::new(k, n, factor1, factor2, theta)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factor(&self, which: Factor) -> &FactorModel {
        match which {
            Factor::First => &self.factor1,
            Factor::Second => &self.factor2,
        }
    }

    pub fn profile(&self, which: Factor) -> &MeanCurvatureProfile {
        match which {
            Factor::First => &self.profile_h,
            Factor::Second => &self.profile_g,
        }
    }

    pub fn theta_profile(&self) -> &ThetaProfile {
        &self.theta
    }

    pub fn layout(&self) -> ProductLayout {
        self.layout
    }

    fn check_point(&self, x1: &[f64], x2: &[f64]) -> Result<()> {
        if x1.len() != self.k - 1 || x2.len() != self.n - self.k {
            return invalid(format!(
                "chart point dimensions ({}, {}) do not match ({}, {})",
                x1.len(),
                x2.len(),
                self.k - 1,
                self.n - self.k
            ));
        }
        Ok(())
    }

    pub fn evaluate(&self, s: f64, x1: &[f64], x2: &[f64]) -> Result<AVec> {
        self.check_point(x1, x2)?;
        let p1 = self.factor1.parallel_immersion(self.theta.a(s)?, x1)?;
        let p2 = self.factor2.parallel_immersion(self.theta.b(s)?, x2)?;
        Ok(assemble_product_point(&p1, &p2))
    }

    fn parallel_normals(&self, s: f64, x1: &[f64], x2: &[f64]) -> Result<(AVec, AVec)> {
        self.check_point(x1, x2)?;
        let n1 = self.factor1.parallel_normal(self.theta.a(s)?, x1)?;
        let n2 = self.factor2.parallel_normal(self.theta.b(s)?, x2)?;
        Ok((n1, n2))
    }

    /// `f_* d/ds = cos theta N^h_a + sin theta N^g_b`.
    pub fn tangent_s(&self, s: f64, x1: &[f64], x2: &[f64]) -> Result<AVec> {
        let (n1, n2) = self.parallel_normals(s, x1, x2)?;
        let (sn, cs) = self.theta.theta(s)?.sin_cos();
        Ok(assemble_product_point(&n1.scaled(cs), &n2.scaled(sn)))
    }

    /// `eta = -sin theta N^h_a + cos theta N^g_b`.
    pub fn unit_normal(&self, s: f64, x1: &[f64], x2: &[f64]) -> Result<AVec> {
        let (n1, n2) = self.parallel_normals(s, x1, x2)?;
        let (sn, cs) = self.theta.theta(s)?.sin_cos();
        Ok(assemble_product_point(&n1.scaled(-sn), &n2.scaled(cs)))
    }

    pub fn shape_operator(&self, s: f64, x1: &[f64], x2: &[f64]) -> Result<ShapeBlocks> {
        self.check_point(x1, x2)?;
        let (sn, cs) = self.theta.theta(s)?.sin_cos();
        let a1 = self.factor1.parallel_shape_operator(self.theta.a(s)?, x1)? * (-sn);
        let a2 = self.factor2.parallel_shape_operator(self.theta.b(s)?, x2)? * cs;
        Ok(ShapeBlocks {
            a_s: self.theta.theta_prime(s)?,
            a1,
            a2,
        })
    }

    pub fn product_data(&self, s: f64) -> Result<ProductData> {
        Ok(ProductData::from_angle(self.theta.theta(s)?))
    }

    /// `R` in the chart basis: `sin^2 theta` on `d/ds`, `0` on factor 1, `I` on factor 2.
    pub fn product_tensor(&self, s: f64) -> Result<DMatrix<f64>> {
        let r = self.product_data(s)?.r_eigen;
        let n = self.n;
        Ok(DMatrix::from_fn(n, n, |i, j| match (i, j) {
            (0, 0) => r,
            (i, j) if i == j && i >= self.k => 1.0,
            _ => 0.0,
        }))
    }

    /// `(theta' - (k-1) sin theta H^h(a) + (n-k) cos theta H^g(b)) / n`.
    pub fn mean_curvature(&self, s: f64, x1: &[f64], x2: &[f64]) -> Result<f64> {
        if !self.is_regular(s, x1, x2) {
            return Err(GeomError::Degenerate(format!("irregular point at s = {s}")));
        }
        let (sn, cs) = self.theta.theta(s)?.sin_cos();
        let hh = self.profile_h.mean_curvature(self.theta.a(s)?)?;
        let hg = self.profile_g.mean_curvature(self.theta.b(s)?)?;
        let (k, n) = (self.k as f64, self.n as f64);
        Ok((self.theta.theta_prime(s)? - (k - 1.0) * sn * hh + (n - k) * cs * hg) / n)
    }

    /// Both parallel maps are immersions at the point.
    pub fn is_regular(&self, s: f64, x1: &[f64], x2: &[f64]) -> bool {
        if self.check_point(x1, x2).is_err() {
            return false;
        }
        let (Ok(a), Ok(b)) = (self.theta.a(s), self.theta.b(s)) else {
            return false;
        };
        !self.factor1.spec().focal_distances().contains(a, 1e-12)
            && !self.factor2.spec().focal_distances().contains(b, 1e-12)
    }

    /// `xi` vanishes, i.e. `|sin 2 theta(s)| <= tol`.
    pub fn splits_locally(&self, s: f64, tol: f64) -> Result<bool> {
        Ok((2.0 * self.theta.theta(s)?).sin().abs() <= tol)
    }

    pub fn geometry(&self, s: f64, x1: &[f64], x2: &[f64]) -> Result<GeometryData> {
        Ok(GeometryData {
            eta: self.unit_normal(s, x1, x2)?,
            shape: self.shape_operator(s, x1, x2)?,
            product: self.product_data(s)?,
            mean_curvature: self.mean_curvature(s, x1, x2)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{project_factor, signed_dot, SpaceForm};
    use crate::factors::{IsoKind, IsoparametricSpec};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn model(form: SpaceForm, kind: IsoKind) -> FactorModel {
        FactorModel::new(IsoparametricSpec::new(form, kind).unwrap()).unwrap()
    }

    fn flat_pair(theta: f64) -> ClassAImmersion {
        ClassAImmersion::new(
            3,
            5,
            model(SpaceForm::euclidean(3), IsoKind::EucHyperplane),
            model(SpaceForm::euclidean(3), IsoKind::EucHyperplane),
            ThetaProfile::constant(theta),
        )
        .unwrap()
    }

    fn horo_plane(theta: f64) -> ClassAImmersion {
        ClassAImmersion::new(
            3,
            5,
            model(SpaceForm::hyperbolic(3), IsoKind::HypHorosphere),
            model(SpaceForm::euclidean(3), IsoKind::EucHyperplane),
            ThetaProfile::constant(theta),
        )
        .unwrap()
    }

    #[test]
    fn origin_is_the_base_product() {
        let f = horo_plane(0.4);
        let x1 = [0.3, -0.1];
        let x2 = [1.0, 2.0];
        let p = f.evaluate(0.0, &x1, &x2).unwrap();
        let h = f.factor(Factor::First).immersion(&x1).unwrap();
        let g = f.factor(Factor::Second).immersion(&x2).unwrap();
        assert_eq!(p, assemble_product_point(&h, &g));
    }

    #[test]
    fn constant_angle_uses_linear_shifts() {
        let theta = 0.6f64;
        let f = horo_plane(theta);
        let (x1, x2) = ([0.2, 0.1], [0.5, -0.5]);
        let s = 0.37;
        let p = f.evaluate(s, &x1, &x2).unwrap();
        let h = f.factor(Factor::First).parallel_immersion(s * theta.cos(), &x1).unwrap();
        let g = f.factor(Factor::Second).parallel_immersion(s * theta.sin(), &x2).unwrap();
        assert_eq!(project_factor(&p, Factor::First).unwrap(), h);
        assert_eq!(project_factor(&p, Factor::Second).unwrap(), g);
    }

    #[test]
    fn normal_at_quarter_angle() {
        let f = horo_plane(FRAC_PI_4);
        let (x1, x2) = ([0.2, 0.1], [0.5, -0.5]);
        let eta = f.unit_normal(0.3, &x1, &x2).unwrap();
        assert!((signed_dot(&eta, &eta).unwrap() - 1.0).abs() < 1e-14);
        let a = 0.3 * FRAC_PI_4.cos();
        let nh = f.factor(Factor::First).parallel_normal(a, &x1).unwrap();
        let ng = f.factor(Factor::Second).parallel_normal(a, &x2).unwrap();
        let want = assemble_product_point(&nh, &ng.scaled(0.0))
            .combine(-FRAC_PI_4.sin(), &assemble_product_point(&nh.scaled(0.0), &ng), FRAC_PI_4.cos());
        for (u, v) in eta.coords().iter().zip(want.coords()) {
            assert!((u - v).abs() < 1e-14);
        }
        let fs = f.tangent_s(0.3, &x1, &x2).unwrap();
        assert!(signed_dot(&eta, &fs).unwrap().abs() < 1e-14);
    }

    #[test]
    fn totally_geodesic_factors_have_zero_shape() {
        let f = flat_pair(0.7);
        let a = f.shape_operator(0.4, &[0.1, 0.2], &[0.3, 0.4]).unwrap().assemble();
        assert!(a.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn product_data_values() {
        let q = ProductData::from_angle(FRAC_PI_4);
        assert!((q.r_eigen - 0.5).abs() < 1e-15);
        assert!((q.xi_coeff - 0.5).abs() < 1e-15);
        assert!((q.t - 0.5).abs() < 1e-15);
        assert!(q.big_theta.abs() < 1e-15);
        let q = ProductData::from_angle(2f64.atan());
        assert!((q.big_theta - 0.6).abs() < 1e-15);
    }

    #[test]
    fn horosphere_plane_mean_curvature() {
        let theta = std::f64::consts::FRAC_PI_6;
        let f = horo_plane(theta);
        let h = f.mean_curvature(1.3, &[0.4, 0.4], &[0.0, 9.0]).unwrap();
        assert!((h - (-2.0 * theta.sin() / 5.0)).abs() < 1e-15);
    }

    #[test]
    fn regularity_and_splitting() {
        let f = ClassAImmersion::new(
            3,
            5,
            model(SpaceForm::euclidean(3), IsoKind::EucSphereCylinder { lambda: 2.0, k: 2 }),
            model(SpaceForm::hyperbolic(3), IsoKind::HypHorosphere),
            ThetaProfile::constant(0.0),
        )
        .unwrap();
        assert!(f.is_regular(0.0, &[0.0, 0.0], &[0.0, 0.0]));
        // a(s) = s hits the focal distance 1/2
        assert!(!f.is_regular(0.5, &[0.0, 0.0], &[0.0, 0.0]));
        assert!(f.unit_normal(0.5, &[0.0, 0.0], &[0.0, 0.0]).is_err());
        assert!(f.splits_locally(0.3, 1e-12).unwrap());

        let g = horo_plane(0.3);
        for s in [-50.0, 0.0, 80.0] {
            assert!(g.is_regular(s, &[0.1, 0.1], &[0.0, 0.0]));
        }
        assert!(horo_plane(FRAC_PI_2).splits_locally(0.0, 1e-12).unwrap());
        assert!(!horo_plane(2f64.atan()).splits_locally(0.0, 1e-12).unwrap());
        assert!(!horo_plane(FRAC_PI_4).splits_locally(0.0, 1e-12).unwrap());
    }

    #[test]
    fn constructor_validation() {
        let h = || model(SpaceForm::hyperbolic(3), IsoKind::HypHorosphere);
        assert!(ClassAImmersion::new(3, 3, h(), h(), ThetaProfile::constant(0.3)).is_err());
        assert!(ClassAImmersion::new(3, 6, h(), h(), ThetaProfile::constant(0.3)).is_err());
        assert!(
            ClassAImmersion::non_splitting(3, 5, h(), h(), ThetaProfile::constant(FRAC_PI_2))
                .is_err()
        );
        let f = ClassAImmersion::new(3, 5, h(), h(), ThetaProfile::constant(0.3)).unwrap();
        assert!(f.evaluate(0.0, &[0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn tabulated_profile_interpolates() {
        // theta(s) = 0.5 + 0.2 s on [-0.4, 0.4]
        let step = 0.01;
        let thetas: Vec<f64> = (0..=80).map(|j| 0.5 + 0.2 * (-0.4 + j as f64 * step)).collect();
        let tab = TabulatedTheta::from_samples(-0.4, step, &thetas).unwrap();
        let p = ThetaProfile::Tabulated(tab);
        for s in [-0.4, -0.123, 0.0, 0.2071, 0.4] {
            assert!((p.theta(s).unwrap() - (0.5 + 0.2 * s)).abs() < 1e-12);
            assert!((p.theta_prime(s).unwrap() - 0.2).abs() < 1e-10);
            // a(s) = (sin(0.5 + 0.2 s) - sin 0.5) / 0.2
            let a = ((0.5 + 0.2 * s).sin() - 0.5f64.sin()) / 0.2;
            let b = (0.5f64.cos() - (0.5 + 0.2 * s).cos()) / 0.2;
            assert!((p.a(s).unwrap() - a).abs() < 1e-11, "a at {s}");
            assert!((p.b(s).unwrap() - b).abs() < 1e-11, "b at {s}");
        }
        assert_eq!(p.a(0.0).unwrap(), 0.0);
        assert!(matches!(p.theta(0.5), Err(GeomError::Domain { .. })));
    }

    #[test]
    fn tabulated_primitives_track_the_interpolated_angle() {
        let step = 0.01;
        let thetas: Vec<f64> = (0..=40)
            .map(|j| {
                let s = -0.2 + j as f64 * step;
                0.7 + 1.5 * s * s - s.sin()
            })
            .collect();
        let p = ThetaProfile::Tabulated(TabulatedTheta::from_samples(-0.2, step, &thetas).unwrap());
        let h = 1e-5;
        for s in [-0.1837, -0.05, 0.0049, 0.1, 0.1501] {
            let da = (p.a(s + h).unwrap() - p.a(s - h).unwrap()) / (2.0 * h);
            let db = (p.b(s + h).unwrap() - p.b(s - h).unwrap()) / (2.0 * h);
            assert!((da - p.a_prime(s).unwrap()).abs() < 1e-9);
            assert!((db - p.b_prime(s).unwrap()).abs() < 1e-9);
            assert!((da * da + db * db - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn tabulated_grid_must_contain_origin() {
        let thetas = vec![0.3; 10];
        assert!(TabulatedTheta::from_samples(-0.015, 0.01, &thetas).is_err());
        assert!(TabulatedTheta::from_samples(0.01, 0.01, &thetas).is_err());
        assert!(TabulatedTheta::from_nodes(0.0, 0.0, &[[0.3, 0.0]]).is_err());
        assert!(TabulatedTheta::from_nodes(0.05, 0.1, &[[0.3, 0.0]]).is_err());
    }
}
