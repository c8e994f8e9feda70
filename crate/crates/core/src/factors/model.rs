use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{IsoKind, IsoparametricSpec};
use crate::ambient::{AVec, SpaceForm};
use crate::error::{invalid, GeomError, Result};

/// Explicit charts, written for unit radius and the standard orientation.
#[derive(Debug, Clone, PartialEq)]
enum Chart {
    /// `cosh(phi) p(x) + sinh(phi) e_last` with `p` on a totally geodesic `H^d`.
    HyperboloidShift { phi: f64 },
    /// `(cosh phi, sinh phi u(x))`, `u` on the unit `S^d`.
    HypSphere { phi: f64 },
    /// `(1 + |x|^2/2, x, |x|^2/2)`.
    Horosphere,
    /// `(cosh phi u(y), sinh phi v(z))`, `u` on `H^m`, `v` on `S^{d-m}`.
    HypProduct { phi: f64, m: usize },
    Hyperplane,
    /// `(u(y)/|lambda|, z)`, `u` on `S^k`.
    SphereCylinder { lambda: f64, k: usize },
    /// `(cos phi, sin phi u(x))`.
    SphGeodesic { phi: f64 },
    /// `(cos psi u(y), sin psi v(z))`, `u` on `S^p`, `v` on `S^q`.
    Clifford { psi: f64, p: usize },
}

/// Inverse stereographic projection `R^d -> S^d`.
fn stereo(x: &[f64], out: &mut Vec<f64>) {
    let q: f64 = x.iter().map(|v| v * v).sum();
    let den = 1.0 + q;
    out.extend(x.iter().map(|v| 2.0 * v / den));
    out.push((q - 1.0) / den);
}

/// Hyperboloid chart `R^d -> H^d`, time coordinate first.
fn hyperboloid(y: &[f64], out: &mut Vec<f64>) {
    let q: f64 = y.iter().map(|v| v * v).sum();
    out.push((1.0 + q).sqrt());
    out.extend_from_slice(y);
}

impl Chart {
    fn from_spec(spec: &IsoparametricSpec) -> Result<Self> {
        let d = spec.dim();
        Ok(match spec.kind() {
            IsoKind::HypTotallyGeodesic => Chart::HyperboloidShift { phi: 0.0 },
            IsoKind::HypEquidistant { phi } => Chart::HyperboloidShift { phi: *phi },
            IsoKind::HypHorosphere => Chart::Horosphere,
            IsoKind::HypGeodesicSphere { phi } => Chart::HypSphere { phi: *phi },
            IsoKind::HypTwoCurvature { phi, m } => Chart::HypProduct { phi: *phi, m: *m },
            IsoKind::EucHyperplane => Chart::Hyperplane,
            IsoKind::EucSphereCylinder { lambda, k } => Chart::SphereCylinder {
                lambda: *lambda,
                k: *k,
            },
            IsoKind::SphMulti { curvatures } => match curvatures.as_slice() {
                [(phi, _)] => Chart::SphGeodesic { phi: *phi },
                [(phi1, m1), (phi2, m2)] => {
                    let gap = (phi2 - phi1).rem_euclid(PI);
                    if (gap - FRAC_PI_2).abs() > 1e-9 {
                        return Err(GeomError::Unsupported(format!(
                            "sph_multi with angles {phi1} and {phi2}: two-curvature charts need \
                             angles differing by pi/2"
                        )));
                    }
                    debug_assert_eq!(m1 + m2, d);
                    Chart::Clifford {
                        psi: *phi1,
                        p: *m2,
                    }
                }
                _ => {
                    return Err(GeomError::Unsupported(format!(
                        "sph_multi with {} distinct curvatures has no explicit chart",
                        curvatures.len()
                    )))
                }
            },
        })
    }

    /// Base principal curvature along each chart coordinate.
    fn curvatures(&self, d: usize) -> Vec<f64> {
        let split = |first: usize, a: f64, b: f64| {
            (0..d).map(|i| if i < first { a } else { b }).collect()
        };
        match *self {
            Chart::HyperboloidShift { phi } => vec![phi.tanh(); d],
            Chart::HypSphere { phi } => vec![1.0 / phi.tanh(); d],
            Chart::Horosphere => vec![1.0; d],
            Chart::HypProduct { phi, m } => split(m, phi.tanh(), 1.0 / phi.tanh()),
            Chart::Hyperplane => vec![0.0; d],
            Chart::SphereCylinder { lambda, k } => split(k, lambda, 0.0),
            Chart::SphGeodesic { phi } => vec![1.0 / phi.tan(); d],
            Chart::Clifford { psi, p } => split(p, -psi.tan(), 1.0 / psi.tan()),
        }
    }

    /// Point and unit normal at `x`, unit radius.
    fn frame(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = x.len();
        let mut p = Vec::with_capacity(d + 2);
        let mut nrm = Vec::with_capacity(d + 2);
        match *self {
            Chart::HyperboloidShift { phi } => {
                let (c, s) = (phi.cosh(), phi.sinh());
                let mut base = Vec::with_capacity(d + 1);
                hyperboloid(x, &mut base);
                p.extend(base.iter().map(|v| c * v));
                p.push(s);
                nrm.extend(base.iter().map(|v| -s * v));
                nrm.push(-c);
            }
            Chart::HypSphere { phi } => {
                let (c, s) = (phi.cosh(), phi.sinh());
                let mut u = Vec::with_capacity(d + 1);
                stereo(x, &mut u);
                p.push(c);
                p.extend(u.iter().map(|v| s * v));
                nrm.push(-s);
                nrm.extend(u.iter().map(|v| -c * v));
            }
            Chart::Horosphere => {
                let q: f64 = x.iter().map(|v| v * v).sum::<f64>() / 2.0;
                p.push(1.0 + q);
                p.extend_from_slice(x);
                p.push(q);
                // null vector l = (1, 0, .., 0, 1) and N = l - p
                nrm.extend(p.iter().map(|v| -v));
                nrm[0] += 1.0;
                nrm[d + 1] += 1.0;
            }
            Chart::HypProduct { phi, m } => {
                let (c, s) = (phi.cosh(), phi.sinh());
                let mut u = Vec::with_capacity(m + 1);
                let mut v = Vec::with_capacity(d - m + 1);
                hyperboloid(&x[..m], &mut u);
                stereo(&x[m..], &mut v);
                p.extend(u.iter().map(|w| c * w));
                p.extend(v.iter().map(|w| s * w));
                nrm.extend(u.iter().map(|w| -s * w));
                nrm.extend(v.iter().map(|w| -c * w));
            }
            Chart::Hyperplane => {
                p.extend_from_slice(x);
                p.push(0.0);
                nrm.resize(d, 0.0);
                nrm.push(1.0);
            }
            Chart::SphereCylinder { lambda, k } => {
                let rho = 1.0 / lambda.abs();
                let sgn = lambda.signum();
                let mut u = Vec::with_capacity(k + 1);
                stereo(&x[..k], &mut u);
                p.extend(u.iter().map(|w| rho * w));
                p.extend_from_slice(&x[k..]);
                nrm.extend(u.iter().map(|w| -sgn * w));
                nrm.resize(d + 1, 0.0);
            }
            Chart::SphGeodesic { phi } => {
                let (c, s) = (phi.cos(), phi.sin());
                let mut u = Vec::with_capacity(d + 1);
                stereo(x, &mut u);
                p.push(c);
                p.extend(u.iter().map(|v| s * v));
                nrm.push(s);
                nrm.extend(u.iter().map(|v| -c * v));
            }
            Chart::Clifford { psi, p: pd } => {
                let (c, s) = (psi.cos(), psi.sin());
                let mut u = Vec::with_capacity(pd + 1);
                let mut v = Vec::with_capacity(d - pd + 1);
                stereo(&x[..pd], &mut u);
                stereo(&x[pd..], &mut v);
                p.extend(u.iter().map(|w| c * w));
                p.extend(v.iter().map(|w| s * w));
                nrm.extend(u.iter().map(|w| s * w));
                nrm.extend(v.iter().map(|w| -c * w));
            }
        }
        (p, nrm)
    }
}

/// An explicitly parametrized catalog hypersurface together with its
/// parallel family `h_s = C(s/r) h + r S(s/r) N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    spec: IsoparametricSpec,
    chart: Chart,
    /// Oriented principal curvature along each chart coordinate.
    curvatures: Vec<f64>,
}

impl FactorModel {
    pub fn new(spec: IsoparametricSpec) -> Result<Self> {
        let chart = Chart::from_spec(&spec)?;
        let scale = spec.orientation().sign() / spec.form().radius();
        let curvatures = chart
            .curvatures(spec.dim())
            .into_iter()
            .map(|k| scale * k)
            .collect();
        Ok(Self {
            spec,
            chart,
            curvatures,
        })
    }

    pub fn spec(&self) -> &IsoparametricSpec {
        &self.spec
    }

    pub fn form(&self) -> &SpaceForm {
        self.spec.form()
    }

    pub fn chart_dim(&self) -> usize {
        self.spec.dim()
    }

    fn check_chart(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.chart_dim() {
            return invalid(format!(
                "chart point has {} coordinates, expected {}",
                x.len(),
                self.chart_dim()
            ));
        }
        Ok(())
    }

    fn base(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (mut p, mut nrm) = self.chart.frame(x);
        let r = self.form().radius();
        let o = self.spec.orientation().sign();
        p.iter_mut().for_each(|v| *v *= r);
        nrm.iter_mut().for_each(|v| *v *= o);
        (p, nrm)
    }

    pub fn immersion(&self, x: &[f64]) -> Result<AVec> {
        self.check_chart(x)?;
        let (p, _) = self.base(x);
        Ok(AVec::flat_unchecked(p, self.form().signature()))
    }

    pub fn normal(&self, x: &[f64]) -> Result<AVec> {
        self.check_chart(x)?;
        let (_, nrm) = self.base(x);
        Ok(AVec::flat_unchecked(nrm, self.form().signature()))
    }

    /// Shape operator in the chart basis; diagonal for every catalog chart.
    pub fn shape_operator(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_chart(x)?;
        Ok(DMatrix::from_diagonal(&self.curvatures.clone().into()))
    }

    /// `C(s/r) - r S(s/r) lambda` for every principal curvature; zero at a focal point.
    fn check_regular(&self, s: f64) -> Result<(f64, f64)> {
        let form = self.form();
        let r = form.radius();
        let (c, sn) = form.cs_scaled(s);
        for &lambda in &self.curvatures {
            if (c - r * sn * lambda).abs() < 1e-12 {
                return Err(GeomError::Degenerate(format!(
                    "parallel map of {} degenerates at s = {s}",
                    self.spec.kind().name()
                )));
            }
        }
        Ok((c, sn))
    }

    pub fn parallel_immersion(&self, s: f64, x: &[f64]) -> Result<AVec> {
        self.check_chart(x)?;
        let (c, sn) = self.check_regular(s)?;
        let r = self.form().radius();
        let (p, nrm) = self.base(x);
        let coords = p.iter().zip(&nrm).map(|(h, n)| c * h + r * sn * n).collect();
        Ok(AVec::flat_unchecked(coords, self.form().signature()))
    }

    pub fn parallel_normal(&self, s: f64, x: &[f64]) -> Result<AVec> {
        self.check_chart(x)?;
        let (c, sn) = self.check_regular(s)?;
        let form = self.form();
        let k = -f64::from(form.eps()) / form.radius() * sn;
        let (p, nrm) = self.base(x);
        let coords = p.iter().zip(&nrm).map(|(h, n)| k * h + c * n).collect();
        Ok(AVec::flat_unchecked(coords, form.signature()))
    }

    /// `(C I - r S A)^{-1} ((eps/r) S I + C A)` in the chart basis.
    pub fn parallel_shape_operator(&self, s: f64, x: &[f64]) -> Result<DMatrix<f64>> {
        let a = self.shape_operator(x)?;
        let (c, sn) = self.check_regular(s)?;
        let form = self.form();
        let r = form.radius();
        let d = self.chart_dim();
        let id = DMatrix::<f64>::identity(d, d);
        let lhs = &id * c - &a * (r * sn);
        let rhs = &id * (f64::from(form.eps()) * sn / r) + &a * c;
        lhs.lu().solve(&rhs).ok_or_else(|| {
            GeomError::Degenerate(format!("parallel shape operator singular at s = {s}"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{on_space_form, signed_dot, SpaceForm};
    use crate::factors::Orientation;

    fn model(form: SpaceForm, kind: IsoKind) -> FactorModel {
        FactorModel::new(IsoparametricSpec::new(form, kind).unwrap()).unwrap()
    }

    #[test]
    fn zero_shift_is_the_base() {
        let m = model(SpaceForm::hyperbolic(4), IsoKind::HypTwoCurvature { phi: 0.6, m: 1 });
        let x = [0.3, -0.2, 0.5];
        assert_eq!(m.parallel_immersion(0.0, &x).unwrap(), m.immersion(&x).unwrap());
        assert_eq!(m.parallel_normal(0.0, &x).unwrap(), m.normal(&x).unwrap());
        assert_eq!(
            m.parallel_shape_operator(0.0, &x).unwrap(),
            m.shape_operator(&x).unwrap()
        );
    }

    #[test]
    fn flat_parallel_normal_is_constant() {
        let m = model(SpaceForm::euclidean(3), IsoKind::EucSphereCylinder { lambda: 1.0, k: 2 });
        let x = [0.4, -1.1];
        for s in [-0.5, 0.25, 0.7] {
            assert_eq!(m.parallel_normal(s, &x).unwrap(), m.normal(&x).unwrap());
        }
    }

    #[test]
    fn euclidean_sphere_shrinks_inward() {
        let m = model(SpaceForm::euclidean(3), IsoKind::EucSphereCylinder { lambda: 1.0, k: 2 });
        for x in [[0.0, 0.0], [0.3, 2.0], [-5.0, 1.0]] {
            let p = m.parallel_immersion(0.25, &x).unwrap();
            let r2: f64 = p.coords().iter().map(|v| v * v).sum();
            assert!((r2.sqrt() - 0.75).abs() < 1e-14);
        }
        assert!(matches!(
            m.parallel_immersion(1.0, &[0.1, 0.2]),
            Err(GeomError::Degenerate(_))
        ));
    }

    #[test]
    fn hyperbolic_geodesic_sphere_stays_on_h2() {
        let form = SpaceForm::hyperbolic(2);
        let m = model(form, IsoKind::HypGeodesicSphere { phi: 0.8 });
        for s in [-0.05, 0.01, 0.1] {
            let p = m.parallel_immersion(s, &[0.37]).unwrap();
            assert!(on_space_form(&p, &form, 1e-13));
            let n = m.parallel_normal(s, &[0.37]).unwrap();
            assert!((signed_dot(&n, &n).unwrap() - 1.0).abs() < 1e-13);
            assert!(signed_dot(&n, &p).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn parallel_eigenvalues_follow_closed_forms() {
        let phi: f64 = 0.9;
        let s = 0.3;
        let m = model(SpaceForm::hyperbolic(4), IsoKind::HypTwoCurvature { phi, m: 2 });
        let a = m.parallel_shape_operator(s, &[0.1, 0.2, 0.3]).unwrap();
        assert!((a[(0, 0)] - (phi - s).tanh()).abs() < 1e-14);
        assert!((a[(2, 2)] - 1.0 / (phi - s).tanh()).abs() < 1e-14);

        let sph = model(SpaceForm::sphere(3), IsoKind::SphMulti { curvatures: vec![(phi, 2)] });
        let a = sph.parallel_shape_operator(s, &[0.1, 0.2]).unwrap();
        assert!((a[(1, 1)] - 1.0 / (phi - s).tan()).abs() < 1e-14);
    }

    #[test]
    fn clifford_chart_order() {
        // curvatures cot(0.4) x1 and cot(0.4 + pi/2) x2
        let m = model(
            SpaceForm::sphere(4),
            IsoKind::SphMulti {
                curvatures: vec![(0.4, 1), (0.4 + FRAC_PI_2, 2)],
            },
        );
        let a = m.shape_operator(&[0.0; 3]).unwrap();
        assert!((a[(0, 0)] + 0.4f64.tan()).abs() < 1e-14);
        assert!((a[(1, 1)] + 0.4f64.tan()).abs() < 1e-14);
        assert!((a[(2, 2)] - 1.0 / 0.4f64.tan()).abs() < 1e-14);
    }

    #[test]
    fn unsupported_sphere_entries() {
        let three = IsoparametricSpec::new(
            SpaceForm::sphere(4),
            IsoKind::SphMulti {
                curvatures: vec![(0.3, 1), (0.3 + PI / 3.0, 1), (0.3 + 2.0 * PI / 3.0, 1)],
            },
        )
        .unwrap();
        assert!(matches!(FactorModel::new(three), Err(GeomError::Unsupported(_))));
        let skew = IsoparametricSpec::new(
            SpaceForm::sphere(3),
            IsoKind::SphMulti {
                curvatures: vec![(0.3, 1), (1.0, 1)],
            },
        )
        .unwrap();
        assert!(matches!(FactorModel::new(skew), Err(GeomError::Unsupported(_))));
    }

    #[test]
    fn orientation_flip_negates_shape() {
        let form = SpaceForm::hyperbolic(3);
        let spec =
            IsoparametricSpec::with_orientation(form, IsoKind::HypHorosphere, Orientation::Flipped)
                .unwrap();
        let m = FactorModel::new(spec).unwrap();
        let a = m.shape_operator(&[0.2, 0.1]).unwrap();
        assert_eq!(a[(0, 0)], -1.0);
        assert!(m.immersion(&[0.2]).is_err());
    }
}
