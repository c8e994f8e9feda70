use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    fd_derivative, fd_factor_weingarten, fd_jacobian, induced_metric, tangent_coefficients,
    CheckResult, FdConfig, ReportStatus, VerificationReport,
};
use crate::ambient::{assemble_product_point, Factor};
use crate::classa::{ClassAImmersion, ProductData};
use crate::error::Result;

/// Size of every targeted corruption.
pub const MUTATION_SIZE: f64 = 1e-3;

/// Where and how densely `run_suite` samples the chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub seed: u64,
    pub points: usize,
    pub s_range: (f64, f64),
    /// Chart coordinates are drawn from `[-extent, extent]`.
    pub extent: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            points: 200,
            s_range: (-0.2, 0.2),
            extent: 0.5,
        }
    }
}

/// A deliberate corruption of one analytic quantity, used to show that the
/// check returned by [`Mutation::target`] can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Shift the immersion off the product of space forms.
    OffsetPoint,
    /// Scale the parallel shape operators of the factors.
    ScaleFactorShape,
    /// Shift the factor mean-curvature profiles.
    OffsetProfile,
    ScaleNormal,
    /// Rotate the normal towards `d/ds`.
    TiltNormal,
    /// Scale the normal by a function of `x1`.
    WarpNormal,
    /// Reparametrize `s` by `s + delta * sum(x1)` in the immersion only.
    SkewChart,
    /// Let the first factor's parallel parameter depend on `x2`.
    BendFactor,
    /// Negate the second-factor shape block.
    FlipA2,
    /// Couple `d/ds` with the first chart direction of factor 1 in `A`.
    CoupleBlocks,
    OffsetH,
    ScaleR,
    ScaleXi,
    ScaleThetaPrime,
}

impl Mutation {
    pub const ALL: [Mutation; 14] = [
        Mutation::OffsetPoint,
        Mutation::ScaleFactorShape,
        Mutation::OffsetProfile,
        Mutation::ScaleNormal,
        Mutation::TiltNormal,
        Mutation::WarpNormal,
        Mutation::SkewChart,
        Mutation::BendFactor,
        Mutation::FlipA2,
        Mutation::CoupleBlocks,
        Mutation::OffsetH,
        Mutation::ScaleR,
        Mutation::ScaleXi,
        Mutation::ScaleThetaPrime,
    ];

    /// The check this corruption is aimed at.
    pub fn target(self) -> &'static str {
        match self {
            Mutation::OffsetPoint => "factor_constraints",
            Mutation::ScaleFactorShape => "factor_weingarten",
            Mutation::OffsetProfile => "factor_profile_trace",
            Mutation::ScaleNormal => "normal_unit",
            Mutation::TiltNormal => "normal_orthogonal",
            Mutation::WarpNormal => "t_factor_constant",
            Mutation::SkewChart => "first_fundamental_form",
            Mutation::BendFactor => "flat_normal_bundle",
            Mutation::FlipA2 => "weingarten_fd",
            Mutation::CoupleBlocks => "commutation_ar",
            Mutation::OffsetH => "mean_curvature_trace",
            Mutation::ScaleR => "product_tensor_fd",
            Mutation::ScaleXi => "pi_identities",
            Mutation::ScaleThetaPrime => "dert2",
        }
    }
}

/// The immersion as seen by the checks, possibly corrupted.
struct Subject<'a> {
    f: &'a ClassAImmersion,
    mutation: Option<Mutation>,
}

impl Subject<'_> {
    fn is(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }

    fn split<'p>(&self, p: &'p [f64]) -> (f64, &'p [f64], &'p [f64]) {
        let k = self.f.k();
        (p[0], &p[1..k], &p[k..])
    }

    fn bent_a(&self, s: f64, x2: &[f64]) -> Result<f64> {
        Ok(self.f.theta_profile().a(s)? + MUTATION_SIZE * x2[0])
    }

    fn point(&self, p: &[f64]) -> Result<Vec<f64>> {
        let (s, x1, x2) = self.split(p);
        let f = self.f;
        let mut v = match self.mutation {
            Some(Mutation::SkewChart) => {
                let shift: f64 = x1.iter().sum();
                f.evaluate(s + MUTATION_SIZE * shift, x1, x2)?
            }
            Some(Mutation::BendFactor) => {
                let a = self.bent_a(s, x2)?;
                let b = f.theta_profile().b(s)?;
                assemble_product_point(
                    &f.factor(Factor::First).parallel_immersion(a, x1)?,
                    &f.factor(Factor::Second).parallel_immersion(b, x2)?,
                )
            }
            _ => f.evaluate(s, x1, x2)?,
        }
        .into_coords();
        if self.is(Mutation::OffsetPoint) {
            v.iter_mut().for_each(|c| *c += MUTATION_SIZE);
        }
        Ok(v)
    }

    fn normal(&self, p: &[f64]) -> Result<Vec<f64>> {
        let (s, x1, x2) = self.split(p);
        let f = self.f;
        let eta = f.unit_normal(s, x1, x2)?;
        let d = MUTATION_SIZE;
        Ok(match self.mutation {
            Some(Mutation::ScaleNormal) => eta.scaled(1.0 + d),
            Some(Mutation::WarpNormal) => eta.scaled(1.0 + d * x1[0]),
            Some(Mutation::TiltNormal) => {
                eta.combine(d.cos(), &f.tangent_s(s, x1, x2)?, d.sin())
            }
            Some(Mutation::BendFactor) => {
                let (sn, cs) = f.theta_profile().theta(s)?.sin_cos();
                let a = self.bent_a(s, x2)?;
                let b = f.theta_profile().b(s)?;
                assemble_product_point(
                    &f.factor(Factor::First).parallel_normal(a, x1)?.scaled(-sn),
                    &f.factor(Factor::Second).parallel_normal(b, x2)?.scaled(cs),
                )
            }
            _ => eta,
        }
        .into_coords())
    }

    fn shape(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let (s, x1, x2) = self.split(p);
        let mut blocks = self.f.shape_operator(s, x1, x2)?;
        if self.is(Mutation::FlipA2) {
            blocks.a2 = -blocks.a2;
        }
        if self.is(Mutation::ScaleThetaPrime) {
            blocks.a_s *= 1.0 + MUTATION_SIZE;
        }
        let mut a = blocks.assemble();
        if self.is(Mutation::CoupleBlocks) {
            a[(0, 1)] += MUTATION_SIZE;
            a[(1, 0)] += MUTATION_SIZE;
        }
        Ok(a)
    }

    fn mean_curvature(&self, p: &[f64]) -> Result<f64> {
        let (s, x1, x2) = self.split(p);
        let h = self.f.mean_curvature(s, x1, x2)?;
        Ok(if self.is(Mutation::OffsetH) {
            h + MUTATION_SIZE
        } else {
            h
        })
    }

    fn product_tensor(&self, s: f64) -> Result<DMatrix<f64>> {
        let r = self.f.product_tensor(s)?;
        Ok(if self.is(Mutation::ScaleR) {
            r * (1.0 + MUTATION_SIZE)
        } else {
            r
        })
    }

    fn product_data(&self, s: f64) -> Result<ProductData> {
        let mut pd = self.f.product_data(s)?;
        if self.is(Mutation::ScaleXi) {
            pd.xi_coeff *= 1.0 + MUTATION_SIZE;
        }
        Ok(pd)
    }

    fn factor_shape(&self, which: Factor, u: f64, x: &[f64]) -> Result<DMatrix<f64>> {
        let a = self.f.factor(which).parallel_shape_operator(u, x)?;
        Ok(if self.is(Mutation::ScaleFactorShape) {
            a * (1.0 + MUTATION_SIZE)
        } else {
            a
        })
    }

    fn factor_profile(&self, which: Factor, u: f64) -> Result<f64> {
        let h = self.f.profile(which).mean_curvature(u)?;
        Ok(if self.is(Mutation::OffsetProfile) {
            h + MUTATION_SIZE
        } else {
            h
        })
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| if v.is_nan() { f64::NAN } else { acc.max(v.abs()) })
}

fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    max_abs(&(a * b - b * a))
}

fn dot(signs: &[f64], u: &[f64], v: &[f64]) -> f64 {
    signs.iter().zip(u).zip(v).map(|((g, a), b)| g * a * b).sum()
}

/// Names of the checks, in report order, with the tolerance each uses.
fn check_table(cfg: &FdConfig) -> [(&'static str, f64); 16] {
    [
        ("factor_constraints", cfg.tol_algebraic),
        ("factor_weingarten", cfg.tol_geometry),
        ("factor_profile_trace", cfg.tol_algebraic),
        ("normal_unit", cfg.tol_algebraic),
        ("normal_orthogonal", cfg.tol_geometry),
        ("first_fundamental_form", cfg.tol_metric),
        ("weingarten_fd", cfg.tol_geometry),
        ("mean_curvature_trace", cfg.tol_algebraic),
        ("mean_curvature_fd", cfg.tol_geometry),
        ("product_tensor_fd", cfg.tol_geometry),
        ("commutation_ar", cfg.tol_algebraic),
        ("flat_normal_bundle", cfg.tol_algebraic),
        ("pi_identities", cfg.tol_identity),
        ("t_factor_constant", cfg.tol_algebraic),
        ("dert2", cfg.tol_derivative),
        ("ders2", cfg.tol_derivative),
    ]
}

/// Errors of every check at one chart point, in [`check_table`] order.
fn point_errors(sub: &Subject, p: &[f64], cfg: &FdConfig) -> Result<[f64; 16]> {
    let f = sub.f;
    let (s, x1, x2) = sub.split(p);
    let n = f.n() as f64;
    let layout = f.layout();
    let n1 = layout.first.total_dim();
    let signs: Vec<f64> = (0..layout.total_dim()).map(|i| layout.sign(i)).collect();
    let (a, b) = (f.theta_profile().a(s)?, f.theta_profile().b(s)?);

    let pt = sub.point(p)?;
    let eta = sub.normal(p)?;
    let jac = fd_jacobian(|q| sub.point(q), p, cfg)?;
    let dn = fd_jacobian(|q| sub.normal(q), p, cfg)?;
    let metric = induced_metric(&jac, &signs);

    let mut constraint = 0.0f64;
    let mut factor_w = 0.0f64;
    let mut factor_trace = 0.0f64;
    let mut eta_vs_position = 0.0f64;
    for (which, range, u, x) in [
        (Factor::First, 0..n1, a, x1),
        (Factor::Second, n1..pt.len(), b, x2),
    ] {
        let form = f.factor(which).form();
        let block = &signs[range.clone()];
        let (pp, ee) = (&pt[range.clone()], &eta[range]);
        if form.eps() != 0 {
            let r2 = form.radius() * form.radius();
            constraint = constraint.max((dot(block, pp, pp) - f64::from(form.eps()) * r2).abs() / r2);
            eta_vs_position = eta_vs_position.max(dot(block, ee, pp).abs() / form.radius());
        }
        let analytic = sub.factor_shape(which, u, x)?;
        let fd = fd_factor_weingarten(f.factor(which), u, x, cfg)?;
        factor_w = factor_w.max(max_abs(&(fd - &analytic)));
        let dim = analytic.nrows() as f64;
        factor_trace = factor_trace.max((analytic.trace() / dim - sub.factor_profile(which, u)?).abs());
    }

    let normal_unit = (dot(&signs, &eta, &eta) - 1.0).abs();
    let mut normal_orth = eta_vs_position;
    for j in 0..jac.ncols() {
        let col: Vec<f64> = jac.column(j).iter().copied().collect();
        let len = dot(&signs, &col, &col).abs().sqrt();
        normal_orth = normal_orth.max(dot(&signs, &eta, &col).abs() / len);
    }

    let k = f.k();
    let mut fff = (metric[(0, 0)] - 1.0).abs();
    for i in 1..metric.nrows() {
        fff = fff.max(metric[(0, i)].abs());
        for j in k..metric.ncols() {
            if i < k {
                fff = fff.max(metric[(i, j)].abs());
            }
        }
    }

    let w = tangent_coefficients(&jac, &signs, &(-&dn))?;
    let shape = sub.shape(p)?;
    let gw = &metric * &w;
    let weingarten = max_abs(&(&w - &shape)).max(max_abs(&(&gw - gw.transpose())));
    let h = sub.mean_curvature(p)?;
    let h_trace = (shape.trace() / n - h).abs();
    let h_fd = (w.trace() / n - h).abs();

    let second: DMatrix<f64> =
        DMatrix::from_fn(jac.nrows(), jac.ncols(), |i, j| if i < n1 { 0.0 } else { jac[(i, j)] });
    let r_fd = tangent_coefficients(&jac, &signs, &second)?;
    let r = sub.product_tensor(s)?;
    let r_err = max_abs(&(&r_fd - &r));
    let comm = commutator(&shape, &r);
    let id = DMatrix::identity(r_fd.nrows(), r_fd.ncols());
    let i_minus_r = &id - &r_fd;
    let flat = commutator(&w, &r_fd)
        .max(commutator(&w, &i_minus_r))
        .max(commutator(&r_fd, &i_minus_r));

    let pd = sub.product_data(s)?;
    let ambient_t = |q: &[f64]| -> Result<f64> {
        let e = sub.normal(q)?;
        let mut pe = e.clone();
        pe[..n1].iter_mut().for_each(|c| *c = 0.0);
        Ok(dot(&signs, &pe, &e))
    };
    let t_amb = ambient_t(p)?;
    let mut xi_amb = eta.clone();
    xi_amb.iter_mut().enumerate().for_each(|(i, c)| {
        *c = (if i < n1 { 0.0 } else { *c }) - t_amb * *c;
    });
    let tangent = f.tangent_s(s, x1, x2)?.into_coords();
    let xi_vs_ds = xi_amb
        .iter()
        .zip(&tangent)
        .map(|(x, d)| (x - pd.xi_coeff * d).abs())
        .fold(0.0, f64::max);
    let pi = [
        (dot(&signs, &xi_amb, &xi_amb) - t_amb * (1.0 - t_amb)).abs(),
        (t_amb - pd.t).abs(),
        (pd.t * (1.0 - pd.t) - pd.xi_coeff * pd.xi_coeff).abs(),
        (pd.r_eigen * (1.0 - pd.r_eigen) - pd.xi_coeff * pd.xi_coeff).abs(),
        ((1.0 - pd.t - pd.r_eigen) * pd.xi_coeff).abs(),
        (pd.big_theta - (2.0 * pd.r_eigen - 1.0)).abs(),
        xi_vs_ds,
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let dt_x = fd_jacobian(|q| Ok(vec![ambient_t(q)?]), p, cfg)?;
    let t_const = dt_x.iter().skip(1).fold(0.0f64, |m, v| m.max(v.abs()));

    let theta_prime = shape[(0, 0)];
    let dt = fd_derivative(|u| Ok(sub.product_data(u)?.t), s, cfg)?;
    let dert2 = (dt + 2.0 * theta_prime * pd.xi_coeff).abs();
    let dxi = fd_derivative(|u| Ok(sub.product_data(u)?.xi_coeff), s, cfg)?;
    let ders2 = (dxi - (pd.t - pd.r_eigen) * theta_prime).abs();

    Ok([
        constraint,
        factor_w,
        factor_trace,
        normal_unit,
        normal_orth,
        fff,
        weingarten,
        h_trace,
        h_fd,
        r_err,
        comm,
        flat,
        pi,
        t_const,
        dert2,
        ders2,
    ])
}

fn sample_points(f: &ClassAImmersion, spec: &SampleSpec, cfg: &FdConfig) -> Vec<Vec<f64>> {
    let (dlo, dhi) = f.theta_profile().domain();
    let margin = 2.0 * cfg.reach();
    let lo = spec.s_range.0.max(dlo + margin);
    let hi = spec.s_range.1.min(dhi - margin);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let e = spec.extent;
    (0..spec.points)
        .map(|_| {
            let s = if hi > lo { rng.random_range(lo..hi) } else { lo };
            std::iter::once(s)
                .chain((1..f.n()).map(|_| if e > 0.0 { rng.random_range(-e..e) } else { 0.0 }))
                .collect()
        })
        .collect()
}

/// Run every check over `spec.points` seeded chart points.
pub fn run_suite(f: &ClassAImmersion, spec: &SampleSpec, cfg: &FdConfig) -> VerificationReport {
    run_suite_with_mutation(f, spec, cfg, None)
}

/// As [`run_suite`], with the analytic data corrupted by `mutation`.
pub fn run_suite_with_mutation(
    f: &ClassAImmersion,
    spec: &SampleSpec,
    cfg: &FdConfig,
    mutation: Option<Mutation>,
) -> VerificationReport {
    let mut report = VerificationReport {
        status: ReportStatus::Failed,
        notice: None,
        seed: spec.seed,
        points_requested: spec.points,
        points_checked: 0,
        points_skipped: 0,
        checks: Vec::new(),
    };
    if let Err(e) = cfg.validate() {
        report.notice = Some(e.to_string());
        return report;
    }
    let points = sample_points(f, spec, cfg);
    let split_at = points
        .iter()
        .map(|p| p[0])
        .chain(std::iter::once(0.0))
        .find(|&s| f.splits_locally(s, 1e-12).unwrap_or(false));
    if let Some(s) = split_at {
        report.status = ReportStatus::Refused;
        report.notice = Some(format!(
            "split detected: sin 2 theta vanishes at s = {s}; the hypersurface is locally a product"
        ));
        return report;
    }

    let table = check_table(cfg);
    let mut worst = [0.0f64; 16];
    let mut bad = [false; 16];
    let sub = Subject { f, mutation };
    for p in &points {
        let (s, x1, x2) = sub.split(p);
        if !f.is_regular(s, x1, x2) {
            report.points_skipped += 1;
            continue;
        }
        match point_errors(&sub, p, cfg) {
            Ok(errs) => {
                report.points_checked += 1;
                for (i, e) in errs.into_iter().enumerate() {
                    if e.is_nan() {
                        bad[i] = true;
                    } else {
                        worst[i] = worst[i].max(e);
                    }
                }
            }
            Err(_) => report.points_skipped += 1,
        }
    }
    let checked = report.points_checked;
    report.checks = table
        .iter()
        .enumerate()
        .map(|(i, &(name, tol))| {
            let max_error = if bad[i] { f64::INFINITY } else { worst[i] };
            CheckResult {
                name: name.to_string(),
                max_error,
                tolerance: tol,
                passed: checked > 0 && max_error <= tol,
                points: checked,
            }
        })
        .collect();
    if checked == 0 {
        report.notice = Some("no regular sample points".into());
    }
    report.status = if report.checks.iter().all(|c| c.passed) {
        ReportStatus::Passed
    } else {
        ReportStatus::Failed
    };
    report
}
