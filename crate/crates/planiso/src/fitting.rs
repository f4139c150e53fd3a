//! Identification of best-fit isotropic moduli from displacement fields.
//!
//! Two discrete procedures are implemented: a least-squares fit of the
//! radially averaged displacement norm against the `A/r` profile of the
//! isotropic singular solutions, and a full-field least-squares fit of
//! both displacement components on a Cartesian grid.  In both cases the
//! couple field determines `mu_iso` and the dilatation field then
//! determines `kappa_iso`.
//!
//! In addition, the continuous (integral) minimizers of the logarithmic
//! and Euclidean objectives over an interval of radii are provided; they
//! operate on an arbitrary positive radial profile function.

use thiserror::Error;

use crate::fem::{DisplacementField, FemError};
use crate::greens::{self, AnalyticSolutionKind, FieldPoint, GreensError};
use crate::moduli::CubicModuli;

/// Errors from profile construction and fitting.
#[derive(Debug, Error)]
pub enum FitError {
    #[error("sample point ({x1}, {x2}) is outside the field domain")]
    OutsideDomain { x1: f64, x2: f64 },
    #[error("fit failure: {0}")]
    FitFailure(String),
    #[error("radial profile is invalid: {0}")]
    InvalidProfile(String),
    #[error("field evaluation failed: {0}")]
    Field(String),
}

impl From<FemError> for FitError {
    fn from(e: FemError) -> Self {
        match e {
            FemError::OutsideDomain { x1, x2 } => FitError::OutsideDomain { x1, x2 },
            other => FitError::Field(other.to_string()),
        }
    }
}

impl From<GreensError> for FitError {
    fn from(e: GreensError) -> Self {
        FitError::Field(e.to_string())
    }
}

/// Common evaluation contract for FEM and analytic fields.
pub trait FieldEval {
    fn eval(&self, x1: f64, x2: f64) -> Result<(f64, f64), FitError>;
}

impl FieldEval for DisplacementField {
    fn eval(&self, x1: f64, x2: f64) -> Result<(f64, f64), FitError> {
        Ok(self.evaluate_point(x1, x2)?)
    }
}

/// Analytic singular solution viewed through the field contract.
pub struct AnalyticField {
    pub material: CubicModuli,
    pub kind: AnalyticSolutionKind,
}

impl FieldEval for AnalyticField {
    fn eval(&self, x1: f64, x2: f64) -> Result<(f64, f64), FitError> {
        Ok(greens::displacement(
            &self.material,
            self.kind,
            FieldPoint::new(x1, x2),
        )?)
    }
}

/// Radially averaged displacement norms.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub ubar: Vec<f64>,
    pub angles_deg: Vec<f64>,
}

/// Default angle set: 0, 5, ..., 45 degrees (the cubic symmetry makes
/// one octant sufficient).
pub fn default_angles_deg() -> Vec<f64> {
    (0..=9).map(|k| 5.0 * k as f64).collect()
}

/// Uniformly spaced radii.
pub fn linear_radii(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| r_min + (r_max - r_min) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Logarithmically spaced radii.
pub fn log_radii(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (r_min.ln(), r_max.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Mean of `|u|` over the angle set at each radius.
pub fn radial_average(
    field: &dyn FieldEval,
    radii: &[f64],
    angles_deg: &[f64],
) -> Result<RadialProfile, FitError> {
    if radii.is_empty() || angles_deg.is_empty() {
        return Err(FitError::InvalidProfile("empty radii or angle set".into()));
    }
    let mut ubar = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut acc = 0.0;
        for &deg in angles_deg {
            let th = deg.to_radians();
            let (u1, u2) = field.eval(r * th.cos(), r * th.sin())?;
            acc += u1.hypot(u2);
        }
        ubar.push(acc / angles_deg.len() as f64);
    }
    Ok(RadialProfile {
        radii: radii.to_vec(),
        ubar,
        angles_deg: angles_deg.to_vec(),
    })
}

/// Closed-form least-squares amplitude of `ubar ~ A / r`:
/// `A* = sum(ubar_i / r_i) / sum(1 / r_i^2)`.
fn norm_amplitude(profile: &RadialProfile) -> Result<f64, FitError> {
    if profile.radii.is_empty() {
        return Err(FitError::InvalidProfile("empty profile".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&r, &u) in profile.radii.iter().zip(&profile.ubar) {
        num += u / r;
        den += 1.0 / (r * r);
    }
    let a = num / den;
    if !(a > 0.0) {
        return Err(FitError::FitFailure(format!(
            "nonpositive profile amplitude {a}"
        )));
    }
    Ok(a)
}

/// Shear modulus from the couple-field norm profile:
/// `mu_iso = 1 / (4 pi A*)`.
pub fn fit_mu_norm(profile: &RadialProfile) -> Result<f64, FitError> {
    Ok(1.0 / (4.0 * std::f64::consts::PI * norm_amplitude(profile)?))
}

/// Bulk modulus from the dilatation-field norm profile given `mu_iso`:
/// `kappa_iso = 1 / (4 pi A*) - mu_iso`.
pub fn fit_kappa_norm(profile: &RadialProfile, mu_iso: f64) -> Result<f64, FitError> {
    if !(mu_iso > 0.0) {
        return Err(FitError::FitFailure("mu_iso must be positive".into()));
    }
    let kappa = 1.0 / (4.0 * std::f64::consts::PI * norm_amplitude(profile)?) - mu_iso;
    if !(kappa > 0.0) {
        return Err(FitError::FitFailure(format!(
            "fitted kappa_iso = {kappa} is not positive"
        )));
    }
    Ok(kappa)
}

/// Displacement samples on a regular Cartesian grid within an annulus.
#[derive(Debug, Clone)]
pub struct GridSample {
    pub points: Vec<[f64; 2]>,
    pub disps: Vec<[f64; 2]>,
    pub spacing: f64,
}

/// Sample the field on a grid of the given spacing over
/// `r_min <= r <= r_max`.
pub fn grid_sample(
    field: &dyn FieldEval,
    spacing: f64,
    r_min: f64,
    r_max: f64,
) -> Result<GridSample, FitError> {
    if !(spacing > 0.0 && r_min > 0.0 && r_max > r_min) {
        return Err(FitError::InvalidProfile("invalid grid parameters".into()));
    }
    let n = (r_max / spacing).floor() as i64;
    let mut points = Vec::new();
    let mut disps = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let (x, y) = (i as f64 * spacing, j as f64 * spacing);
            let r = x.hypot(y);
            if r >= r_min && r <= r_max {
                let (u1, u2) = field.eval(x, y)?;
                points.push([x, y]);
                disps.push([u1, u2]);
            }
        }
    }
    Ok(GridSample {
        points,
        disps,
        spacing,
    })
}

/// Stacked least-squares amplitude of `u ~ A g(x)` over both components.
fn fullfield_amplitude(grid: &GridSample, g: impl Fn(f64, f64) -> (f64, f64)) -> Result<f64, FitError> {
    if grid.points.is_empty() {
        return Err(FitError::InvalidProfile("empty grid sample".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (p, u) in grid.points.iter().zip(&grid.disps) {
        let (g1, g2) = g(p[0], p[1]);
        num += u[0] * g1 + u[1] * g2;
        den += g1 * g1 + g2 * g2;
    }
    let a = num / den;
    if !(a > 0.0) {
        return Err(FitError::FitFailure(format!(
            "nonpositive field amplitude {a}"
        )));
    }
    Ok(a)
}

/// Shear modulus from the couple field on a grid: least squares against
/// `g(x) = (-x2, x1) / (4 pi r^2)` with amplitude `1/mu`.
pub fn fit_mu_fullfield(grid: &GridSample) -> Result<f64, FitError> {
    let four_pi = 4.0 * std::f64::consts::PI;
    let a = fullfield_amplitude(grid, |x, y| {
        let r2 = x * x + y * y;
        (-y / (four_pi * r2), x / (four_pi * r2))
    })?;
    Ok(1.0 / a)
}

/// Bulk modulus from the dilatation field on a grid given `mu_iso`:
/// least squares against `g(x) = x / (4 pi r^2)` with amplitude
/// `1/(mu + kappa)`.
pub fn fit_kappa_fullfield(grid: &GridSample, mu_iso: f64) -> Result<f64, FitError> {
    if !(mu_iso > 0.0) {
        return Err(FitError::FitFailure("mu_iso must be positive".into()));
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    let a = fullfield_amplitude(grid, |x, y| {
        let r2 = x * x + y * y;
        (x / (four_pi * r2), y / (four_pi * r2))
    })?;
    let kappa = 1.0 / a - mu_iso;
    if !(kappa > 0.0) {
        return Err(FitError::FitFailure(format!(
            "fitted kappa_iso = {kappa} is not positive"
        )));
    }
    Ok(kappa)
}

/// Piecewise-linear interpolant through a radial profile, for the
/// continuous minimizers.
pub fn profile_interpolant(profile: &RadialProfile) -> impl Fn(f64) -> f64 + '_ {
    move |r: f64| {
        let radii = &profile.radii;
        let n = radii.len();
        if r <= radii[0] {
            return profile.ubar[0];
        }
        if r >= radii[n - 1] {
            return profile.ubar[n - 1];
        }
        let idx = radii.partition_point(|&x| x < r).max(1);
        let (r0, r1) = (radii[idx - 1], radii[idx]);
        let (u0, u1) = (profile.ubar[idx - 1], profile.ubar[idx]);
        u0 + (u1 - u0) * (r - r0) / (r1 - r0)
    }
}

/// Adaptive Simpson quadrature to the requested relative tolerance.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            return left + right + err / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    // Absolute tolerance derived from a first estimate of the magnitude.
    let scale = whole.abs().max(1e-300);
    recurse(f, a, b, fa, fm, fb, whole, rel_tol * scale, 48)
}

/// Relative tolerance of the quadrature behind the continuous minimizers.
pub const QUAD_TOL: f64 = 1e-10;

/// Continuous logarithmic minimizer on `[r_a, r_b]`:
/// `mu = (1/4pi) exp(-(r_b - r_a)^{-1} \int log(fbar(r) r) dr)`.
pub fn continuous_fit_log(
    fbar: impl Fn(f64) -> f64,
    r_a: f64,
    r_b: f64,
) -> Result<f64, FitError> {
    check_interval(&fbar, r_a, r_b)?;
    let integral = adaptive_simpson(&|r: f64| (fbar(r) * r).ln(), r_a, r_b, QUAD_TOL);
    Ok(1.0 / (4.0 * std::f64::consts::PI) * (-integral / (r_b - r_a)).exp())
}

/// Continuous Euclidean minimizer on `[r_a, r_b]`:
/// `mu = (r_b - r_a) / (4 pi r_a r_b \int fbar(r)/r dr)`.
pub fn continuous_fit_euclid(
    fbar: impl Fn(f64) -> f64,
    r_a: f64,
    r_b: f64,
) -> Result<f64, FitError> {
    check_interval(&fbar, r_a, r_b)?;
    let integral = adaptive_simpson(&|r: f64| fbar(r) / r, r_a, r_b, QUAD_TOL);
    Ok((r_b - r_a) / (4.0 * std::f64::consts::PI * r_a * r_b * integral))
}

fn check_interval(fbar: &impl Fn(f64) -> f64, r_a: f64, r_b: f64) -> Result<(), FitError> {
    if !(r_b > r_a && r_a > 0.0) {
        return Err(FitError::InvalidProfile(format!(
            "need 0 < r_a < r_b, got [{r_a}, {r_b}]"
        )));
    }
    for i in 0..=32 {
        let r = r_a + (r_b - r_a) * i as f64 / 32.0;
        if !(fbar(r) > 0.0) {
            return Err(FitError::FitFailure(format!(
                "profile is nonpositive at r = {r}"
            )));
        }
    }
    Ok(())
}

/// Identified isotropic moduli and comparison ratios.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FitReport {
    pub mu_iso: f64,
    pub kappa_iso: f64,
    /// Root-mean-square residual of the couple fit, relative to the
    /// field scale.
    pub mu_residual: f64,
    /// Same for the dilatation fit.
    pub kappa_residual: f64,
    pub ratio_mu_log: f64,
    pub ratio_mu_euclid: f64,
    pub ratio_kappa: f64,
}

/// Relative RMS misfit of a norm profile against `A/r`.
pub fn norm_residual(profile: &RadialProfile, amplitude_modulus: f64) -> f64 {
    let a = 1.0 / (4.0 * std::f64::consts::PI * amplitude_modulus);
    let (mut num, mut den) = (0.0, 0.0);
    for (&r, &u) in profile.radii.iter().zip(&profile.ubar) {
        num += (u - a / r).powi(2);
        den += (a / r).powi(2);
    }
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::IsotropicModuli;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    struct IsoCoupleField {
        mu: f64,
    }
    impl FieldEval for IsoCoupleField {
        fn eval(&self, x1: f64, x2: f64) -> Result<(f64, f64), FitError> {
            Ok(greens::couple_iso(self.mu, FieldPoint::new(x1, x2)).unwrap())
        }
    }
    struct IsoDilField {
        iso: IsotropicModuli,
    }
    impl FieldEval for IsoDilField {
        fn eval(&self, x1: f64, x2: f64) -> Result<(f64, f64), FitError> {
            Ok(greens::dilatation_iso(&self.iso, FieldPoint::new(x1, x2)).unwrap())
        }
    }

    #[test]
    fn radial_average_isotropic_is_exact() {
        let field = IsoCoupleField { mu: 2.5 };
        let radii = log_radii(0.01, 0.25, 50);
        let prof = radial_average(&field, &radii, &default_angles_deg()).unwrap();
        for (&r, &u) in prof.radii.iter().zip(&prof.ubar) {
            assert_relative_eq!(u, 1.0 / (4.0 * PI * 2.5 * r), max_relative = 1e-13);
        }
        // Single angle equals direct evaluation.
        let prof0 = radial_average(&field, &radii, &[0.0]).unwrap();
        let (u1, u2) = field.eval(radii[3], 0.0).unwrap();
        assert_relative_eq!(prof0.ubar[3], u1.hypot(u2), max_relative = 1e-14);
    }

    #[test]
    fn radial_average_cubic_ur_approaches_constant() {
        let field = AnalyticField {
            material: CubicModuli::new(7.645, 5.901, 0.626).unwrap(),
            kind: AnalyticSolutionKind::Couple,
        };
        let radii = log_radii(0.01, 0.25, 20);
        let prof = radial_average(&field, &radii, &default_angles_deg()).unwrap();
        // Degree -1 homogeneity: ubar * r is the same constant at all radii.
        let c0 = prof.ubar[0] * prof.radii[0];
        for (&r, &u) in prof.radii.iter().zip(&prof.ubar) {
            assert_relative_eq!(u * r, c0, max_relative = 1e-10);
        }
    }

    #[test]
    fn norm_fit_exact_model_recovery() {
        let mu0 = 3.7;
        let field = IsoCoupleField { mu: mu0 };
        let radii = log_radii(0.01, 0.25, 200);
        let prof = radial_average(&field, &radii, &default_angles_deg()).unwrap();
        let mu = fit_mu_norm(&prof).unwrap();
        assert_relative_eq!(mu, mu0, max_relative = 1e-12);

        let iso = IsotropicModuli::new(2.2, mu0).unwrap();
        let dfield = IsoDilField { iso };
        let dprof = radial_average(&dfield, &radii, &default_angles_deg()).unwrap();
        let kappa = fit_kappa_norm(&dprof, mu0).unwrap();
        assert_relative_eq!(kappa, 2.2, max_relative = 1e-12);
    }

    #[test]
    fn norm_fit_matches_numerical_minimizer() {
        // Golden-section minimization of the squared error in A must
        // agree with the closed-form amplitude.
        let field = AnalyticField {
            material: CubicModuli::new(7.645, 5.901, 0.626).unwrap(),
            kind: AnalyticSolutionKind::Couple,
        };
        let radii = log_radii(0.0075, 0.25, 100);
        let prof = radial_average(&field, &radii, &default_angles_deg()).unwrap();
        let obj = |a: f64| -> f64 {
            prof.radii
                .iter()
                .zip(&prof.ubar)
                .map(|(&r, &u)| (u - a / r).powi(2))
                .sum()
        };
        let (mut lo, mut hi) = (1e-4, 1e1);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let (m1, m2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
            if obj(m1) < obj(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let a_gss = 0.5 * (lo + hi);
        let mu = fit_mu_norm(&prof).unwrap();
        let a_closed = 1.0 / (4.0 * PI * mu);
        assert_relative_eq!(a_closed, a_gss, max_relative = 1e-9);
    }

    #[test]
    fn fullfield_fit_exact_model_recovery() {
        let mu0 = 1.9;
        let field = IsoCoupleField { mu: mu0 };
        let grid = grid_sample(&field, 0.005, 0.01, 0.25).unwrap();
        assert!(grid.points.len() > 5000);
        let mu = fit_mu_fullfield(&grid).unwrap();
        assert_relative_eq!(mu, mu0, max_relative = 1e-12);

        let iso = IsotropicModuli::new(3.1, mu0).unwrap();
        let dfield = IsoDilField { iso };
        let dgrid = grid_sample(&dfield, 0.005, 0.01, 0.25).unwrap();
        let kappa = fit_kappa_fullfield(&dgrid, mu0).unwrap();
        assert_relative_eq!(kappa, 3.1, max_relative = 1e-12);
    }

    #[test]
    fn norm_and_fullfield_agree_on_isotropic_data() {
        let mu0 = 4.4;
        let field = IsoCoupleField { mu: mu0 };
        let prof =
            radial_average(&field, &log_radii(0.01, 0.25, 200), &default_angles_deg()).unwrap();
        let grid = grid_sample(&field, 0.005, 0.01, 0.25).unwrap();
        assert_relative_eq!(
            fit_mu_norm(&prof).unwrap(),
            fit_mu_fullfield(&grid).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn scale_covariance_of_fits() {
        // Scaling all moduli by s scales the analytic field by 1/s and the
        // fitted moduli by s.
        let s = 3.25;
        let base = CubicModuli::new(7.645, 5.901, 0.626).unwrap();
        let scaled = CubicModuli::new(s * 7.645, s * 5.901, s * 0.626).unwrap();
        let radii = log_radii(0.0075, 0.25, 60);
        let f1 = AnalyticField {
            material: base,
            kind: AnalyticSolutionKind::Couple,
        };
        let f2 = AnalyticField {
            material: scaled,
            kind: AnalyticSolutionKind::Couple,
        };
        let p1 = radial_average(&f1, &radii, &default_angles_deg()).unwrap();
        let p2 = radial_average(&f2, &radii, &default_angles_deg()).unwrap();
        let (m1, m2) = (fit_mu_norm(&p1).unwrap(), fit_mu_norm(&p2).unwrap());
        assert_relative_eq!(m2, s * m1, max_relative = 1e-12);
    }

    #[test]
    fn continuous_fit_log_examples() {
        // Exact fixed point.
        let mu0 = 2.3;
        let mu = continuous_fit_log(|r| 1.0 / (4.0 * PI * mu0 * r), 0.01, 0.25).unwrap();
        assert_relative_eq!(mu, mu0, max_relative = 1e-10);
        // fbar = 2/r -> mu = 1/(8 pi).
        let mu = continuous_fit_log(|r| 2.0 / r, 0.01, 0.25).unwrap();
        assert_relative_eq!(mu, 1.0 / (8.0 * PI), max_relative = 1e-10);
        // Nonpositive profile rejected.
        assert!(continuous_fit_log(|r| r - 0.1, 0.01, 0.25).is_err());
    }

    #[test]
    fn continuous_fit_euclid_examples() {
        let mu = continuous_fit_euclid(|r| 0.7 / r, 0.01, 0.25).unwrap();
        assert_relative_eq!(mu, 1.0 / (4.0 * PI * 0.7), max_relative = 1e-10);
        let mu0 = 2.3;
        let mu = continuous_fit_euclid(|r| 1.0 / (4.0 * PI * mu0 * r), 0.01, 0.25).unwrap();
        assert_relative_eq!(mu, mu0, max_relative = 1e-10);
    }

    #[test]
    fn continuous_fit_log_stationarity() {
        // F(mu) = int (log(4 pi mu) - log(1/(fbar r)))^2 dr/(...)
        // Verify F'(mu) ~ 0 at the returned minimizer by central difference.
        let fbar = |r: f64| (1.0 + 0.1 * (r * 40.0).sin()) / r;
        let (ra, rb) = (0.01, 0.25);
        let mu = continuous_fit_log(fbar, ra, rb).unwrap();
        let objective = |m: f64| {
            adaptive_simpson(
                &|r: f64| ((4.0 * PI * m).ln() + (fbar(r) * r).ln()).powi(2),
                ra,
                rb,
                1e-12,
            )
        };
        let h = 1e-5 * mu;
        let deriv = (objective(mu + h) - objective(mu - h)) / (2.0 * h);
        // Scale of the derivative away from the optimum.
        let deriv_scale = (objective(2.0 * mu) - objective(mu)) / mu;
        assert!(
            deriv.abs() < 1e-6 * deriv_scale.abs(),
            "F'(mu) = {deriv:.3e} vs scale {deriv_scale:.3e}"
        );
    }

    #[test]
    fn continuous_fit_euclid_matches_brute_force() {
        let fbar = |r: f64| (1.0 + 0.1 * r.sin()) / r;
        let (ra, rb) = (0.5, 2.0);
        let mu = continuous_fit_euclid(fbar, ra, rb).unwrap();
        // Brute-force 1-D minimization of the Euclidean objective
        // int (1/(4 pi mu r) - fbar)^2 dr via golden section.
        let objective = |m: f64| {
            adaptive_simpson(
                &|r: f64| (1.0 / (4.0 * PI * m * r) - fbar(r)).powi(2),
                ra,
                rb,
                1e-12,
            )
        };
        let (mut lo, mut hi) = (0.2 * mu, 5.0 * mu);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..120 {
            let (m1, m2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
            if objective(m1) < objective(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        assert_relative_eq!(mu, 0.5 * (lo + hi), max_relative = 1e-8);
    }

    #[test]
    fn profile_interpolant_is_linear_between_samples() {
        let prof = RadialProfile {
            radii: vec![1.0, 2.0, 4.0],
            ubar: vec![1.0, 3.0, 2.0],
            angles_deg: vec![0.0],
        };
        let f = profile_interpolant(&prof);
        assert_abs_diff_eq!(f(1.5), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f(3.0), 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(f(0.5), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f(5.0), 2.0, epsilon = 1e-14);
    }
}
