//! Closed-form plane-strain fundamental solutions for cubic materials.
//!
//! Implements the characteristic roots of the acoustic determinant, the
//! point-force displacement field, the concentrated couple and center of
//! dilatation (both as closed forms and as finite-dipole superpositions),
//! their isotropic limits, and the tractions these fields induce on a
//! small circle centered at the source.
//!
//! All root-dependent formulas are evaluated with complex arithmetic and
//! the real part is returned: when the characteristic roots form a
//! complex-conjugate pair the imaginary contributions cancel exactly, so
//! a single code path covers both root regimes.

use num_complex::Complex64;
use thiserror::Error;

use crate::moduli::{CubicModuli, IsotropicModuli};

/// Relative tolerance on `|mu* - mu|` below which the cubic closed forms
/// degenerate (`q -> 0`) and the isotropic solutions must be used.
pub const ISO_DEGENERACY_TOL: f64 = 1e-8;

/// Errors from analytic field evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GreensError {
    /// `|mu* - mu|` is below the degeneracy tolerance: the cubic closed
    /// forms are 0/0 and callers must switch to the isotropic solutions.
    #[error("material is isotropic to working precision; use the isotropic closed forms")]
    DegenerateIsotropic,
    /// The evaluation point coincides with a singular source point.
    #[error("evaluation point coincides with a singular source point")]
    SingularPoint,
    /// The requested operation is not defined for this solution kind.
    #[error("operation is not defined for this solution kind")]
    UnsupportedKind,
}

/// Characteristic roots `s1, s2` of the acoustic determinant together
/// with the invariants `p` and `q` that define them.
///
/// Both roots have positive real part.  For `q > 0` (i.e. `mu > mu*`)
/// they are real; for `q < 0` they form a complex-conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicRoots {
    pub s1: Complex64,
    pub s2: Complex64,
    pub p: f64,
    pub q: f64,
}

impl CharacteristicRoots {
    /// Principal square root of `q` as a complex number.
    pub fn sqrt_q(&self) -> Complex64 {
        Complex64::new(self.q, 0.0).sqrt()
    }
}

/// Coordinates of an evaluation point relative to the source at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub x1: f64,
    pub x2: f64,
}

impl FieldPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn r(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    fn is_origin(&self) -> bool {
        self.x1 == 0.0 && self.x2 == 0.0
    }
}

/// In-plane force direction for the point-force solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceDirection {
    X1,
    X2,
}

/// The unit-strength singular solutions provided by this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticSolutionKind {
    PointForce(ForceDirection),
    /// Concentrated couple, normalized to unit moment.
    Couple,
    /// Center of dilatation, normalized to unit dipole strength.
    Dilatation,
}

/// Characteristic roots `s_{1,2} = (2 mu* (lambda + 2 mu))^(-1/2) sqrt(-p -+ sqrt(q))`
/// with `p = 2 lambda mu* - 4 mu (lambda + mu)` and
/// `q = 16 mu (mu - mu*) (lambda + mu) (lambda + mu + mu*)`.
///
/// The branch of each square root is chosen so that `Re(s_m) > 0`.
pub fn char_roots(m: &CubicModuli) -> Result<CharacteristicRoots, GreensError> {
    if m.is_isotropic(ISO_DEGENERACY_TOL) {
        return Err(GreensError::DegenerateIsotropic);
    }
    let (mu, mus, lam) = (m.mu(), m.mu_star(), m.lambda());
    let p = 2.0 * lam * mus - 4.0 * mu * (lam + mu);
    let q = 16.0 * mu * (mu - mus) * (lam + mu) * (lam + mu + mus);
    let sq = Complex64::new(q, 0.0).sqrt();
    let pref = 1.0 / (2.0 * mus * (lam + 2.0 * mu)).sqrt();
    let mut s1 = (Complex64::new(-p, 0.0) - sq).sqrt() * pref;
    let mut s2 = (Complex64::new(-p, 0.0) + sq).sqrt() * pref;
    if s1.re < 0.0 {
        s1 = -s1;
    }
    if s2.re < 0.0 {
        s2 = -s2;
    }
    Ok(CharacteristicRoots { s1, s2, p, q })
}

/// Cofactor components and determinant of the acoustic tensor at a real
/// wave vector: `(C11, C12, C22, D)`.
pub fn acoustic_forms(m: &CubicModuli, xi1: f64, xi2: f64) -> (f64, f64, f64, f64) {
    let (mu, mus, lam) = (m.mu(), m.mu_star(), m.lambda());
    let c11 = mus * xi1 * xi1 + (lam + 2.0 * mu) * xi2 * xi2;
    let c12 = -(lam + mus) * xi1 * xi2;
    let c22 = (lam + 2.0 * mu) * xi1 * xi1 + mus * xi2 * xi2;
    (c11, c12, c22, c11 * c22 - c12 * c12)
}

/// Acoustic determinant continued to complex wave vectors; vanishes at
/// `xi2 = i s_m |xi1|` for both characteristic roots.
pub fn acoustic_det_complex(m: &CubicModuli, xi1: Complex64, xi2: Complex64) -> Complex64 {
    let (mu, mus, lam) = (m.mu(), m.mu_star(), m.lambda());
    let lp2 = lam + 2.0 * mu;
    let c11 = mus * xi1 * xi1 + lp2 * xi2 * xi2;
    let c12 = -(lam + mus) * xi1 * xi2;
    let c22 = lp2 * xi1 * xi1 + mus * xi2 * xi2;
    c11 * c22 - c12 * c12
}

/// `Y_m^(1) = ((lambda + 2 mu) s_m^2 - mu*) / s_m`.
fn y1(m: &CubicModuli, s: Complex64) -> Complex64 {
    ((m.lambda() + 2.0 * m.mu()) * s * s - m.mu_star()) / s
}

/// `Y_m^(2) = (mu* s_m^2 - (lambda + 2 mu)) / s_m`.
fn y2(m: &CubicModuli, s: Complex64) -> Complex64 {
    (m.mu_star() * s * s - (m.lambda() + 2.0 * m.mu())) / s
}

/// Pseudo-radius `r_m = sqrt(x1^2 + s_m^2 x2^2)` (principal branch).
fn r_m(s: Complex64, x: FieldPoint) -> Complex64 {
    (Complex64::new(x.x1 * x.x1, 0.0) + s * s * x.x2 * x.x2).sqrt()
}

/// Angle `theta_m`, single-valued off a cut along the negative x1 axis:
/// `theta_m = -i log((x1 + i s_m x2) / r_m)`.
fn theta_m(s: Complex64, x: FieldPoint, rm: Complex64) -> Complex64 {
    let z = (Complex64::new(x.x1, 0.0) + Complex64::i() * s * x.x2) / rm;
    -Complex64::i() * z.ln()
}

/// Point-force displacement in an infinite cubic medium (complex parts).
fn point_force_complex(
    m: &CubicModuli,
    dir: ForceDirection,
    x: FieldPoint,
) -> Result<(Complex64, Complex64), GreensError> {
    if x.is_origin() {
        return Err(GreensError::SingularPoint);
    }
    let roots = char_roots(m)?;
    let sq = roots.sqrt_q();
    let (s1, s2) = (roots.s1, roots.s2);
    let r1 = r_m(s1, x);
    let r2 = r_m(s2, x);
    let two_pi = 2.0 * std::f64::consts::PI;
    let shear_term = (m.lambda() + m.mu_star()) / (two_pi * sq)
        * (theta_m(s2, x, r2) - theta_m(s1, x, r1));
    match dir {
        ForceDirection::X1 => {
            let u1 = (y1(m, s1) * r1.ln() - y1(m, s2) * r2.ln()) / (two_pi * sq);
            Ok((u1, shear_term))
        }
        ForceDirection::X2 => {
            let u2 = (y2(m, s1) * r1.ln() - y2(m, s2) * r2.ln()) / (two_pi * sq);
            Ok((shear_term, u2))
        }
    }
}

/// Displacement due to a unit point force along `dir`.
///
/// Refuses (numerically) isotropic materials: the isotropic point-force
/// limit is not part of the implemented closed forms.
pub fn point_force_displacement(
    m: &CubicModuli,
    dir: ForceDirection,
    x: FieldPoint,
) -> Result<(f64, f64), GreensError> {
    point_force_complex(m, dir, x).map(|(u1, u2)| (u1.re, u2.re))
}

/// Coefficient form shared by the couple and dilatation closed forms.
///
/// Couple:      u1 = x2 (a1/r1^2 + a2/r2^2) + b x1^2 x2 / (r1^2 r2^2),
///              u2 = x1 (c1/r1^2 + c2/r2^2).
/// Dilatation:  u1 = x1 (c1/r1^2 + c2/r2^2),
///              u2 = x2 (a1/r1^2 + a2/r2^2) + b x1^2 x2 / (r1^2 r2^2).
struct SourceCoeffs {
    s1: Complex64,
    s2: Complex64,
    a1: Complex64,
    a2: Complex64,
    b: Complex64,
    c1: Complex64,
    c2: Complex64,
}

fn couple_coeffs(m: &CubicModuli) -> Result<SourceCoeffs, GreensError> {
    let roots = char_roots(m)?;
    let (s1, s2) = (roots.s1, roots.s2);
    let sq = roots.sqrt_q();
    let four_pi = 4.0 * std::f64::consts::PI;
    let lm = m.lambda() + m.mu_star();
    let (y11, y21) = (y1(m, s1), y1(m, s2));
    let (y12, y22) = (y2(m, s1), y2(m, s2));
    Ok(SourceCoeffs {
        s1,
        s2,
        a1: -(lm * s1 - (y11 - y21) * s1 * s1) / (four_pi * sq),
        a2: lm * s2 / (four_pi * sq),
        b: -y21 / (four_pi * m.mu_star() * (m.lambda() + 2.0 * m.mu())),
        c1: -(lm * s1 + y12) / (four_pi * sq),
        c2: (lm * s2 + y22) / (four_pi * sq),
    })
}

fn dilatation_coeffs(m: &CubicModuli) -> Result<SourceCoeffs, GreensError> {
    let roots = char_roots(m)?;
    let (s1, s2) = (roots.s1, roots.s2);
    let sq = roots.sqrt_q();
    let four_pi = 4.0 * std::f64::consts::PI;
    let lm = m.lambda() + m.mu_star();
    let (y11, y21) = (y1(m, s1), y1(m, s2));
    let (y12, y22) = (y2(m, s1), y2(m, s2));
    Ok(SourceCoeffs {
        s1,
        s2,
        a1: -(lm * s1 + (y12 - y22) * s1 * s1) / (four_pi * sq),
        a2: lm * s2 / (four_pi * sq),
        b: y22 / (four_pi * m.mu_star() * (m.lambda() + 2.0 * m.mu())),
        c1: (lm * s1 - y11) / (four_pi * sq),
        c2: -(lm * s2 - y21) / (four_pi * sq),
    })
}

fn coeff_displacement(co: &SourceCoeffs, x: FieldPoint, couple: bool) -> (Complex64, Complex64) {
    let r1s = Complex64::new(x.x1 * x.x1, 0.0) + co.s1 * co.s1 * x.x2 * x.x2;
    let r2s = Complex64::new(x.x1 * x.x1, 0.0) + co.s2 * co.s2 * x.x2 * x.x2;
    let axial = (co.a1 / r1s + co.a2 / r2s) * x.x2 + co.b * x.x1 * x.x1 * x.x2 / (r1s * r2s);
    let trans = (co.c1 / r1s + co.c2 / r2s) * x.x1;
    if couple {
        (axial, trans)
    } else {
        (trans, axial)
    }
}

/// Displacement gradient `[du_i/dx_j]` of the coefficient form.
fn coeff_gradient(co: &SourceCoeffs, x: FieldPoint, couple: bool) -> [[f64; 2]; 2] {
    let (x1, x2) = (x.x1, x.x2);
    let r1s = Complex64::new(x1 * x1, 0.0) + co.s1 * co.s1 * x2 * x2;
    let r2s = Complex64::new(x1 * x1, 0.0) + co.s2 * co.s2 * x2 * x2;
    let (s1s, s2s) = (co.s1 * co.s1, co.s2 * co.s2);
    let inv1 = 1.0 / r1s;
    let inv2 = 1.0 / r2s;
    // d(1/r_m^2)/dx1 = -2 x1 / r_m^4, d(1/r_m^2)/dx2 = -2 s_m^2 x2 / r_m^4.
    let d1_x1 = -2.0 * x1 * inv1 * inv1;
    let d2_x1 = -2.0 * x1 * inv2 * inv2;
    let d1_x2 = -2.0 * x2 * s1s * inv1 * inv1;
    let d2_x2 = -2.0 * x2 * s2s * inv2 * inv2;

    // axial = x2 (a1/r1^2 + a2/r2^2) + b x1^2 x2 / (r1^2 r2^2)
    let sum_a = co.a1 * inv1 + co.a2 * inv2;
    let prod = inv1 * inv2;
    let prod_x1 = d1_x1 * inv2 + inv1 * d2_x1;
    let prod_x2 = d1_x2 * inv2 + inv1 * d2_x2;
    let axial_x1 =
        (co.a1 * d1_x1 + co.a2 * d2_x1) * x2 + co.b * x2 * (2.0 * x1 * prod + x1 * x1 * prod_x1);
    let axial_x2 = sum_a
        + (co.a1 * d1_x2 + co.a2 * d2_x2) * x2
        + co.b * x1 * x1 * (prod + x2 * prod_x2);

    // trans = x1 (c1/r1^2 + c2/r2^2)
    let sum_c = co.c1 * inv1 + co.c2 * inv2;
    let trans_x1 = sum_c + (co.c1 * d1_x1 + co.c2 * d2_x1) * x1;
    let trans_x2 = (co.c1 * d1_x2 + co.c2 * d2_x2) * x1;

    if couple {
        [[axial_x1.re, axial_x2.re], [trans_x1.re, trans_x2.re]]
    } else {
        [[trans_x1.re, trans_x2.re], [axial_x1.re, axial_x2.re]]
    }
}

/// Concentrated-couple displacement (unit moment), complex parts.
///
/// Exposed for verification of the conjugate-pair cancellation: for
/// `q < 0` materials the imaginary parts must vanish to rounding.
pub fn couple_cubic_complex(
    m: &CubicModuli,
    x: FieldPoint,
) -> Result<(Complex64, Complex64), GreensError> {
    if x.is_origin() {
        return Err(GreensError::SingularPoint);
    }
    Ok(coeff_displacement(&couple_coeffs(m)?, x, true))
}

/// Center-of-dilatation displacement (unit strength), complex parts.
pub fn dilatation_cubic_complex(
    m: &CubicModuli,
    x: FieldPoint,
) -> Result<(Complex64, Complex64), GreensError> {
    if x.is_origin() {
        return Err(GreensError::SingularPoint);
    }
    Ok(coeff_displacement(&dilatation_coeffs(m)?, x, false))
}

/// Concentrated couple of unit moment in an infinite cubic medium.
///
/// Dispatches to [`couple_iso`] when the material is isotropic to
/// working precision.
pub fn couple_cubic(m: &CubicModuli, x: FieldPoint) -> Result<(f64, f64), GreensError> {
    if m.is_isotropic(ISO_DEGENERACY_TOL) {
        return couple_iso(m.mu(), x);
    }
    couple_cubic_complex(m, x).map(|(u1, u2)| (u1.re, u2.re))
}

/// Center of dilatation of unit strength in an infinite cubic medium.
pub fn dilatation_cubic(m: &CubicModuli, x: FieldPoint) -> Result<(f64, f64), GreensError> {
    if m.is_isotropic(ISO_DEGENERACY_TOL) {
        return dilatation_iso(&m.isotropic_part(), x);
    }
    dilatation_cubic_complex(m, x).map(|(u1, u2)| (u1.re, u2.re))
}

/// Isotropic concentrated couple: `u = (-x2, x1) / (4 pi mu r^2)`,
/// with `|u| = 1 / (4 pi mu r)`.
pub fn couple_iso(mu: f64, x: FieldPoint) -> Result<(f64, f64), GreensError> {
    if x.is_origin() {
        return Err(GreensError::SingularPoint);
    }
    let r2 = x.x1 * x.x1 + x.x2 * x.x2;
    let c = 1.0 / (4.0 * std::f64::consts::PI * mu * r2);
    Ok((-c * x.x2, c * x.x1))
}

/// Isotropic center of dilatation: `u = x / (4 pi (mu + kappa) r^2)`,
/// with `|u| = 1 / (4 pi (mu + kappa) r)` and `mu + kappa = lambda + 2 mu`.
pub fn dilatation_iso(iso: &IsotropicModuli, x: FieldPoint) -> Result<(f64, f64), GreensError> {
    if x.is_origin() {
        return Err(GreensError::SingularPoint);
    }
    let r2 = x.x1 * x.x1 + x.x2 * x.x2;
    let c = 1.0 / (4.0 * std::f64::consts::PI * (iso.mu() + iso.kappa()) * r2);
    Ok((c * x.x1, c * x.x2))
}

/// Finite-dipole construction of the couple: two unit force dipoles with
/// arm `d/2` (offsets `d/4` on each side), superposed so the moments add
/// and the dilatational parts cancel.  `u(x; d)/d -> couple_cubic(x)` as
/// `d -> 0`.
pub fn couple_finite_dipole(
    m: &CubicModuli,
    d: f64,
    x: FieldPoint,
) -> Result<(f64, f64), GreensError> {
    let h = d / 4.0;
    let terms = [
        (ForceDirection::X1, 0.0, h, 1.0),
        (ForceDirection::X1, 0.0, -h, -1.0),
        (ForceDirection::X2, h, 0.0, -1.0),
        (ForceDirection::X2, -h, 0.0, 1.0),
    ];
    let mut u = (0.0, 0.0);
    for (dir, ox1, ox2, sign) in terms {
        let xp = FieldPoint::new(x.x1 + ox1, x.x2 + ox2);
        let (u1, u2) = point_force_displacement(m, dir, xp)?;
        u.0 += sign * u1;
        u.1 += sign * u2;
    }
    Ok(u)
}

/// Finite-dipole construction of the center of dilatation: two orthogonal
/// force dipoles at right angles.  `u(x; d)/d -> dilatation_cubic(x)`.
pub fn dilatation_finite_dipole(
    m: &CubicModuli,
    d: f64,
    x: FieldPoint,
) -> Result<(f64, f64), GreensError> {
    let h = d / 4.0;
    let terms = [
        (ForceDirection::X1, -h, 0.0, 1.0),
        (ForceDirection::X1, h, 0.0, -1.0),
        (ForceDirection::X2, 0.0, -h, 1.0),
        (ForceDirection::X2, 0.0, h, -1.0),
    ];
    let mut u = (0.0, 0.0);
    for (dir, ox1, ox2, sign) in terms {
        let xp = FieldPoint::new(x.x1 + ox1, x.x2 + ox2);
        let (u1, u2) = point_force_displacement(m, dir, xp)?;
        u.0 += sign * u1;
        u.1 += sign * u2;
    }
    Ok(u)
}

/// Unified displacement evaluation for any solution kind.
pub fn displacement(
    m: &CubicModuli,
    kind: AnalyticSolutionKind,
    x: FieldPoint,
) -> Result<(f64, f64), GreensError> {
    match kind {
        AnalyticSolutionKind::PointForce(dir) => point_force_displacement(m, dir, x),
        AnalyticSolutionKind::Couple => couple_cubic(m, x),
        AnalyticSolutionKind::Dilatation => dilatation_cubic(m, x),
    }
}

/// Batch evaluation over a point list; singular points are reported
/// per record so a batch run can continue past them.
pub fn eval_batch(
    m: &CubicModuli,
    kind: AnalyticSolutionKind,
    points: &[FieldPoint],
) -> Vec<Result<(f64, f64), GreensError>> {
    points.iter().map(|&x| displacement(m, kind, x)).collect()
}

/// Displacement gradient `[du_i/dx_j]` of the couple or dilatation field,
/// from closed-form differentiation of the coefficient representation.
pub fn displacement_gradient(
    m: &CubicModuli,
    kind: AnalyticSolutionKind,
    x: FieldPoint,
) -> Result<[[f64; 2]; 2], GreensError> {
    if x.is_origin() {
        return Err(GreensError::SingularPoint);
    }
    let r2 = x.x1 * x.x1 + x.x2 * x.x2;
    let r4 = r2 * r2;
    let (x1, x2) = (x.x1, x.x2);
    match kind {
        AnalyticSolutionKind::Couple => {
            if m.is_isotropic(ISO_DEGENERACY_TOL) {
                let c = 1.0 / (4.0 * std::f64::consts::PI * m.mu());
                return Ok([
                    [2.0 * c * x1 * x2 / r4, -c / r2 + 2.0 * c * x2 * x2 / r4],
                    [c / r2 - 2.0 * c * x1 * x1 / r4, -2.0 * c * x1 * x2 / r4],
                ]);
            }
            Ok(coeff_gradient(&couple_coeffs(m)?, x, true))
        }
        AnalyticSolutionKind::Dilatation => {
            if m.is_isotropic(ISO_DEGENERACY_TOL) {
                let k = 1.0 / (4.0 * std::f64::consts::PI * (m.lambda() + 2.0 * m.mu()));
                let off = -2.0 * k * x1 * x2 / r4;
                return Ok([
                    [k * (1.0 / r2 - 2.0 * x1 * x1 / r4), off],
                    [off, k * (1.0 / r2 - 2.0 * x2 * x2 / r4)],
                ]);
            }
            Ok(coeff_gradient(&dilatation_coeffs(m)?, x, false))
        }
        AnalyticSolutionKind::PointForce(_) => Err(GreensError::UnsupportedKind),
    }
}

/// Stress components `(sigma11, sigma22, sigma12)` of the couple or
/// dilatation field under the plane-strain cubic law.
pub fn stress(
    m: &CubicModuli,
    kind: AnalyticSolutionKind,
    x: FieldPoint,
) -> Result<(f64, f64, f64), GreensError> {
    let g = displacement_gradient(m, kind, x)?;
    let (e11, e22, g12) = (g[0][0], g[1][1], g[0][1] + g[1][0]);
    let (lam, mu, mus) = (m.lambda(), m.mu(), m.mu_star());
    let lp2 = lam + 2.0 * mu;
    Ok((lp2 * e11 + lam * e22, lam * e11 + lp2 * e22, mus * g12))
}

/// Traction `t = sigma . n` exerted on the material outside the circle
/// `r = a`, with `n = -e_r` the normal pointing into the hole (the
/// outward normal of the annular domain).  For the isotropic couple the
/// resultant moment of `t` over the circle is +1.
pub fn traction_on_circle(
    m: &CubicModuli,
    kind: AnalyticSolutionKind,
    a: f64,
    theta: f64,
) -> Result<(f64, f64), GreensError> {
    if !(a > 0.0) {
        return Err(GreensError::SingularPoint);
    }
    let x = FieldPoint::new(a * theta.cos(), a * theta.sin());
    let (s11, s22, s12) = stress(m, kind, x)?;
    let (n1, n2) = (-theta.cos(), -theta.sin());
    Ok((s11 * n1 + s12 * n2, s12 * n1 + s22 * n2))
}
