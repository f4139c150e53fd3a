//! Elasticity-tensor parametrizations for plane-strain cubic materials.
//!
//! A planar cubic material is described by three moduli: the planar bulk
//! modulus `kappa`, the first shear modulus `mu`, and the second shear
//! modulus `mu_star`.  The Lamé parameter is derived as `lambda = kappa - mu`.
//! When `mu_star == mu` the material is isotropic.
//!
//! The module provides Voigt 6x6 representations, the cubic Euclidean and
//! logarithmic distances, the closed-form closest-isotropic projections
//! under each distance, and the reverse families of cubic materials that
//! share a given isotropic projection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance by which every modulus must exceed zero.
pub const POSITIVITY_EPS: f64 = 1e-12;

/// Errors arising from invalid moduli.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModuliError {
    /// A modulus failed the positivity requirement.
    #[error("modulus {name} = {value} must be positive (tolerance {tol})")]
    NonPositive {
        name: &'static str,
        value: f64,
        tol: f64,
    },
    /// A reverse-family parameter would produce non-positive moduli.
    #[error("family parameter c = {c} leaves the admissible region: {reason}")]
    InadmissibleParameter { c: f64, reason: &'static str },
}

fn check_positive(name: &'static str, value: f64, scale: f64) -> Result<(), ModuliError> {
    let tol = POSITIVITY_EPS * scale;
    if !(value > tol) {
        return Err(ModuliError::NonPositive { name, value, tol });
    }
    Ok(())
}

/// Plane-strain isotropic moduli `(kappa, mu)` with `kappa = lambda + mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsotropicModuli {
    kappa: f64,
    mu: f64,
}

impl IsotropicModuli {
    /// Validates `mu > 0` and `kappa > 0` (equivalently `lambda + mu > 0`).
    pub fn new(kappa: f64, mu: f64) -> Result<Self, ModuliError> {
        let scale = kappa.abs().max(mu.abs()).max(f64::MIN_POSITIVE);
        check_positive("kappa", kappa, scale)?;
        check_positive("mu", mu, scale)?;
        Ok(Self { kappa, mu })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Lamé parameter `lambda = kappa - mu`.
    pub fn lambda(&self) -> f64 {
        self.kappa - self.mu
    }
}

/// Planar cubic moduli `(kappa, mu, mu_star)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicModuli {
    kappa: f64,
    mu: f64,
    mu_star: f64,
}

impl CubicModuli {
    /// Validates the positive-definiteness conditions `mu > 0`,
    /// `mu_star > 0`, and `kappa > 0` (i.e. `lambda + mu > 0`).
    pub fn new(kappa: f64, mu: f64, mu_star: f64) -> Result<Self, ModuliError> {
        let scale = kappa
            .abs()
            .max(mu.abs())
            .max(mu_star.abs())
            .max(f64::MIN_POSITIVE);
        check_positive("kappa", kappa, scale)?;
        check_positive("mu", mu, scale)?;
        check_positive("mu_star", mu_star, scale)?;
        Ok(Self {
            kappa,
            mu,
            mu_star,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mu_star(&self) -> f64 {
        self.mu_star
    }

    /// Lamé parameter `lambda = kappa - mu`.
    pub fn lambda(&self) -> f64 {
        self.kappa - self.mu
    }

    /// Whether the material is (numerically) isotropic, `|mu* - mu| <= tol * mu`.
    pub fn is_isotropic(&self, rel_tol: f64) -> bool {
        (self.mu_star - self.mu).abs() <= rel_tol * self.mu
    }

    /// The isotropic material with the same `(kappa, mu)`.
    pub fn isotropic_part(&self) -> IsotropicModuli {
        IsotropicModuli {
            kappa: self.kappa,
            mu: self.mu,
        }
    }
}

impl From<IsotropicModuli> for CubicModuli {
    fn from(iso: IsotropicModuli) -> Self {
        CubicModuli {
            kappa: iso.kappa,
            mu: iso.mu,
            mu_star: iso.mu,
        }
    }
}

/// Symmetric 6x6 stiffness matrix in Voigt notation.
#[derive(Debug, Clone, PartialEq)]
pub struct VoigtMatrix {
    pub entries: [[f64; 6]; 6],
}

/// Voigt 6x6 stiffness of a cubic material: diagonal blocks `kappa + mu`,
/// off-diagonal `kappa - mu`, shear diagonal `mu_star`.
///
/// The in-plane block reads `C11 = lambda + 2 mu = kappa + mu`,
/// `C12 = lambda = kappa - mu`, and `C44 = mu_star`; for `mu_star = mu`
/// the matrix is isotropic.
pub fn to_voigt(m: &CubicModuli) -> VoigtMatrix {
    let c11 = m.kappa + m.mu;
    let c12 = m.kappa - m.mu;
    let c44 = m.mu_star;
    let mut e = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            e[i][j] = if i == j { c11 } else { c12 };
        }
    }
    for i in 3..6 {
        e[i][i] = c44;
    }
    VoigtMatrix { entries: e }
}

/// Euclidean distance between two cubic materials:
/// `sqrt(9 dk^2 + 8 dmu^2 + 12 dmu*^2)`.
pub fn dist_euclid_cubic(a: &CubicModuli, b: &CubicModuli) -> f64 {
    let dk = a.kappa - b.kappa;
    let dm = a.mu - b.mu;
    let ds = a.mu_star - b.mu_star;
    (9.0 * dk * dk + 8.0 * dm * dm + 12.0 * ds * ds).sqrt()
}

/// Logarithmic distance between two cubic materials:
/// `sqrt(log^2(k1/k2) + 2 log^2(mu1/mu2) + 3 log^2(mu1*/mu2*))`.
pub fn dist_log_cubic(a: &CubicModuli, b: &CubicModuli) -> f64 {
    let lk = (a.kappa / b.kappa).ln();
    let lm = (a.mu / b.mu).ln();
    let ls = (a.mu_star / b.mu_star).ln();
    (lk * lk + 2.0 * lm * lm + 3.0 * ls * ls).sqrt()
}

/// Closest isotropic material under the Euclidean distance:
/// `kappa_iso = kappa`, `mu_iso = (2/5) mu + (3/5) mu_star`.
pub fn norris_euclid(m: &CubicModuli) -> IsotropicModuli {
    IsotropicModuli {
        kappa: m.kappa,
        mu: 0.4 * m.mu + 0.6 * m.mu_star,
    }
}

/// Closest isotropic material under the logarithmic distance:
/// `kappa_iso = kappa`, `mu_iso = (mu^2 mu*^3)^(1/5)`.
pub fn norris_log(m: &CubicModuli) -> IsotropicModuli {
    IsotropicModuli {
        kappa: m.kappa,
        mu: (m.mu.powi(2) * m.mu_star.powi(3)).powf(0.2),
    }
}

/// Cubic family `(kappa, mu_iso + 3c, mu_iso - 2c)` whose Euclidean
/// projection is exactly `iso`; requires `mu_iso + 3c > 0` and
/// `mu_iso - 2c > 0`.
pub fn reverse_family_euclid(iso: &IsotropicModuli, c: f64) -> Result<CubicModuli, ModuliError> {
    let mu = iso.mu + 3.0 * c;
    let mu_star = iso.mu - 2.0 * c;
    let tol = POSITIVITY_EPS * iso.mu;
    if mu <= tol {
        return Err(ModuliError::InadmissibleParameter {
            c,
            reason: "mu_iso + 3c must stay positive",
        });
    }
    if mu_star <= tol {
        return Err(ModuliError::InadmissibleParameter {
            c,
            reason: "mu_iso - 2c must stay positive",
        });
    }
    CubicModuli::new(iso.kappa, mu, mu_star)
}

/// Cubic family `(kappa, mu_iso c^3, mu_iso / c^2)` whose logarithmic
/// projection is exactly `iso`; requires `c > 0`.
pub fn reverse_family_log(iso: &IsotropicModuli, c: f64) -> Result<CubicModuli, ModuliError> {
    if !(c > 0.0) {
        return Err(ModuliError::InadmissibleParameter {
            c,
            reason: "family parameter must be positive",
        });
    }
    CubicModuli::new(iso.kappa, iso.mu * c.powi(3), iso.mu / (c * c))
}
