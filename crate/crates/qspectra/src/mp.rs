//! Closed-form Marchenko-Pastur analytics.
//!
//! The law is parameterized by the dimension-to-sample ratio `y > 0` and
//! the scale `sigma2 > 0`. Its continuous density lives on
//! `[sigma2 (1-sqrt y)^2, sigma2 (1+sqrt y)^2]` and integrates to
//! `min(1, 1/y)`; for `y > 1` an atom of mass `1 - 1/y` sits at the origin.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Absolute tolerance for the CDF quadrature.
const CDF_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct MPLaw {
    pub y: f64,
    pub sigma2: f64,
    /// Left support edge `sigma2 (1 - sqrt y)^2`.
    pub a: f64,
    /// Right support edge `sigma2 (1 + sqrt y)^2`.
    pub b: f64,
}

impl MPLaw {
    pub fn new(y: f64, sigma2: f64) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::Domain(format!("ratio y must be positive, got {y}")));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::Domain(format!(
                "scale sigma2 must be positive, got {sigma2}"
            )));
        }
        let sq = y.sqrt();
        Ok(MPLaw {
            y,
            sigma2,
            a: sigma2 * (1.0 - sq) * (1.0 - sq),
            b: sigma2 * (1.0 + sq) * (1.0 + sq),
        })
    }

    /// Support `(a, b)` of the continuous part.
    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Point mass at the origin: `max(0, 1 - 1/y)`.
    pub fn atom_mass(&self) -> f64 {
        (1.0 - 1.0 / self.y).max(0.0)
    }

    /// Density of the continuous part:
    /// `sqrt((b-x)(x-a)) / (2 pi x y sigma2)` on `[a, b]`, zero elsewhere.
    /// At `x = a = 0` (the `y = 1` case) the value is defined as 0.
    pub fn density(&self, x: f64) -> f64 {
        if x < self.a || x > self.b || x <= 0.0 {
            return 0.0;
        }
        ((self.b - x) * (x - self.a)).sqrt() / (2.0 * PI * x * self.y * self.sigma2)
    }

    /// Distribution function: atom at the origin plus the integrated
    /// density up to `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let atom = if x >= 0.0 { self.atom_mass() } else { 0.0 };
        atom + self.continuous_cdf(x)
    }

    /// Integral of the density over `[a, min(x, b)]`, by adaptive Simpson
    /// after the substitution `x = a + (b-a) sin^2(theta)` which removes the
    /// inverse-square-root endpoint behavior.
    fn continuous_cdf(&self, x: f64) -> f64 {
        if x <= self.a {
            return 0.0;
        }
        let hi = x.min(self.b);
        let frac = ((hi - self.a) / (self.b - self.a)).clamp(0.0, 1.0);
        let theta_hi = frac.sqrt().asin();
        let width = self.b - self.a;
        let integrand = move |theta: f64| {
            let s2 = theta.sin().powi(2);
            if self.a == 0.0 {
                // x = b sin^2(theta); the sin^2 cancels against 1/x.
                width * (1.0 - s2) / (PI * self.y * self.sigma2)
            } else {
                let xv = self.a + width * s2;
                width * width * s2 * (1.0 - s2) / (PI * xv * self.y * self.sigma2)
            }
        };
        adaptive_simpson(&integrand, 0.0, theta_hi, CDF_QUAD_TOL)
    }

    /// Stieltjes transform for `Im z > 0`: the root of
    /// `y sigma2 z m^2 + (z - sigma2 (1 - y)) m + 1 = 0`
    /// with positive imaginary part.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if z.im <= 0.0 {
            return Err(Error::Domain(format!(
                "Stieltjes transform requires Im z > 0, got z = {z}"
            )));
        }
        let c2 = Complex64::new(self.y * self.sigma2, 0.0) * z;
        let c1 = z - Complex64::new(self.sigma2 * (1.0 - self.y), 0.0);
        let c0 = Complex64::new(1.0, 0.0);
        let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
        // Stable quadratic solve: avoid cancellation in -c1 +/- disc.
        let q = if (c1 + disc).norm() >= (c1 - disc).norm() {
            -(c1 + disc) * 0.5
        } else {
            -(c1 - disc) * 0.5
        };
        let r1 = q / c2;
        let r2 = c0 / q;
        // Both quadratic roots are computed; the Stieltjes branch is the one
        // in the upper half plane.
        if r1.im > 0.0 && (r2.im <= 0.0 || r1.im >= r2.im) {
            Ok(r1)
        } else {
            Ok(r2)
        }
    }
}
