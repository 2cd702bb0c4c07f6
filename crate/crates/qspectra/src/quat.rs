//! Quaternion scalar algebra.
//!
//! A quaternion `a·e + b·i + c·j + d·k` is stored as its four real
//! coefficients. Its 2x2 complex block form is produced on demand by
//! [`crate::embed::embed_scalar`]; arithmetic here stays in the real
//! coefficients so that products of exactly-representable inputs are exact.

use std::ops::{Add, Mul, Neg, Sub};

/// Hyper-complex number of rank 4: `a·e + b·i + c·j + d·k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    /// The identity unit `e`.
    pub const E: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    /// Real multiple of the identity unit.
    pub const fn real(a: f64) -> Self {
        Quaternion::new(a, 0.0, 0.0, 0.0)
    }

    /// Conjugate `a·e - b·i - c·j - d·k`. The block form of the conjugate is
    /// the conjugate transpose of the block form.
    pub fn conjugate(self) -> Self {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    /// Euclidean norm `sqrt(a^2 + b^2 + c^2 + d^2)`.
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.a + r.a, self.b + r.b, self.c + r.c, self.d + r.d)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.a - r.a, self.b - r.b, self.c - r.c, self.d - r.d)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// Hamilton product, defined so that the 2x2 block form is multiplicative:
/// the block of `x * y` equals the matrix product of the blocks.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.a * r.a - self.b * r.b - self.c * r.c - self.d * r.d,
            self.a * r.b + self.b * r.a + self.c * r.d - self.d * r.c,
            self.a * r.c - self.b * r.d + self.c * r.a + self.d * r.b,
            self.a * r.d + self.b * r.c - self.c * r.b + self.d * r.a,
        )
    }
}
