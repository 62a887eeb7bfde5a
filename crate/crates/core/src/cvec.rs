//! Points of `C²`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub type C64 = Complex<f64>;

/// A point (or vector) with two complex coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CVec2(pub [C64; 2]);

impl CVec2 {
    pub const ZERO: CVec2 = CVec2([C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);

    pub fn new(z1: C64, z2: C64) -> Self {
        CVec2([z1, z2])
    }

    /// A point with zero imaginary parts.
    pub fn real(x: f64, y: f64) -> Self {
        CVec2([C64::new(x, 0.0), C64::new(y, 0.0)])
    }

    pub fn from_parts(re: [f64; 2], im: [f64; 2]) -> Self {
        CVec2([C64::new(re[0], im[0]), C64::new(re[1], im[1])])
    }

    pub fn re(&self) -> [f64; 2] {
        [self.0[0].re, self.0[1].re]
    }

    pub fn im(&self) -> [f64; 2] {
        [self.0[0].im, self.0[1].im]
    }

    /// Hermitian norm `sqrt(|z1|² + |z2|²)`.
    pub fn norm(&self) -> f64 {
        self.0[0].norm().hypot(self.0[1].norm())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Bilinear (non-conjugated) dot product, `a·b = a1 b1 + a2 b2`.
    pub fn dot(&self, other: &CVec2) -> C64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }

    /// Scale an integer lattice vector by a complex factor.
    pub fn scaled_lattice(factor: C64, v: [i32; 2]) -> Self {
        CVec2([factor * f64::from(v[0]), factor * f64::from(v[1])])
    }
}

impl Add for CVec2 {
    type Output = CVec2;
    fn add(self, rhs: CVec2) -> CVec2 {
        CVec2([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl AddAssign for CVec2 {
    fn add_assign(&mut self, rhs: CVec2) {
        self.0[0] += rhs.0[0];
        self.0[1] += rhs.0[1];
    }
}

impl Sub for CVec2 {
    type Output = CVec2;
    fn sub(self, rhs: CVec2) -> CVec2 {
        CVec2([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Neg for CVec2 {
    type Output = CVec2;
    fn neg(self) -> CVec2 {
        CVec2([-self.0[0], -self.0[1]])
    }
}

impl Mul<f64> for CVec2 {
    type Output = CVec2;
    fn mul(self, rhs: f64) -> CVec2 {
        CVec2([self.0[0] * rhs, self.0[1] * rhs])
    }
}

impl Mul<C64> for CVec2 {
    type Output = CVec2;
    fn mul(self, rhs: C64) -> CVec2 {
        CVec2([self.0[0] * rhs, self.0[1] * rhs])
    }
}

/// 2D cross product `a ∧ b = a_x b_y − a_y b_x`.
pub fn wedge(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
