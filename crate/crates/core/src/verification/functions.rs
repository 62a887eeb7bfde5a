use serde::{Deserialize, Serialize};

use crate::cvec::{CVec2, C64};
use crate::process::PhysParams;

/// Order at which the Gaussian series is truncated.
const SERIES_ORDER: i32 = 6;

/// Holomorphic maps `ℂ² → ℂ` with closed-form derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// `Z₁`
    Linear,
    /// `Z₁² + Z₂²`
    Quadratic,
    /// `Z₁ Z₂`
    Product,
    /// `Z₁³`
    Cubic,
    /// `Σ_{k≤6} (−w)^k/k!` with `w = (Z₁² + Z₂²)/2`.
    GaussianSeries,
}

impl TestFunction {
    pub const ALL: [TestFunction; 5] = [
        TestFunction::Linear,
        TestFunction::Quadratic,
        TestFunction::Product,
        TestFunction::Cubic,
        TestFunction::GaussianSeries,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TestFunction::Linear => "linear",
            TestFunction::Quadratic => "quadratic",
            TestFunction::Product => "product",
            TestFunction::Cubic => "cubic",
            TestFunction::GaussianSeries => "gaussian_series",
        }
    }

    pub fn value(self, z: &CVec2) -> C64 {
        let [a, b] = z.0;
        match self {
            TestFunction::Linear => a,
            TestFunction::Quadratic => a * a + b * b,
            TestFunction::Product => a * b,
            TestFunction::Cubic => a * a * a,
            TestFunction::GaussianSeries => series(z.dot(z) * 0.5, 0),
        }
    }

    pub fn gradient(self, z: &CVec2) -> CVec2 {
        let [a, b] = z.0;
        let zero = C64::default();
        match self {
            TestFunction::Linear => CVec2([C64::new(1.0, 0.0), zero]),
            TestFunction::Quadratic => *z * 2.0,
            TestFunction::Product => CVec2([b, a]),
            TestFunction::Cubic => CVec2([a * a * 3.0, zero]),
            TestFunction::GaussianSeries => *z * series(z.dot(z) * 0.5, 1),
        }
    }

    pub fn laplacian(self, z: &CVec2) -> C64 {
        match self {
            TestFunction::Linear | TestFunction::Product => C64::default(),
            TestFunction::Quadratic => C64::new(4.0, 0.0),
            TestFunction::Cubic => z.0[0] * 6.0,
            TestFunction::GaussianSeries => {
                let zz = z.dot(z);
                let w = zz * 0.5;
                series(w, 2) * zz + series(w, 1) * 2.0
            }
        }
    }
}

/// `d^order/dw^order` of the truncated series `Σ_k (−w)^k / k!`.
fn series(w: C64, order: i32) -> C64 {
    let mut acc = C64::default();
    let mut fact = 1.0;
    for k in 0..=SERIES_ORDER {
        if k > 0 {
            fact *= f64::from(k);
        }
        if k < order {
            continue;
        }
        let falling: f64 = (0..order).map(|i| f64::from(k - i)).product();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += w.powi(k - order) * (sign * falling / fact);
    }
    acc
}

/// `Df = ∂f/∂t + 𝒱·∇f − i(ħ/2m)Δf` for a time-independent catalog function.
pub fn dynkin_apply(
    f: TestFunction,
    z: &CVec2,
    _t: f64,
    velocity: &CVec2,
    params: &PhysParams,
) -> C64 {
    let diffusion = C64::new(0.0, -params.hbar / (2.0 * params.mass));
    velocity.dot(&f.gradient(z)) + diffusion * f.laplacian(z)
}
