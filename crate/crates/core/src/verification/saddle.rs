use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cvec::{CVec2, C64};
use crate::schrodinger::{FreeGaussian, Units};
use crate::tolerances::{SADDLE_QUADRATIC_REL, SADDLE_STATIONARITY};

/// Step of the central differences used for the stationarity gradient.
const GRADIENT_STEP: f64 = 1e-3;

/// Outcome of the quadratic-Lagrangian saddle check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaddleReport {
    pub samples: usize,
    pub seed: u64,
    /// Largest `|∂J/∂𝒱|` at `𝒱 = ∇𝒮/m`, by central differences.
    pub max_stationarity_gradient: f64,
    /// Largest relative deviation of `J(𝒱* + δ) − J(𝒱*)` from `±(m/2)|δ|²`.
    pub max_quadratic_rel_error: f64,
    /// Points where a real or imaginary perturbation moved `Re J` the wrong way.
    pub signature_failures: usize,
    pub pass: bool,
}

/// `J(𝒱) = ½ m 𝒱·𝒱 − V(Z) − 𝒱·∇𝒮(Z)` with bilinear products.
fn objective(v: &CVec2, mass: f64, potential: C64, grad_s: &CVec2) -> C64 {
    v.dot(v) * (0.5 * mass) - potential - v.dot(grad_s)
}

/// Check that `𝒱* = ∇𝒮/m` is the complex critical point of `J` and that it is
/// a saddle: minimal in `Re J` along real perturbations, maximal along
/// imaginary ones. The action is that of a moving, spreading Gaussian in a
/// harmonic well evaluated at random complex points.
pub fn eq15_consistency(samples: usize, seed: u64, units: Units) -> SaddleReport {
    let packet = FreeGaussian {
        sigma0: 1.1,
        k0: [0.8, -0.3],
        center: [0.2, 0.4],
        units,
    };
    let omega = 0.7;
    let mass = units.mass;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SaddleReport {
        samples,
        seed,
        max_stationarity_gradient: 0.0,
        max_quadratic_rel_error: 0.0,
        signature_failures: 0,
        pass: false,
    };
    for _ in 0..samples {
        let z = CVec2::from_parts(
            [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
            [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)],
        );
        let t = rng.random_range(0.0..2.0);
        let grad_s = packet.complex_action_gradient(z, t);
        let potential = z.dot(&z) * (0.5 * mass * omega * omega);
        let j = |v: &CVec2| objective(v, mass, potential, &grad_s);
        let star = grad_s * (1.0 / mass);

        for axis in 0..2 {
            let mut e = CVec2::ZERO;
            e.0[axis] = C64::new(GRADIENT_STEP, 0.0);
            let g = (j(&(star + e)) - j(&(star - e))) / (2.0 * GRADIENT_STEP);
            report.max_stationarity_gradient = report.max_stationarity_gradient.max(g.norm());
        }

        let delta = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let size = delta[0] * delta[0] + delta[1] * delta[1];
        let expected = 0.5 * mass * size;
        let base = j(&star);
        let real_shift = j(&(star + CVec2::real(delta[0], delta[1]))) - base;
        let imag_shift = j(&(star + CVec2::from_parts([0.0, 0.0], delta))) - base;
        if !(real_shift.re > 0.0 && imag_shift.re < 0.0) {
            report.signature_failures += 1;
        }
        let err = ((real_shift - expected).norm()).max((imag_shift + expected).norm()) / expected;
        report.max_quadratic_rel_error = report.max_quadratic_rel_error.max(err);
    }
    report.pass = samples > 0
        && report.signature_failures == 0
        && report.max_stationarity_gradient < SADDLE_STATIONARITY
        && report.max_quadratic_rel_error < SADDLE_QUADRATIC_REL;
    report
}
