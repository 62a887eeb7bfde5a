use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cvec::C64;
use crate::error::{invalid, Result};
use crate::schrodinger::{
    harmonic_ground_state, FreeGaussian, Grid2D, Potential, Spectral, Units, WaveFunction,
};
use crate::tolerances::{HJ_TIME_ORDER_TOL, RHO_FLOOR};

use super::rates::{RateReport, RateSample, RateTarget};

/// Central difference used for `∂𝒮/∂t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeStencil {
    /// `−iħ Log(Ψ₊₁/Ψ₋₁) / 2dt`, second order.
    ThreePoint,
    /// `−iħ [8 Log(Ψ₊₁/Ψ₋₁) − Log(Ψ₊₂/Ψ₋₂)] / 12dt`, fourth order.
    FivePoint,
}

impl TimeStencil {
    pub fn frames(self) -> usize {
        match self {
            TimeStencil::ThreePoint => 3,
            TimeStencil::FivePoint => 5,
        }
    }

    pub fn order(self) -> f64 {
        match self {
            TimeStencil::ThreePoint => 2.0,
            TimeStencil::FivePoint => 4.0,
        }
    }
}

/// Residual statistics over the unmasked nodes of the middle frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HjStats {
    pub linf: f64,
    /// `sqrt(Σ |R|² h²)`.
    pub l2: f64,
    pub mean: [f64; 2],
    /// `max |R − mean R|`.
    pub centered_linf: f64,
    pub unmasked: usize,
}

/// Residual of `∂𝒮/∂t + (∇𝒮)²/2m + V − i(ħ/2m)Δ𝒮` on the real slice, with
/// `𝒮 = −iħ log Ψ` entering only through `∇Ψ/Ψ`, `ΔΨ/Ψ` and ratios of
/// successive frames. `frames` are equally spaced in time; the residual is
/// evaluated at the middle one.
pub fn complex_hj_residual(
    frames: &[WaveFunction],
    potential: &Potential,
    units: Units,
    stencil: TimeStencil,
) -> Result<HjStats> {
    if frames.len() != stencil.frames() {
        return Err(invalid(
            "frames",
            format!(
                "{} frames given, the stencil uses {}",
                frames.len(),
                stencil.frames()
            ),
        ));
    }
    let grid = frames[0].grid;
    if frames.iter().any(|f| f.grid != grid) {
        return Err(invalid("frames", "grids differ"));
    }
    let dt = frames[1].time - frames[0].time;
    if !(dt > 0.0)
        || frames
            .windows(2)
            .any(|w| ((w[1].time - w[0].time) - dt).abs() > 1e-9 * dt)
    {
        return Err(invalid(
            "frames",
            "times must be equally spaced and increasing",
        ));
    }
    let mid = frames.len() / 2;
    let psi = &frames[mid];
    let v = potential.sample(&grid, units)?;
    let spectral = Spectral::new(grid);
    let ([gx, gy], lap) = spectral.gradient_and_laplacian(&psi.values);
    let rho_max = psi.values.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let cut = RHO_FLOOR * rho_max;
    let (hbar, mass) = (units.hbar, units.mass);
    let minus_i_hbar = C64::new(0.0, -hbar);
    let diffusion = C64::new(0.0, -hbar / (2.0 * mass));
    let log_ratio =
        |k: usize, d: usize| (frames[mid + d].values[k] / frames[mid - d].values[k]).ln();

    let residual: Vec<Option<C64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let p = psi.values[k];
            if p.norm_sqr() < cut || p.norm_sqr() == 0.0 {
                return None;
            }
            let g = [gx[k] / p, gy[k] / p];
            let grad_s = [minus_i_hbar * g[0], minus_i_hbar * g[1]];
            let lap_s = minus_i_hbar * (lap[k] / p - g[0] * g[0] - g[1] * g[1]);
            let dt_s = minus_i_hbar
                * match stencil {
                    TimeStencil::ThreePoint => log_ratio(k, 1) / (2.0 * dt),
                    TimeStencil::FivePoint => {
                        (log_ratio(k, 1) * 8.0 - log_ratio(k, 2)) / (12.0 * dt)
                    }
                };
            let kinetic = (grad_s[0] * grad_s[0] + grad_s[1] * grad_s[1]) / (2.0 * mass);
            Some(dt_s + kinetic + v[k] + diffusion * lap_s)
        })
        .collect();

    let live: Vec<C64> = residual.into_iter().flatten().collect();
    if live.is_empty() {
        return Err(invalid("frames", "every node is masked"));
    }
    let n = live.len() as f64;
    let mean = live.iter().sum::<C64>() / n;
    let linf = live.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let centered_linf = live.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max);
    let l2 = (live.iter().map(|r| r.norm_sqr()).sum::<f64>() * grid.cell_area()).sqrt();
    Ok(HjStats {
        linf,
        l2,
        mean: [mean.re, mean.im],
        centered_linf,
        unmasked: live.len(),
    })
}

fn stencil_times(t_center: f64, dt: f64, stencil: TimeStencil) -> Vec<f64> {
    let half = (stencil.frames() / 2) as isize;
    (-half..=half).map(|k| t_center + k as f64 * dt).collect()
}

/// Residual on exact frames of a freely spreading packet.
pub fn free_gaussian_residual(
    packet: &FreeGaussian,
    grid: Grid2D,
    t_center: f64,
    dt: f64,
    stencil: TimeStencil,
) -> Result<HjStats> {
    let frames: Vec<WaveFunction> = stencil_times(t_center, dt, stencil)
        .into_iter()
        .map(|t| packet.on_grid(grid, t))
        .collect();
    complex_hj_residual(&frames, &Potential::Free, packet.units, stencil)
}

/// Residual on exact frames of the harmonic ground state.
pub fn ground_state_residual(
    grid: Grid2D,
    omega: [f64; 2],
    units: Units,
    t_center: f64,
    dt: f64,
    stencil: TimeStencil,
) -> Result<HjStats> {
    let frames: Vec<WaveFunction> = stencil_times(t_center, dt, stencil)
        .into_iter()
        .map(|t| harmonic_ground_state(grid, omega, units, t))
        .collect();
    complex_hj_residual(&frames, &Potential::Harmonic { omega }, units, stencil)
}

/// Time-step refinement: the residual must fall at the stencil's order.
pub fn hj_dt_study(
    packet: &FreeGaussian,
    grid: Grid2D,
    t_center: f64,
    dts: &[f64],
    stencil: TimeStencil,
) -> Result<RateReport> {
    let samples = dts
        .iter()
        .map(|&dt| {
            Ok(RateSample {
                eps_or_n: dt,
                error: free_gaussian_residual(packet, grid, t_center, dt, stencil)?.linf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let parameters = json!({
        "stencil": stencil,
        "N": grid.n,
        "L": grid.half_width,
        "t": t_center,
        "sigma0": packet.sigma0,
    });
    let target = RateTarget::Band {
        center: stencil.order(),
        tolerance: HJ_TIME_ORDER_TOL,
    };
    match stencil {
        TimeStencil::ThreePoint => RateReport::new("hj_dt_refinement", parameters, samples, target),
        // roundoff caps the fourth-order sweep well before two decades
        TimeStencil::FivePoint => {
            RateReport::short("hj_dt_refinement", parameters, samples, target)
        }
    }
}

/// Grid refinement on a fixed box: the residual must fall monotonically.
pub fn hj_grid_study(
    packet: &FreeGaussian,
    half_width: f64,
    ns: &[usize],
    t_center: f64,
    dt: f64,
    stencil: TimeStencil,
) -> Result<RateReport> {
    let samples = ns
        .iter()
        .map(|&n| {
            let grid = Grid2D::new(n, half_width)?;
            Ok(RateSample {
                eps_or_n: n as f64,
                error: free_gaussian_residual(packet, grid, t_center, dt, stencil)?.linf,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RateReport::short(
        "hj_grid_refinement",
        json!({ "stencil": stencil, "L": half_width, "dt": dt, "t": t_center }),
        samples,
        RateTarget::Decreasing,
    )
}
