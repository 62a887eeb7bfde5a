use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::schrodinger::Grid2D;
use crate::tolerances::ENSEMBLE_FAILURE_FRACTION;

use super::field::VelocityField;
use super::frames::FrameCursor;
use super::trajectory::{rk4_step, substeps};

/// Coarse histogram bins per axis.
pub const BINS: usize = 32;

/// Outcome of transporting a sampled ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub tv_distance: f64,
    pub bins: usize,
    pub failures: usize,
    #[serde(skip)]
    pub empirical: Vec<f64>,
    #[serde(skip)]
    pub expected: Vec<f64>,
}

/// Draw `n` points from the discrete density `rho`: a node is chosen by
/// inverse CDF, then the point is spread uniformly over that node's cell.
pub fn sample_density(grid: Grid2D, rho: &[f64], n: usize, seed: u64) -> Result<Vec<[f64; 2]>> {
    if rho.len() != grid.len() {
        return Err(invalid("rho", "length does not match the grid"));
    }
    let mut cdf = Vec::with_capacity(rho.len());
    let mut acc = 0.0;
    for &r in rho {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(invalid("rho", "must be finite and non-negative"));
        }
        acc += r;
        cdf.push(acc);
    }
    if acc <= 0.0 {
        return Err(invalid("rho", "has zero mass"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = grid.spacing();
    let l = grid.half_width;
    let wrap = |x: f64| (x + l).rem_euclid(2.0 * l) - l;
    Ok((0..n)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            let k = cdf.partition_point(|&c| c <= u).min(rho.len() - 1);
            let [x, y] = grid.position(k);
            let dx = rng.random_range(-0.5..0.5) * h;
            let dy = rng.random_range(-0.5..0.5) * h;
            [wrap(x + dx), wrap(y + dy)]
        })
        .collect())
}

fn bin_width(grid: Grid2D) -> Result<usize> {
    if !grid.n.is_multiple_of(BINS) {
        return Err(invalid(
            "grid",
            format!("{} points per axis is not a multiple of {BINS}", grid.n),
        ));
    }
    Ok(grid.n / BINS)
}

/// Index of the coarse bin containing `x`; bins are unions of node cells.
fn bin_of(grid: Grid2D, width: usize, x: [f64; 2]) -> usize {
    let h = grid.spacing();
    let b =
        |c: f64| (((c + grid.half_width + 0.5 * h) / (width as f64 * h)).floor() as usize) % BINS;
    b(x[0]) * BINS + b(x[1])
}

/// Normalised `BINS × BINS` histogram of points.
pub fn bin_positions(grid: Grid2D, points: &[[f64; 2]]) -> Result<Vec<f64>> {
    let width = bin_width(grid)?;
    let mut hist = vec![0.0; BINS * BINS];
    for &p in points {
        hist[bin_of(grid, width, p)] += 1.0;
    }
    let total = points.len().max(1) as f64;
    hist.iter_mut().for_each(|v| *v /= total);
    Ok(hist)
}

/// Normalised `BINS × BINS` coarse-graining of a nodal density.
pub fn bin_density(grid: Grid2D, rho: &[f64]) -> Result<Vec<f64>> {
    let width = bin_width(grid)?;
    let mut hist = vec![0.0; BINS * BINS];
    for (k, &r) in rho.iter().enumerate() {
        let (i, j) = (k / grid.n, k % grid.n);
        hist[(i / width) * BINS + j / width] += r;
    }
    let total: f64 = hist.iter().sum();
    hist.iter_mut().for_each(|v| *v /= total);
    Ok(hist)
}

/// `½ Σ |p − q|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Sample `n` points from `rho0`, transport them through every frame window
/// and compare their histogram with `final_density`, evaluated once the stream
/// is exhausted.
pub fn ensemble_equivariance<I, F>(
    frames: I,
    rho0: &[f64],
    n: usize,
    seed: u64,
    dt: f64,
    final_density: F,
) -> Result<EnsembleReport>
where
    I: Iterator<Item = Result<VelocityField>>,
    F: FnOnce(&I, f64) -> Vec<f64>,
{
    if n == 0 {
        return Err(invalid("n", "must be > 0"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be finite and > 0"));
    }
    let mut cursor = FrameCursor::new(frames)?;
    let grid = cursor.grid();
    let mut particles: Vec<Option<[f64; 2]>> = sample_density(grid, rho0, n, seed)?
        .into_iter()
        .map(Some)
        .collect();
    loop {
        let (a, b) = (cursor.start(), cursor.end());
        let (steps, h) = substeps(b - a, dt);
        let c = cursor.window();
        particles.par_iter_mut().for_each(|p| {
            if let Some(mut x) = *p {
                for k in 0..steps {
                    match rk4_step(&c, a + k as f64 * h, x, h) {
                        Ok(next) => x = next,
                        Err(_) => {
                            *p = None;
                            return;
                        }
                    }
                }
                *p = Some(x);
            }
        });
        if !cursor.advance()? {
            break;
        }
    }
    let t_end = cursor.end();
    let survivors: Vec<[f64; 2]> = particles.iter().flatten().copied().collect();
    let failures = n - survivors.len();
    if failures as f64 > ENSEMBLE_FAILURE_FRACTION * n as f64 {
        return Err(Error::EnsembleFailures {
            failed: failures,
            total: n,
        });
    }
    let empirical = bin_positions(grid, &survivors)?;
    let expected = bin_density(grid, &final_density(cursor.frames(), t_end))?;
    Ok(EnsembleReport {
        n,
        seed,
        t_end,
        tv_distance: tv_distance(&empirical, &expected),
        bins: BINS,
        failures,
        empirical,
        expected,
    })
}
