use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::cvec::C64;

use super::grid::Grid2D;
use super::par_sums;

const ROWS_PER_TASK: usize = 16;

/// Square 2D FFT built from row transforms and transposes.
#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Unnormalised forward transform, in place. `scratch` is resized as needed.
    pub fn forward(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        self.transform(&self.forward, data, scratch);
    }

    /// Inverse transform including the `1/n²` factor.
    pub fn inverse(&self, data: &mut [C64], scratch: &mut Vec<C64>) {
        self.transform(&self.inverse, data, scratch);
        let s = 1.0 / (self.n * self.n) as f64;
        data.par_iter_mut().for_each(|z| *z *= s);
    }

    fn transform(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [C64], scratch: &mut Vec<C64>) {
        let n = self.n;
        debug_assert_eq!(data.len(), n * n);
        scratch.resize(n * n, C64::default());
        rows(fft, data, n);
        transpose(data, scratch, n);
        rows(fft, scratch, n);
        transpose(scratch, data, n);
    }
}

fn rows(fft: &Arc<dyn Fft<f64>>, data: &mut [C64], n: usize) {
    data.par_chunks_mut(n * ROWS_PER_TASK)
        .for_each(|chunk| fft.process(chunk));
}

fn transpose(src: &[C64], dst: &mut [C64], n: usize) {
    dst.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for (i, z) in row.iter_mut().enumerate() {
            *z = src[i * n + j];
        }
    });
}

/// Fourier-space derivatives on a [`Grid2D`].
#[derive(Clone, Debug)]
pub struct Spectral {
    pub grid: Grid2D,
    pub fft: Fft2,
    /// Angular wavenumber of each FFT bin.
    pub k: Vec<f64>,
    /// Same with the Nyquist bin zeroed, for odd derivatives.
    k_odd: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: Grid2D) -> Self {
        let n = grid.n;
        let dk = PI / grid.half_width;
        let k: Vec<f64> = (0..n)
            .map(|i| {
                let m = if i < n / 2 {
                    i as f64
                } else {
                    i as f64 - n as f64
                };
                m * dk
            })
            .collect();
        let mut k_odd = k.clone();
        k_odd[n / 2] = 0.0;
        Spectral {
            grid,
            fft: Fft2::new(n),
            k,
            k_odd,
        }
    }

    pub fn k_squared(&self, idx: usize) -> f64 {
        let n = self.grid.n;
        self.k[idx / n].powi(2) + self.k[idx % n].powi(2)
    }

    pub fn forward(&self, values: &[C64]) -> Vec<C64> {
        let mut out = values.to_vec();
        self.fft.forward(&mut out, &mut Vec::new());
        out
    }

    fn inverse_with(&self, spectrum: &[C64], f: impl Fn(usize) -> C64 + Sync) -> Vec<C64> {
        let mut out: Vec<C64> = spectrum
            .par_iter()
            .enumerate()
            .map(|(idx, z)| z * f(idx))
            .collect();
        self.fft.inverse(&mut out, &mut Vec::new());
        out
    }

    /// `(∂x f, ∂y f, Δf)` with one forward and three inverse transforms.
    pub fn gradient_and_laplacian(&self, values: &[C64]) -> ([Vec<C64>; 2], Vec<C64>) {
        let n = self.grid.n;
        let spec = self.forward(values);
        let i = C64::new(0.0, 1.0);
        let gx = self.inverse_with(&spec, |idx| i * self.k_odd[idx / n]);
        let gy = self.inverse_with(&spec, |idx| i * self.k_odd[idx % n]);
        let lap = self.inverse_with(&spec, |idx| C64::new(-self.k_squared(idx), 0.0));
        ([gx, gy], lap)
    }

    pub fn gradient(&self, values: &[C64]) -> [Vec<C64>; 2] {
        let n = self.grid.n;
        let spec = self.forward(values);
        let i = C64::new(0.0, 1.0);
        [
            self.inverse_with(&spec, |idx| i * self.k_odd[idx / n]),
            self.inverse_with(&spec, |idx| i * self.k_odd[idx % n]),
        ]
    }

    pub fn laplacian(&self, values: &[C64]) -> Vec<C64> {
        let spec = self.forward(values);
        self.inverse_with(&spec, |idx| C64::new(-self.k_squared(idx), 0.0))
    }

    /// Whether FFT bin `idx` lies beyond two thirds of the Nyquist wavenumber on either axis.
    pub fn is_high_band(&self, idx: usize) -> bool {
        let n = self.grid.n;
        let cut = 2.0 / 3.0 * self.grid.nyquist();
        self.k[idx / n].abs() > cut || self.k[idx % n].abs() > cut
    }

    /// Fraction of spectral power in the high band.
    pub fn high_band_fraction(&self, spectrum: &[C64]) -> f64 {
        let [high, total] = par_sums(spectrum.len(), |idx| {
            let p = spectrum[idx].norm_sqr();
            [if self.is_high_band(idx) { p } else { 0.0 }, p]
        });
        if total > 0.0 {
            high / total
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let n = 16;
        let fft = Fft2::new(n);
        let orig: Vec<C64> = (0..n * n)
            .map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        let mut scratch = Vec::new();
        fft.forward(&mut data, &mut scratch);
        fft.inverse(&mut data, &mut scratch);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn single_mode_lands_in_its_bin() {
        let g = Grid2D::new(16, std::f64::consts::PI).unwrap();
        let sp = Spectral::new(g);
        // e^{i(2x − 3y)} on [−π, π)²
        let v: Vec<C64> = (0..g.len())
            .map(|k| {
                let [x, y] = g.position(k);
                C64::from_polar(1.0, 2.0 * x - 3.0 * y)
            })
            .collect();
        let spec = sp.forward(&v);
        let peak = spec
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert_eq!(sp.k[peak / 16], 2.0);
        assert_eq!(sp.k[peak % 16], -3.0);
    }

    #[test]
    fn derivatives_of_trig_field() {
        let g = Grid2D::new(32, std::f64::consts::PI).unwrap();
        let sp = Spectral::new(g);
        let v: Vec<C64> = (0..g.len())
            .map(|k| {
                let [x, y] = g.position(k);
                C64::new((3.0 * x).sin() * (2.0 * y).cos(), 0.0)
            })
            .collect();
        let ([gx, gy], lap) = sp.gradient_and_laplacian(&v);
        for k in 0..g.len() {
            let [x, y] = g.position(k);
            assert!((gx[k].re - 3.0 * (3.0 * x).cos() * (2.0 * y).cos()).abs() < 1e-12);
            assert!((gy[k].re + 2.0 * (3.0 * x).sin() * (2.0 * y).sin()).abs() < 1e-12);
            assert!((lap[k].re + 13.0 * v[k].re).abs() < 1e-11);
        }
    }
}
