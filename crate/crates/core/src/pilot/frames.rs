use crate::cvec::CVec2;
use crate::error::{Error, Result};
use crate::process::VelocitySource;
use crate::schrodinger::{Grid2D, Spectral, SplitStepSolver, Units, WaveFunction};

use super::field::VelocityField;

/// `n_frames + 1` equally spaced times covering `[0, t_end]`.
pub fn uniform_times(t_end: f64, n_frames: usize) -> Vec<f64> {
    (0..=n_frames)
        .map(|k| t_end * k as f64 / n_frames as f64)
        .collect()
}

/// Frames from a closed-form wave function evaluated at `times`.
pub fn analytic_frames<F>(
    grid: Grid2D,
    units: Units,
    times: Vec<f64>,
    mut wave: F,
) -> impl Iterator<Item = Result<VelocityField>>
where
    F: FnMut(f64) -> WaveFunction,
{
    let spectral = Spectral::new(grid);
    times.into_iter().map(move |t| {
        let mut psi = wave(t);
        psi.time = t;
        Ok(VelocityField::new(&psi, &spectral, units))
    })
}

/// Frames produced on the fly by the split-step solver.
///
/// The first frame is the initial wave function; each later frame follows
/// `steps_per_frame` solver steps. After the iterator is exhausted
/// [`SolverFrames::wave`] is the final state.
#[derive(Debug)]
pub struct SolverFrames {
    solver: SplitStepSolver,
    psi: WaveFunction,
    steps_per_frame: usize,
    remaining: usize,
    started: bool,
    failed: bool,
}

impl SolverFrames {
    pub fn new(
        solver: SplitStepSolver,
        psi: WaveFunction,
        steps_per_frame: usize,
        n_frames: usize,
    ) -> Self {
        SolverFrames {
            solver,
            psi,
            steps_per_frame: steps_per_frame.max(1),
            remaining: n_frames + 1,
            started: false,
            failed: false,
        }
    }

    pub fn wave(&self) -> &WaveFunction {
        &self.psi
    }

    pub fn solver(&self) -> &SplitStepSolver {
        &self.solver
    }
}

impl Iterator for SolverFrames {
    type Item = Result<VelocityField>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 || self.failed {
            return None;
        }
        if self.started {
            if let Err(e) = self.solver.evolve(&mut self.psi, self.steps_per_frame) {
                self.failed = true;
                return Some(Err(e));
            }
        }
        self.started = true;
        self.remaining -= 1;
        Some(Ok(VelocityField::new(
            &self.psi,
            &self.solver.spectral,
            self.solver.units,
        )))
    }
}

/// Two consecutive frames of a stream, with linear interpolation in time.
pub struct FrameCursor<I> {
    frames: I,
    prev: VelocityField,
    next: VelocityField,
}

impl<I: Iterator<Item = Result<VelocityField>>> FrameCursor<I> {
    pub fn new(mut frames: I) -> Result<Self> {
        let missing = || Error::Frames("at least two frames are required".into());
        let prev = frames.next().ok_or_else(missing)??;
        let next = frames.next().ok_or_else(missing)??;
        check_order(&prev, &next)?;
        Ok(FrameCursor { frames, prev, next })
    }

    pub fn start(&self) -> f64 {
        self.prev.time
    }

    pub fn end(&self) -> f64 {
        self.next.time
    }

    pub fn grid(&self) -> Grid2D {
        self.prev.grid
    }

    pub fn frames(&self) -> &I {
        &self.frames
    }

    /// Move to the following window. Returns `false` once the stream is exhausted.
    pub fn advance(&mut self) -> Result<bool> {
        match self.frames.next() {
            None => Ok(false),
            Some(frame) => {
                let frame = frame?;
                check_order(&self.next, &frame)?;
                self.prev = std::mem::replace(&mut self.next, frame);
                Ok(true)
            }
        }
    }

    /// Advance until `t` lies in the current window.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let tol = 1e-12 * t.abs().max(1.0);
        while t > self.end() + tol {
            if !self.advance()? {
                return Err(Error::Frames(format!(
                    "t = {t} lies beyond the last frame at {}",
                    self.end()
                )));
            }
        }
        Ok(())
    }

    /// Borrow the current pair of frames.
    pub fn window(&self) -> FrameWindow<'_> {
        FrameWindow {
            prev: &self.prev,
            next: &self.next,
        }
    }

    pub fn complex_velocity(&self, t: f64, x: [f64; 2]) -> Result<CVec2> {
        self.window().complex_velocity(t, x)
    }

    pub fn bohm_velocity(&self, t: f64, x: [f64; 2]) -> Result<[f64; 2]> {
        self.window().bohm_velocity(t, x)
    }
}

/// Two frames bracketing a time interval; shareable across threads.
#[derive(Clone, Copy, Debug)]
pub struct FrameWindow<'a> {
    prev: &'a VelocityField,
    next: &'a VelocityField,
}

impl FrameWindow<'_> {
    pub fn start(&self) -> f64 {
        self.prev.time
    }

    pub fn end(&self) -> f64 {
        self.next.time
    }

    pub fn grid(&self) -> Grid2D {
        self.prev.grid
    }

    fn weight(&self, t: f64) -> Result<f64> {
        let (a, b) = (self.start(), self.end());
        let tol = 1e-12 * (b - a).abs().max(t.abs()).max(1.0);
        if t < a - tol || t > b + tol {
            return Err(Error::Frames(format!(
                "t = {t} outside the window [{a}, {b}]"
            )));
        }
        Ok(((t - a) / (b - a)).clamp(0.0, 1.0))
    }

    pub fn complex_velocity(&self, t: f64, x: [f64; 2]) -> Result<CVec2> {
        let w = self.weight(t)?;
        let s = self.prev.stencil(x, t)?;
        // both frames share the grid; masks may differ
        self.next.stencil(x, t)?;
        Ok(self.prev.apply(&s) * (1.0 - w) + self.next.apply(&s) * w)
    }

    pub fn bohm_velocity(&self, t: f64, x: [f64; 2]) -> Result<[f64; 2]> {
        Ok(self.complex_velocity(t, x)?.re())
    }
}

fn check_order(a: &VelocityField, b: &VelocityField) -> Result<()> {
    if !(b.time > a.time) {
        return Err(Error::Frames(format!(
            "frame times must increase ({} then {})",
            a.time, b.time
        )));
    }
    if a.grid != b.grid {
        return Err(Error::Frames("frames use different grids".into()));
    }
    Ok(())
}

/// The field evaluated at the real part of the gravity center.
impl<I: Iterator<Item = Result<VelocityField>>> VelocitySource for FrameCursor<I> {
    fn sample(&self, t: f64, center: &CVec2) -> Result<CVec2> {
        self.complex_velocity(t, center.re())
    }
}
