//! Plot-ready CSV/JSON writers, the binary frame format and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::cvec::C64;
use crate::error::{Error, Result};
use crate::observables::CycleObservables;
use crate::pilot::Trajectory;
use crate::process::ProcessState;
use crate::schrodinger::{FrameSummary, Grid2D, WaveFunction};

pub const FRAME_MAGIC: &[u8; 4] = b"ZLAB";
pub const FRAME_VERSION: u32 = 1;
const FRAME_HEADER: usize = 4 + 4 + 4 + 8 + 8;

/// 17 significant digits, enough to round-trip any f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut String, values: impl IntoIterator<Item = String>) {
    let cells: Vec<String> = values.into_iter().collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// `n,t,` then real/imaginary parts of both coordinates of every vertex, then the mean.
pub fn process_csv(states: &[ProcessState]) -> String {
    let mut out = String::from("n,t");
    for j in 1..=4 {
        for c in 1..=2 {
            let _ = write!(out, ",re_z{c}_{j},im_z{c}_{j}");
        }
    }
    out.push_str(",re_mean1,im_mean1,re_mean2,im_mean2\n");
    for s in states {
        let mut cells = vec![s.n.to_string(), num(s.t)];
        for z in s.vertices.iter().chain(std::iter::once(&s.mean)) {
            for c in z.0 {
                cells.push(num(c.re));
                cells.push(num(c.im));
            }
        }
        row(&mut out, cells);
    }
    out
}

pub fn observables_csv(rows: &[CycleObservables]) -> String {
    let mut out =
        String::from("q,t_start,sigma_z,sigma_orbital,sigma_intrinsic,delta_x,delta_px,product,len0,len1,len2,len3\n");
    for r in rows {
        let mut cells = vec![
            r.cycle.to_string(),
            num(r.t_start),
            num(r.sigma_z),
            num(r.sigma_orbital),
            num(r.sigma_intrinsic),
            num(r.delta_x),
            num(r.delta_px),
            num(r.heisenberg_product),
        ];
        cells.extend(r.string_lengths.iter().map(|&l| num(l)));
        row(&mut out, cells);
    }
    out
}

pub fn summary_csv(rows: &[FrameSummary]) -> String {
    let mut out = String::from("t,norm,energy,x_mean,y_mean,sigma_x,sigma_y\n");
    for r in rows {
        row(
            &mut out,
            [
                r.t, r.norm, r.energy, r.x_mean, r.y_mean, r.sigma_x, r.sigma_y,
            ]
            .map(num),
        );
    }
    out
}

pub fn trajectory_csv(trajectories: &[Trajectory]) -> String {
    let mut out = String::from("seed_index,t,x,y\n");
    for (i, tr) in trajectories.iter().enumerate() {
        for &(t, [x, y]) in &tr.points {
            row(&mut out, [i.to_string(), num(t), num(x), num(y)]);
        }
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Little-endian frame: magic, version, N, L, t, then `N²` (re, im) pairs in storage order.
pub fn encode_frame(psi: &WaveFunction) -> Vec<u8> {
    let n = psi.grid.n;
    let mut out = Vec::with_capacity(FRAME_HEADER + 16 * n * n);
    out.extend_from_slice(FRAME_MAGIC);
    out.extend_from_slice(&FRAME_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&psi.grid.half_width.to_le_bytes());
    out.extend_from_slice(&psi.time.to_le_bytes());
    for z in &psi.values {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_frame(bytes: &[u8]) -> Result<WaveFunction> {
    let bad = |m: &str| Error::FrameFormat(m.to_string());
    if bytes.len() < FRAME_HEADER {
        return Err(bad("truncated header"));
    }
    if &bytes[0..4] != FRAME_MAGIC {
        return Err(bad("bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != FRAME_VERSION {
        return Err(Error::FrameFormat(format!("unsupported version {version}")));
    }
    let n = u32_at(8) as usize;
    let (l, t) = (f64_at(12), f64_at(20));
    if bytes.len() != FRAME_HEADER + 16 * n * n {
        return Err(bad("payload length does not match N"));
    }
    let grid = Grid2D::new(n, l)?;
    let values = (0..n * n)
        .map(|k| {
            let o = FRAME_HEADER + 16 * k;
            C64::new(f64_at(o), f64_at(o + 8))
        })
        .collect();
    WaveFunction::new(grid, values, t)
}

/// Write `contents` to a sibling temporary file, then rename it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(std::io::Error::other("output path has no file name")))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}
