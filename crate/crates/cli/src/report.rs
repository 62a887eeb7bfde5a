use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use zitterlab_core::io::{to_json, write_atomic};

/// One acceptance check of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `value < limit`.
    pub fn below(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: value < limit,
            value,
            limit,
            detail: detail.into(),
        }
    }

    /// Passes when `value ≤ limit`.
    pub fn at_most(name: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Check {
            pass: value <= limit,
            ..Check::below(name, value, limit, detail)
        }
    }

    /// A check whose verdict comes from elsewhere (a rate report, say).
    pub fn verdict(
        name: &str,
        pass: bool,
        value: f64,
        limit: f64,
        detail: impl Into<String>,
    ) -> Self {
        Check {
            pass,
            ..Check::below(name, value, limit, detail)
        }
    }
}

/// Output directory; every file is written once, atomically.
pub struct Sink {
    dir: PathBuf,
    written: Vec<String>,
}

impl Sink {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn bytes(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn text(&mut self, name: &str, contents: &str) -> Result<()> {
        self.bytes(name, contents.as_bytes())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let s = to_json(value)?;
        self.text(name, &s)
    }
}

/// CSV with a header row and `{:.16e}` floats.
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            out: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[Cell<'_>]) {
        for (k, c) in cells.iter().enumerate() {
            if k > 0 {
                self.out.push(',');
            }
            match c {
                Cell::F(v) => write!(self.out, "{v:.16e}").unwrap(),
                Cell::U(v) => write!(self.out, "{v}").unwrap(),
                Cell::S(v) => self.out.push_str(v),
            }
        }
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub enum Cell<'a> {
    F(f64),
    U(u64),
    S(&'a str),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["a", "b", "c"]);
        c.row(&[Cell::S("x"), Cell::U(3), Cell::F(0.5)]);
        assert_eq!(c.finish(), "a,b,c\nx,3,5.0000000000000000e-1\n");
    }

    #[test]
    fn check_bounds() {
        assert!(!Check::below("x", 1.0, 1.0, "").pass);
        assert!(Check::at_most("x", 1.0, 1.0, "").pass);
        assert!(!Check::below("x", f64::NAN, 1.0, "").pass);
    }
}
