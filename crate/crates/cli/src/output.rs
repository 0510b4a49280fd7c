use std::fmt::Display;
use std::path::{Path, PathBuf};

use treadmill_core::config::Config;
use treadmill_core::series::{Table, TimeSeries};
use treadmill_core::{Error, Result};

/// Output directory; every artifact written is echoed on stdout.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn text(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.path(name);
        std::fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    pub fn table(&self, name: &str, table: &Table) -> Result<()> {
        self.text(name, &table.to_csv_string())
    }

    pub fn series(&self, name: &str, ts: &TimeSeries) -> Result<()> {
        self.text(name, &ts.to_csv_string())
    }

    pub fn config(&self, name: &str, cfg: &Config) -> Result<()> {
        self.text(name, &cfg.to_string())
    }

    pub fn records(&self, name: &str, records: &Records) -> Result<()> {
        self.text(name, &records.to_csv_string())
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

/// CSV rows with mixed text and numeric cells.
pub struct Records {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Records {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn cell(v: impl Display) -> String {
    v.to_string()
}
