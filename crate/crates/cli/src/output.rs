use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::failure::{Failure, Outcome};

/// Destination directory for one run.
pub struct OutDir {
    root: PathBuf,
}

/// Full double precision: 17 significant digits.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl OutDir {
    pub fn create(root: &Path) -> Outcome<Self> {
        fs::create_dir_all(root).map_err(|e| Failure::output(root, e))?;
        Ok(OutDir {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// CSV with a header; `None` cells are left empty.
    pub fn csv(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<Option<f64>>>) -> Outcome<()> {
        let path = self.path(name);
        let err = |e: csv::Error| Failure::output(&path, e);
        let mut w = csv::Writer::from_path(&path).map_err(err)?;
        w.write_record(header).map_err(err)?;
        for row in rows {
            w.write_record(row.iter().map(|c| c.map(number).unwrap_or_default()))
                .map_err(err)?;
        }
        w.flush().map_err(|e| Failure::output(&path, e))
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Outcome<()> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::output(&path, e))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Failure::output(&path, e))
    }
}
