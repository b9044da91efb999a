//! Dataset directories: a JSON manifest plus one CSV file per curve.
//!
//! ```text
//! dataset/
//!   manifest.json   {"name", "n", "T", "labels", "curves", "meta"}
//!   curves/0000.csv T lines of n comma-separated decimals
//! ```
//!
//! Values are written with the shortest representation that parses back to
//! the same `f64`, so a save/load round trip is bit-exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::clustering::Labels;
use crate::curve::Curve;
use crate::datagen::Dataset;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
const CURVE_DIR: &str = "curves";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    name: String,
    n: usize,
    #[serde(rename = "T")]
    t: usize,
    labels: Vec<i64>,
    curves: Vec<String>,
    #[serde(default)]
    meta: BTreeMap<String, Value>,
}

/// Resolves a dataset directory or a manifest path to the manifest path.
pub fn manifest_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

/// Writes `ds` into directory `dir`, creating it if needed. Truth labels
/// are stored one-based.
pub fn save_dataset(ds: &Dataset, dir: &Path) -> Result<()> {
    ds.validate()?;
    let curve_dir = dir.join(CURVE_DIR);
    fs::create_dir_all(&curve_dir).map_err(|e| Error::io(&curve_dir, e))?;
    let width = ds.len().saturating_sub(1).to_string().len().max(4);
    let mut names = Vec::with_capacity(ds.len());
    for (i, c) in ds.curves.iter().enumerate() {
        let rel = format!("{CURVE_DIR}/{i:0width$}.csv");
        let path = dir.join(&rel);
        fs::write(&path, curve_to_csv(c)).map_err(|e| Error::io(&path, e))?;
        names.push(rel);
    }
    let manifest = Manifest {
        name: ds.name.clone(),
        n: ds.dim(),
        t: ds.samples(),
        labels: ds.truth.to_one_based(),
        curves: names,
        meta: ds.meta.clone(),
    };
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Json {
        path: path.clone(),
        source: e,
    })?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Reads a dataset from a directory or from its manifest file.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let mpath = manifest_path(path);
    let text = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
    if text.trim().is_empty() {
        return Err(Error::Parse {
            path: mpath,
            line: 1,
            msg: "empty manifest".into(),
        });
    }
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: mpath.clone(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    if manifest.curves.is_empty() {
        return Err(Error::Dataset(format!("{}: no curves listed", mpath.display())));
    }
    if manifest.labels.len() != manifest.curves.len() {
        return Err(Error::Dataset(format!(
            "{}: {} labels for {} curves",
            mpath.display(),
            manifest.labels.len(),
            manifest.curves.len()
        )));
    }
    if manifest.n == 0 {
        return Err(Error::Dataset(format!("{}: n must be positive", mpath.display())));
    }
    let root = mpath.parent().unwrap_or(Path::new("."));
    let curves = manifest
        .curves
        .iter()
        .map(|rel| {
            let cpath = root.join(rel);
            let text = fs::read_to_string(&cpath).map_err(|e| Error::io(&cpath, e))?;
            parse_curve(&text, &cpath, manifest.t, manifest.n)
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(
        manifest.name,
        curves,
        Labels::from_ids(&manifest.labels),
        manifest.meta,
    )
}

fn curve_to_csv(c: &Curve) -> String {
    let s = c.samples();
    let mut out = String::with_capacity(c.len() * c.dim() * 20);
    for k in 0..c.len() {
        for d in 0..c.dim() {
            if d > 0 {
                out.push(',');
            }
            write!(out, "{}", s[(k, d)]).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

/// Parses a curve CSV with exactly `len` rows of `dim` finite values.
pub fn parse_curve(text: &str, path: &Path, len: usize, dim: usize) -> Result<Curve> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let lines: Vec<&str> = text.lines().collect();
    if lines.is_empty() {
        return Err(err(1, "empty curve file".into()));
    }
    if lines.len() != len {
        return Err(err(
            lines.len().min(len) + 1,
            format!("expected {len} rows, found {}", lines.len()),
        ));
    }
    let mut m = DMatrix::zeros(len, dim);
    for (k, line) in lines.iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim {
            return Err(err(
                k + 1,
                format!("expected {dim} values, found {}", fields.len()),
            ));
        }
        for (d, field) in fields.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| err(k + 1, format!("not a number: {:?}", field.trim())))?;
            if !v.is_finite() {
                return Err(err(k + 1, format!("non-finite value {v}")));
            }
            m[(k, d)] = v;
        }
    }
    Curve::new(m).map_err(|e| err(1, e.to_string()))
}

/// Writes one-based labels as a JSON array.
pub fn write_labels(labels: &Labels, path: &Path) -> Result<()> {
    let text = serde_json::to_string(&labels.to_one_based()).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Reads a JSON array of integer labels.
pub fn read_labels(path: &Path) -> Result<Labels> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ids: Vec<i64> = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    Ok(Labels::from_ids(&ids))
}
