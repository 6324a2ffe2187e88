//! File formats: image CSVs with JSON sidecars, WECT JSON, vectorized WECT
//! CSVs, dataset directories, curve tables, result ledgers and distance
//! matrices. CSVs use `.` decimals, `,` separators and `\n` line endings.

use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::ExperimentResult;
use crate::dataset::{Dataset, Manifest};
use crate::error::{Result, WectError};
use crate::grid::Image;
use crate::wect::{VectorizedWect, Wect};

fn parse_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> WectError {
    WectError::Parse(format!("{}:{}: {msg}", path.display(), line + 1))
}

fn join(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        write!(s, "{v}").expect("writing to a String");
    }
    s
}

/// Numeric CSV without a header.
pub fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            line.split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| parse_err(path, i, format!("`{}`: {e}", f.trim())))
                })
                .collect()
        })
        .collect()
}

pub fn write_matrix_csv(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    for row in rows {
        out.push_str(&join(row));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_image_csv(path: &Path) -> Result<Image> {
    let rows = read_matrix_csv(path)?;
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(parse_err(path, i, format!("expected {n} columns, found {}", r.len())));
    }
    Image::new(n, rows.into_iter().flatten().collect())
}

pub fn write_image_csv(path: &Path, image: &Image) -> Result<()> {
    let rows: Vec<Vec<f64>> = image.pixels().chunks(image.n()).map(<[f64]>::to_vec).collect();
    write_matrix_csv(path, &rows)
}

/// Optional provenance stored next to an image CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageMeta {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<String>,
}

/// `img.csv` -> `img.json`.
pub fn sidecar_path(image_path: &Path) -> PathBuf {
    image_path.with_extension("json")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| WectError::Parse(format!("{}: {e}", path.display())))
}

/// Reads an image and its sidecar if present; the sidecar's `n` must agree.
pub fn read_image_with_meta(path: &Path) -> Result<(Image, Option<ImageMeta>)> {
    let image = read_image_csv(path)?;
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok((image, None));
    }
    let meta: ImageMeta = read_json(&side)?;
    if meta.n != image.n() {
        return Err(WectError::Mismatch(format!(
            "{} declares n = {} but the image is {}x{}",
            side.display(),
            meta.n,
            image.n(),
            image.n()
        )));
    }
    Ok((image, Some(meta)))
}

pub fn write_wect_json(path: &Path, wect: &Wect) -> Result<()> {
    write_json(path, wect)
}

pub fn read_wect_json(path: &Path) -> Result<Wect> {
    let w: Wect = read_json(path)?;
    Wect::new(w.directions.clone(), w.curves.clone())?;
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VectorHeader {
    pub n_s: usize,
    pub n_v: usize,
    pub t_min: f64,
    pub t_max: f64,
}

/// One CSV row per direction plus a JSON header.
pub fn write_vectorized(csv_path: &Path, header_path: &Path, v: &VectorizedWect) -> Result<()> {
    let rows: Vec<Vec<f64>> = v.rows().map(<[f64]>::to_vec).collect();
    write_matrix_csv(csv_path, &rows)?;
    write_json(
        header_path,
        &VectorHeader {
            n_s: v.n_s,
            n_v: v.n_v,
            t_min: v.t_min,
            t_max: v.t_max,
        },
    )
}

pub fn read_vectorized(csv_path: &Path, header_path: &Path) -> Result<VectorizedWect> {
    let h: VectorHeader = read_json(header_path)?;
    let rows = read_matrix_csv(csv_path)?;
    if rows.len() != h.n_s || rows.iter().any(|r| r.len() != h.n_v) {
        return Err(WectError::Mismatch(format!(
            "{} is not {} x {}",
            csv_path.display(),
            h.n_s,
            h.n_v
        )));
    }
    Ok(VectorizedWect {
        n_s: h.n_s,
        n_v: h.n_v,
        t_min: h.t_min,
        t_max: h.t_max,
        values: rows.into_iter().flatten().collect(),
    })
}

pub const MANIFEST: &str = "manifest.json";

/// Writes every image as CSV plus `manifest.json` into `dir`.
pub fn write_dataset(dir: &Path, dataset: &Dataset) -> Result<()> {
    fs::create_dir_all(dir)?;
    dataset
        .manifest
        .entries
        .par_iter()
        .map(|e| write_image_csv(&dir.join(&e.file), &dataset.images[e.index]))
        .collect::<Result<()>>()?;
    write_json(&dir.join(MANIFEST), &dataset.manifest)
}

pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let manifest: Manifest = read_json(&dir.join(MANIFEST))?;
    let images = manifest
        .entries
        .par_iter()
        .map(|e| read_image_csv(&dir.join(&e.file)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { images, manifest })
}

/// Threshold-indexed curve table; absent columns are left empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveTable {
    pub thresholds: Vec<f64>,
    pub mean: Option<Vec<f64>>,
    pub std: Option<Vec<f64>>,
    pub expected: Option<Vec<f64>>,
}

pub fn write_curve_csv(path: &Path, table: &CurveTable) -> Result<()> {
    let cell = |col: &Option<Vec<f64>>, i: usize| col.as_ref().map(|c| c[i].to_string()).unwrap_or_default();
    let mut out = String::from("threshold,mean,std,expected\n");
    for (i, t) in table.thresholds.iter().enumerate() {
        writeln!(
            out,
            "{t},{},{},{}",
            cell(&table.mean, i),
            cell(&table.std, i),
            cell(&table.expected, i)
        )
        .expect("writing to a String");
    }
    fs::write(path, out)?;
    Ok(())
}

pub const RESULTS_HEADER: &str = "spec_hash,seed,accuracy,correct,total,label";

/// Appends results to a CSV ledger, writing the header if the file is new.
pub fn append_results_csv(path: &Path, results: &[ExperimentResult]) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut out = String::new();
    if fresh {
        out.push_str(RESULTS_HEADER);
        out.push('\n');
    }
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},\"{}\"",
            r.spec_hash,
            r.seed,
            r.accuracy,
            r.correct,
            r.total,
            r.label.replace('"', "\"\"")
        )
        .expect("writing to a String");
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

pub fn write_distance_matrix(path: &Path, matrix: &[Vec<f64>]) -> Result<()> {
    write_matrix_csv(path, matrix)
}
