//! Output files: atomic writes, JSONL sample sets and the run manifest.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use bigibbs::TwoComponentConfiguration;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Writes `bytes` to a temporary file next to `path`, then renames it over
/// `path`, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path
        .file_name()
        .map_or_else(|| "output".into(), |n| n.to_string_lossy().into_owned());
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("json value serializes");
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn jsonl_bytes(samples: &[TwoComponentConfiguration]) -> Vec<u8> {
    let mut out = Vec::new();
    for s in samples {
        serde_json::to_writer(&mut out, s).expect("configuration serializes");
        out.push(b'\n');
    }
    out
}

/// Reads one configuration per non-empty line, checking the dimension.
pub fn read_samples(
    path: &Path,
    dimension: usize,
) -> Result<Vec<TwoComponentConfiguration>, CliError> {
    let file = fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |line: usize, message: String| CliError::Samples {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut samples = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let g: TwoComponentConfiguration =
            serde_json::from_str(&line).map_err(|e| bad(i + 1, e.to_string()))?;
        if let Some(p) = g
            .plus
            .iter()
            .chain(g.minus.iter())
            .find(|p| p.dim() != dimension)
        {
            return Err(bad(
                i + 1,
                format!(
                    "point of dimension {} in a {dimension}-dimensional config",
                    p.dim()
                ),
            ));
        }
        samples.push(g);
    }
    if samples.is_empty() {
        return Err(bad(0, "no samples".into()));
    }
    Ok(samples)
}

/// `samples.jsonl` → `samples.<suffix>`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "output".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: PathBuf,
    pub kind: String,
}

/// Record of one invocation, written last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub seed: u64,
    pub config: Value,
    pub wall_clock_seconds: f64,
    pub exit_code: u8,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_json(
            path,
            &serde_json::to_value(self).expect("manifest serializes"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bigibbs::{Configuration, Point};

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let g = TwoComponentConfiguration::new(
            Configuration::from_points(vec![Point::from_array([0.1, 0.2])]).unwrap(),
            Configuration::empty(),
        )
        .unwrap();
        let samples = vec![g, TwoComponentConfiguration::empty()];
        write_atomic(&path, &jsonl_bytes(&samples)).unwrap();
        assert_eq!(read_samples(&path, 2).unwrap(), samples);
        assert!(matches!(
            read_samples(&path, 3),
            Err(CliError::Samples { line: 1, .. })
        ));
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            r#"{"plus":[[0.1,0.2]],"minus":[]}"#
        );
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(
            sidecar(Path::new("a/b.jsonl"), "stats.json"),
            Path::new("a/b.stats.json")
        );
        assert_eq!(
            sidecar(Path::new("out"), "manifest.json"),
            Path::new("out.manifest.json")
        );
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/r.json");
        write_json(&path, &serde_json::json!({"a": 1})).unwrap();
        let names: Vec<_> = fs::read_dir(path.parent().unwrap())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(names, vec![std::ffi::OsString::from("r.json")]);
    }
}
