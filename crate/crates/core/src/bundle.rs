//! On-disk network bundles: a JSON manifest plus raw little-endian `f64`
//! payloads (row-major), stored in a sidecar file or inline as base64.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{frobenius_norm, DenseMatrix};
use crate::network::{LayerSpec, NetworkSpec};
use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("layer {layer}: payload is {found_rows}x{found_cols}, layer expects {rows}x{cols}")]
    ShapeMismatch {
        layer: usize,
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },

    #[error("layer {layer}: non-finite weight at ({row}, {col})")]
    NonFiniteWeight { layer: usize, row: usize, col: usize },

    #[error("layer {layer}: {message}")]
    Payload { layer: usize, message: String },

    #[error("invalid network: {0}")]
    Invalid(String),
}

pub type BundleResult<T> = std::result::Result<T, BundleError>;

/// A network description with one weight matrix per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct NetBundle {
    pub spec: NetworkSpec,
    pub weights: Vec<DenseMatrix>,
}

impl NetBundle {
    /// Checks the spec and every weight shape.
    pub fn new(spec: NetworkSpec, weights: Vec<DenseMatrix>) -> BundleResult<Self> {
        check_spec(&spec)?;
        if weights.len() != spec.depth() {
            return Err(BundleError::Invalid(format!(
                "{} payloads for {} layers",
                weights.len(),
                spec.depth()
            )));
        }
        for (i, (layer, w)) in spec.layers.iter().zip(&weights).enumerate() {
            check_shape(i + 1, layer, w.rows(), w.cols())?;
        }
        Ok(Self { spec, weights })
    }
}

fn check_spec(spec: &NetworkSpec) -> BundleResult<()> {
    let v = spec.validate();
    if v.is_empty() {
        Ok(())
    } else {
        let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
        Err(BundleError::Invalid(msg.join("; ")))
    }
}

fn check_shape(layer: usize, spec: &LayerSpec, rows: usize, cols: usize) -> BundleResult<()> {
    let (er, ec) = spec
        .weight_shape()
        .map_err(|e| BundleError::Invalid(format!("layer {layer}: {e}")))?;
    if (er, ec) != (rows, cols) {
        return Err(BundleError::ShapeMismatch {
            layer,
            rows: er,
            cols: ec,
            found_rows: rows,
            found_cols: cols,
        });
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    input_dim: usize,
    layers: Vec<LayerSpec>,
    weights: Vec<WeightRef>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offset: Option<u64>,
    rows: usize,
    cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inline: Option<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BundleError + '_ {
    move |source| BundleError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn decode(layer: usize, bytes: &[u8], rows: usize, cols: usize) -> BundleResult<DenseMatrix> {
    let mut data = Vec::with_capacity(rows * cols);
    for (pos, chunk) in bytes.chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().expect("chunks_exact yields 8 bytes"));
        if !v.is_finite() {
            return Err(BundleError::NonFiniteWeight {
                layer,
                row: pos / cols,
                col: pos % cols,
            });
        }
        data.push(v);
    }
    DenseMatrix::new(rows, cols, data).map_err(|e| BundleError::Payload {
        layer,
        message: e.to_string(),
    })
}

fn encode(w: &DenseMatrix, out: &mut Vec<u8>) {
    for v in w.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Reads a manifest and its payloads. Sidecar paths resolve relative to the
/// manifest's directory.
pub fn load_bundle(path: impl AsRef<Path>) -> BundleResult<NetBundle> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| BundleError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let spec = NetworkSpec::new(manifest.input_dim, manifest.layers);
    check_spec(&spec)?;
    if manifest.weights.len() != spec.depth() {
        return Err(BundleError::Invalid(format!(
            "{} payloads for {} layers",
            manifest.weights.len(),
            spec.depth()
        )));
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut files: HashMap<String, Vec<u8>> = HashMap::new();
    let mut weights = Vec::with_capacity(spec.depth());
    for (i, (layer, wref)) in spec.layers.iter().zip(&manifest.weights).enumerate() {
        let idx = i + 1;
        check_shape(idx, layer, wref.rows, wref.cols)?;
        let len = wref.rows * wref.cols * 8;
        let payload_err = |message: String| BundleError::Payload { layer: idx, message };
        let bytes: Vec<u8> = match (&wref.file, &wref.inline) {
            (Some(_), Some(_)) => return Err(payload_err("both file and inline given".into())),
            (None, None) => return Err(payload_err("no payload given".into())),
            (None, Some(b64)) => {
                if wref.offset.is_some() {
                    return Err(payload_err("offset applies to file payloads only".into()));
                }
                let raw = BASE64
                    .decode(b64.as_bytes())
                    .map_err(|e| payload_err(format!("bad base64: {e}")))?;
                if raw.len() != len {
                    return Err(payload_err(format!(
                        "inline payload has {} bytes, expected {}",
                        raw.len(),
                        len
                    )));
                }
                raw
            }
            (Some(file), None) => {
                if !files.contains_key(file) {
                    let p = base.join(file);
                    let data = fs::read(&p).map_err(io_err(&p))?;
                    files.insert(file.clone(), data);
                }
                let data = &files[file];
                let start = wref.offset.unwrap_or(0) as usize;
                let end = start.checked_add(len).filter(|&e| e <= data.len()).ok_or_else(|| {
                    payload_err(format!(
                        "bytes {}..{} exceed {} ({} bytes)",
                        start,
                        start + len,
                        file,
                        data.len()
                    ))
                })?;
                data[start..end].to_vec()
            }
        };
        weights.push(decode(idx, &bytes, wref.rows, wref.cols)?);
    }
    Ok(NetBundle { spec, weights })
}

fn write_manifest(path: &Path, manifest: &Manifest) -> BundleResult<()> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serialises");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn check_saveable(bundle: &NetBundle) -> BundleResult<()> {
    if bundle.spec.layers.is_empty() {
        return Err(BundleError::Invalid("refusing to save a bundle without layers".into()));
    }
    NetBundle::new(bundle.spec.clone(), bundle.weights.clone()).map(|_| ())
}

/// Writes `path` (manifest) and `<stem>.bin` beside it holding every payload
/// back to back.
pub fn save_bundle(bundle: &NetBundle, path: impl AsRef<Path>) -> BundleResult<()> {
    check_saveable(bundle)?;
    let path = path.as_ref();
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "weights".into());
    let bin_name = format!("{stem}.bin");
    let bin_path = path.with_file_name(&bin_name);

    let mut blob = Vec::new();
    let mut refs = Vec::with_capacity(bundle.weights.len());
    for w in &bundle.weights {
        refs.push(WeightRef {
            file: Some(bin_name.clone()),
            offset: Some(blob.len() as u64),
            rows: w.rows(),
            cols: w.cols(),
            inline: None,
        });
        encode(w, &mut blob);
    }
    fs::write(&bin_path, &blob).map_err(io_err(&bin_path))?;
    write_manifest(
        path,
        &Manifest {
            input_dim: bundle.spec.input_dim,
            layers: bundle.spec.layers.clone(),
            weights: refs,
        },
    )
}

/// Writes a single self-contained manifest with base64 payloads.
pub fn save_bundle_inline(bundle: &NetBundle, path: impl AsRef<Path>) -> BundleResult<()> {
    check_saveable(bundle)?;
    let refs = bundle
        .weights
        .iter()
        .map(|w| {
            let mut raw = Vec::with_capacity(w.data().len() * 8);
            encode(w, &mut raw);
            WeightRef {
                file: None,
                offset: None,
                rows: w.rows(),
                cols: w.cols(),
                inline: Some(BASE64.encode(raw)),
            }
        })
        .collect();
    write_manifest(
        path.as_ref(),
        &Manifest {
            input_dim: bundle.spec.input_dim,
            layers: bundle.spec.layers.clone(),
            weights: refs,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleMode {
    /// Standard normal entries rescaled so each layer has `‖W‖_F = 1`.
    UnitFrobenius,
    /// Normal entries with the given standard deviation.
    Gaussian(f64),
}

/// Seeded Gaussian weights for every layer, drawn layer by layer in row-major
/// order from one SplitMix64 stream.
pub fn gen_weights(spec: &NetworkSpec, seed: u64, scale: ScaleMode) -> BundleResult<NetBundle> {
    check_spec(spec)?;
    if let ScaleMode::Gaussian(sigma) = scale {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(BundleError::Invalid(format!("sigma must be positive, got {sigma}")));
        }
    }
    let mut rng = SplitMix64::new(seed);
    let mut weights = Vec::with_capacity(spec.depth());
    for (i, layer) in spec.layers.iter().enumerate() {
        let (rows, cols) = layer
            .weight_shape()
            .map_err(|e| BundleError::Invalid(format!("layer {}: {e}", i + 1)))?;
        let mut data: Vec<f64> = (0..rows * cols).map(|_| rng.gaussian()).collect();
        match scale {
            ScaleMode::UnitFrobenius => {
                let norm = data.iter().map(|x| x * x).sum::<f64>().sqrt();
                data.iter_mut().for_each(|x| *x /= norm);
            }
            ScaleMode::Gaussian(sigma) => data.iter_mut().for_each(|x| *x *= sigma),
        }
        let w = DenseMatrix::new(rows, cols, data).map_err(|e| BundleError::Payload {
            layer: i + 1,
            message: e.to_string(),
        })?;
        debug_assert!(scale != ScaleMode::UnitFrobenius || (frobenius_norm(&w) - 1.0).abs() < 1e-12);
        weights.push(w);
    }
    Ok(NetBundle {
        spec: spec.clone(),
        weights,
    })
}
