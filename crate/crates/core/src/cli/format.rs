//! Curve files, plot streams and manifests.

use crate::bands::BandGrid;
use crate::curve::{integrate_frames, CurvatureBound, CurveSamples, SpaceSpec};
use crate::geom3::Rotation;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("invalid bounds: {0}")]
    Bounds(String),
    #[error("invalid q0: {0}")]
    Frame(String),
    #[error("sample {index}: {reason}")]
    Sample { index: usize, reason: String },
    #[error("invalid curve: {0}")]
    Curve(String),
    #[error("invalid manifest: {0}")]
    Manifest(String),
}

/// A curvature bound as written in files: a number, "-inf" or "+inf".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundValue {
    Number(f64),
    Text(String),
}

impl BoundValue {
    pub fn parse(&self) -> Result<CurvatureBound, FormatError> {
        match self {
            BoundValue::Number(x) => CurvatureBound::new(*x).map_err(|e| FormatError::Bounds(e.to_string())),
            BoundValue::Text(s) => match s.as_str() {
                "+inf" | "-inf" => s.parse().map_err(|e: crate::curve::CurveError| FormatError::Bounds(e.to_string())),
                _ => Err(FormatError::Bounds(format!("expected a number, \"-inf\" or \"+inf\", got {s:?}"))),
            },
        }
    }
}

impl From<CurvatureBound> for BoundValue {
    fn from(b: CurvatureBound) -> Self {
        if b.is_finite() {
            BoundValue::Number(b.value())
        } else {
            BoundValue::Text(b.to_string())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub kappa1: BoundValue,
    pub kappa2: BoundValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sample {
    pub v: f64,
    pub kappa: f64,
}

/// On-disk curve: bounds, optional row-major Φ(0), and per-interval samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub bounds: Bounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<[f64; 9]>,
    pub samples: Vec<Sample>,
}

impl CurveFile {
    pub fn new(c: &CurveSamples, s: &SpaceSpec) -> Self {
        let q0 = c.q0();
        Self {
            bounds: Bounds {
                kappa1: s.kappa1.into(),
                kappa2: s.kappa2.into(),
            },
            q0: if *q0 == Rotation::identity() { None } else { Some(q0.to_row_major()) },
            samples: c.v().iter().zip(c.kappa()).map(|(v, k)| Sample { v: *v, kappa: *k }).collect(),
        }
    }

    pub fn validate(&self) -> Result<(CurveSamples, SpaceSpec), FormatError> {
        let k1 = self.bounds.kappa1.parse()?;
        let k2 = self.bounds.kappa2.parse()?;
        let space = SpaceSpec::new(k1, k2).map_err(|e| FormatError::Bounds(e.to_string()))?;
        let q0 = match &self.q0 {
            None => Rotation::identity(),
            Some(r) => Rotation::from_row_major(r).map_err(|e| FormatError::Frame(e.to_string()))?,
        };
        for (index, s) in self.samples.iter().enumerate() {
            if !(s.v.is_finite() && s.v > 0.0) {
                return Err(FormatError::Sample { index, reason: format!("v = {} must be positive", s.v) });
            }
            if !space.contains_curvature(s.kappa) {
                return Err(FormatError::Sample {
                    index,
                    reason: format!("kappa = {} is not strictly between {} and {}", s.kappa, k1, k2),
                });
            }
        }
        let c = CurveSamples::new(
            self.samples.iter().map(|s| s.v).collect(),
            self.samples.iter().map(|s| s.kappa).collect(),
            q0,
        )
        .map_err(|e| FormatError::Curve(e.to_string()))?;
        Ok((c, space))
    }
}

pub fn parse_curve_file(text: &str) -> Result<(CurveSamples, SpaceSpec), FormatError> {
    let f: CurveFile = serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
    f.validate()
}

pub fn emit_curve_file(c: &CurveSamples, s: &SpaceSpec) -> String {
    let mut out = serde_json::to_string_pretty(&CurveFile::new(c, s)).expect("curve file serializes");
    out.push('\n');
    out
}

/// 17 significant digits.
pub struct Real(pub f64);

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("ascii")
}

/// Rows t,x,y,z,v,kappa at the n+1 nodes; v and kappa of the interval
/// starting at the node (the last row repeats the last interval).
pub fn curve_csv(c: &CurveSamples) -> String {
    let fc = integrate_frames(c);
    let n = c.n();
    let mut w = csv_writer();
    w.write_record(["t", "x", "y", "z", "v", "kappa"]).expect("write");
    for (i, f) in fc.frames.iter().enumerate() {
        let p = f.col(0);
        let j = i.min(n - 1);
        let rec = [i as f64 / n as f64, p.x, p.y, p.z, c.v()[j], c.kappa()[j]];
        w.write_record(rec.iter().map(|x| Real(*x).to_string())).expect("write");
    }
    finish(w)
}

/// Rows t,theta,x,y,z over the band grid, t outermost.
pub fn band_csv(b: &BandGrid) -> String {
    let mut w = csv_writer();
    w.write_record(["t", "theta", "x", "y", "z"]).expect("write");
    for (i, col) in b.points.iter().enumerate() {
        for (j, p) in col.iter().enumerate() {
            let rec = [b.t_grid[i], b.theta_grid[j], p.x(), p.y(), p.z()];
            w.write_record(rec.iter().map(|x| Real(*x).to_string())).expect("write");
        }
    }
    finish(w)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

/// Record of a command that wrote files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub command: Vec<String>,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
}

/// An indexed family of curve files in one space, paths relative to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub kind: String,
    pub bounds: Bounds,
    pub entries: Vec<FamilyEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyEntry {
    pub s: f64,
    pub file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 3]>,
}

pub fn parse_manifest(text: &str) -> Result<Manifest, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Manifest(e.to_string()))
}
