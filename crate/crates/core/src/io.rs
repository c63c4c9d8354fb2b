//! File formats.
//!
//! * matrix JSON: `{"dim": d, "entries": [[re, im], ...]}`, row-major, `d²` entries
//! * map JSON: `{"m", "n", "k", "dim": (mn)², "entries"}` for the map matrix
//! * canonical descriptor JSON: `{"varphi": "id|t|pt_right|pt_left", "affine": bool,
//!   "unitary": <matrix payload> | "identity"}`
//! * profile CSV: `theta,support,boundary_re,boundary_im`, 17 significant digits
//! * profile SVG: the boundary polygon over a pair of axes

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::krange::SupportProfile;
use crate::maps::{CanonicalFormSpec, LinearMapMatrix, VarphiTag};
use crate::matcore::{BipartiteShape, ComplexMatrix};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixPayload {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixPayload {
    fn from(m: &ComplexMatrix) -> Self {
        Self { dim: m.dim(), entries: m.row_major().into_iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl TryFrom<MatrixPayload> for ComplexMatrix {
    type Error = Error;

    fn try_from(p: MatrixPayload) -> Result<Self> {
        let entries: Vec<Complex64> = p.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        ComplexMatrix::from_row_major(p.dim, &entries)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixPayload::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let payload = MatrixPayload::deserialize(deserializer)?;
        ComplexMatrix::try_from(payload).map_err(serde::de::Error::custom)
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(m)?)
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    Ok(serde_json::from_str(s)?)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    matrix_from_json(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    fs::write(path, matrix_to_json(m)?)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct MapPayload {
    m: usize,
    n: usize,
    k: usize,
    dim: usize,
    entries: Vec<[f64; 2]>,
}

pub fn map_to_json(map: &LinearMapMatrix) -> Result<String> {
    let s = map.shape();
    let inner = MatrixPayload::from(map.matrix());
    let payload = MapPayload { m: s.m(), n: s.n(), k: s.k(), dim: inner.dim, entries: inner.entries };
    Ok(serde_json::to_string(&payload)?)
}

pub fn map_from_json(s: &str) -> Result<LinearMapMatrix> {
    let p: MapPayload = serde_json::from_str(s)?;
    let shape = BipartiteShape::new(p.m, p.n, p.k)?;
    let d = shape.dim();
    if p.dim != d * d {
        return Err(Error::Format(format!("map file declares dim {} but (m, n) = ({}, {}) needs {}", p.dim, p.m, p.n, d * d)));
    }
    let matrix = ComplexMatrix::try_from(MatrixPayload { dim: p.dim, entries: p.entries })?;
    LinearMapMatrix::new(shape, matrix)
}

pub fn read_map(path: &Path) -> Result<LinearMapMatrix> {
    map_from_json(&fs::read_to_string(path)?)
}

pub fn write_map(path: &Path, map: &LinearMapMatrix) -> Result<()> {
    fs::write(path, map_to_json(map)?)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum UnitaryField {
    Named(String),
    Matrix(ComplexMatrix),
}

/// Parsed canonical descriptor; the shape comes from elsewhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanonicalDescriptor {
    pub varphi: VarphiTag,
    pub affine: bool,
    unitary: UnitaryField,
}

impl CanonicalDescriptor {
    pub fn new(varphi: VarphiTag, affine: bool, unitary: Option<ComplexMatrix>) -> Self {
        let unitary = match unitary {
            Some(u) => UnitaryField::Matrix(u),
            None => UnitaryField::Named("identity".into()),
        };
        Self { varphi, affine, unitary }
    }

    /// `None` stands for the identity.
    pub fn unitary(&self) -> Result<Option<&ComplexMatrix>> {
        match &self.unitary {
            UnitaryField::Matrix(u) => Ok(Some(u)),
            UnitaryField::Named(name) if name == "identity" => Ok(None),
            UnitaryField::Named(other) => Err(Error::Format(format!("unknown unitary keyword {other:?}"))),
        }
    }

    pub fn to_spec(&self, shape: BipartiteShape) -> Result<CanonicalFormSpec> {
        let u = match self.unitary()? {
            Some(u) => u.clone(),
            None => ComplexMatrix::identity(shape.dim()),
        };
        CanonicalFormSpec::new(self.varphi, u, self.affine, shape)
    }
}

pub fn descriptor_from_json(s: &str) -> Result<CanonicalDescriptor> {
    let d: CanonicalDescriptor = serde_json::from_str(s)?;
    d.unitary()?;
    Ok(d)
}

pub fn descriptor_to_json(d: &CanonicalDescriptor) -> Result<String> {
    Ok(serde_json::to_string_pretty(d)?)
}

/// One row per angle: `theta,support,boundary_re,boundary_im`.
pub fn profile_to_csv(p: &SupportProfile) -> String {
    let mut out = String::from("theta,support,boundary_re,boundary_im\n");
    for ((theta, h), b) in p.angles.iter().zip(&p.support).zip(&p.boundary) {
        writeln!(out, "{theta:.16e},{h:.16e},{:.16e},{:.16e}", b.re, b.im).expect("writing to a String");
    }
    out
}

/// Parses the CSV written by [`profile_to_csv`] back into `(theta, support, boundary)` rows.
pub fn profile_rows_from_csv(s: &str) -> Result<Vec<(f64, f64, Complex64)>> {
    let mut lines = s.lines();
    match lines.next() {
        Some("theta,support,boundary_re,boundary_im") => {}
        other => return Err(Error::Format(format!("unexpected CSV header {other:?}"))),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>().map_err(|e| Error::Format(format!("bad number {f:?}: {e}"))))
                .collect::<Result<_>>()?;
            if fields.len() != 4 {
                return Err(Error::Format(format!("expected 4 fields, got {}", fields.len())));
            }
            Ok((fields[0], fields[1], Complex64::new(fields[2], fields[3])))
        })
        .collect()
}

/// Boundary polygon of the profile with coordinate axes, as an SVG document.
pub fn profile_to_svg(p: &SupportProfile) -> String {
    const SIZE: f64 = 480.0;
    const MARGIN: f64 = 40.0;
    let xs = p.boundary.iter().map(|b| b.re).chain([0.0]);
    let ys = p.boundary.iter().map(|b| b.im).chain([0.0]);
    let (xmin, xmax) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (ymin, ymax) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
    let span = (xmax - xmin).max(ymax - ymin).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let cx = (xmin + xmax) / 2.0;
    let cy = (ymin + ymax) / 2.0;
    let to_px = |x: f64, y: f64| (SIZE / 2.0 + (x - cx) * scale, SIZE / 2.0 - (y - cy) * scale);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(svg, r#"  <rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (ox, oy) = to_px(0.0, 0.0);
    writeln!(svg, r##"  <line x1="0" y1="{oy:.3}" x2="{SIZE}" y2="{oy:.3}" stroke="#999" stroke-width="1"/>"##).unwrap();
    writeln!(svg, r##"  <line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="{SIZE}" stroke="#999" stroke-width="1"/>"##).unwrap();
    let points: Vec<String> = p
        .boundary
        .iter()
        .chain(p.boundary.first())
        .map(|b| {
            let (x, y) = to_px(b.re, b.im);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    writeln!(
        svg,
        r##"  <polyline points="{}" fill="#cfe2f3" fill-opacity="0.6" stroke="#1c4587" stroke-width="1.5"/>"##,
        points.join(" ")
    )
    .unwrap();
    writeln!(
        svg,
        r#"  <text x="8" y="16" font-family="monospace" font-size="12">W_{} boundary, {} angles</text>"#,
        p.k,
        p.num_angles()
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}
