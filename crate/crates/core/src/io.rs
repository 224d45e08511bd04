//! File formats: OBJ meshes, CSV tables and boundary JSON.

use crate::boundary::AsymptoticCurve;
use crate::error::{Error, Result};
use crate::hyperbolic::{BallPoint, IdealPoint};
use crate::mesh::Mesh;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Significant digits in CSV and report output.
pub const SIG_DIGITS: usize = 12;
/// Allowed deviation of `|u|` from 1 in boundary files.
pub const UNIT_LOAD_TOL: f64 = 1e-9;

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

/// Formats `x` with [`SIG_DIGITS`] significant digits, fixed notation for
/// moderate magnitudes and exponent notation otherwise.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (SIG_DIGITS as i32 - 1 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can add a digit (9.99.. -> 10.0); the extra is harmless.
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.*e}", SIG_DIGITS - 1, x)
    }
}

/// OBJ text for `mesh`: `#` header lines, `v x.. t`, `f i j k` (1-based).
/// Coordinates use the shortest round-trip representation.
pub fn obj_string(mesh: &Mesh, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        for line in h.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    if !mesh.label().is_empty() {
        let _ = writeln!(out, "o {}", mesh.label());
    }
    for v in mesh.vertices() {
        out.push('v');
        for c in v.x() {
            let _ = write!(out, " {c:?}");
        }
        let _ = writeln!(out, " {:?}", v.t());
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

pub fn write_obj(path: impl AsRef<Path>, mesh: &Mesh, header: &[String]) -> Result<()> {
    std::fs::write(path, obj_string(mesh, header))?;
    Ok(())
}

/// Parses OBJ text written by [`obj_string`]. Face entries of the form
/// `i/j/k` use the vertex index only; polygons are fanned into triangles.
pub fn parse_obj(text: &str) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut label = String::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap_or_default();
        match tag {
            "v" => {
                let c: Vec<f64> = parts
                    .map(|s| s.parse::<f64>().map_err(|e| parse_err(line_no, format!("bad coordinate {s:?}: {e}"))))
                    .collect::<Result<_>>()?;
                if c.len() < 3 {
                    return Err(parse_err(line_no, "vertex needs ball coordinates and a height"));
                }
                let (x, t) = c.split_at(c.len() - 1);
                let p = BallPoint::new(x.to_vec(), t[0]).map_err(|e| parse_err(line_no, e))?;
                vertices.push(p);
            }
            "f" => {
                let idx: Vec<usize> = parts
                    .map(|s| {
                        let head = s.split('/').next().unwrap_or_default();
                        match head.parse::<usize>() {
                            Ok(i) if i >= 1 => Ok(i - 1),
                            _ => Err(parse_err(line_no, format!("bad face index {s:?}"))),
                        }
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(parse_err(line_no, "face needs at least three vertices"));
                }
                for w in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[w], idx[w + 1]]);
                }
            }
            "o" | "g" => label = parts.collect::<Vec<_>>().join(" "),
            "vn" | "vt" | "s" | "usemtl" | "mtllib" => {}
            other => return Err(parse_err(line_no, format!("unknown record {other:?}"))),
        }
    }
    Mesh::new(vertices, faces, label).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_obj(path: impl AsRef<Path>) -> Result<Mesh> {
    parse_obj(&std::fs::read_to_string(path)?)
}

/// CSV text with a header row and [`fmt_sig`] values.
pub fn csv_string(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| fmt_sig(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    std::fs::write(path, csv_string(header, rows))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    u: Vec<f64>,
    t: f64,
    #[serde(default)]
    boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryRecord {
    n: usize,
    closed: bool,
    vertices: Vec<VertexRecord>,
}

/// Boundary data as read from JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFile {
    pub n: usize,
    pub curve: AsymptoticCurve,
}

pub fn parse_boundary_json(text: &str) -> Result<BoundaryFile> {
    let rec: BoundaryRecord = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut points = Vec::with_capacity(rec.vertices.len());
    let mut flags = Vec::with_capacity(rec.vertices.len());
    for (i, v) in rec.vertices.into_iter().enumerate() {
        if v.u.len() != rec.n {
            return Err(Error::Parse(format!("vertex {i}: direction has {} entries, n = {}", v.u.len(), rec.n)));
        }
        let p = IdealPoint::with_tolerance(v.u, Some(v.t), UNIT_LOAD_TOL)
            .map_err(|e| Error::Parse(format!("vertex {i}: {e}")))?;
        points.push(p);
        flags.push(v.boundary);
    }
    let curve = AsymptoticCurve::with_boundary(points, flags, rec.closed)?;
    Ok(BoundaryFile { n: rec.n, curve })
}

pub fn read_boundary_json(path: impl AsRef<Path>) -> Result<BoundaryFile> {
    parse_boundary_json(&std::fs::read_to_string(path)?)
}

pub fn boundary_json_string(curve: &AsymptoticCurve) -> String {
    let rec = BoundaryRecord {
        n: curve.dim(),
        closed: curve.closed(),
        vertices: curve
            .vertices()
            .iter()
            .zip(curve.boundary_flags())
            .map(|(v, &b)| VertexRecord {
                u: v.u().to_vec(),
                t: v.t().expect("validated height"),
                boundary: b,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&rec).expect("plain data serializes")
}
