//! Plain-text lamination files.
//!
//! ```text
//! # comments and blank lines are ignored
//! model halfplane
//! -1 1 0.5
//! 2 inf 1.25
//! ```
//!
//! The first significant line is `model halfplane` or `model disk`. Every
//! further line is one leaf: `endpoint_a endpoint_b weight`. In the
//! half-plane model endpoints are decimal reals or `inf`; in the disk model
//! they are polar angles in radians of points of the unit circle. The writer
//! always emits the half-plane model with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use super::FiniteMeasuredLamination;
use crate::error::{Error, Result};
use crate::hyperbolic::{BoundaryPoint, Geodesic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    HalfPlane,
    Disk,
}

fn parse_endpoint(token: &str, model: Model, line: usize) -> Result<BoundaryPoint> {
    let bad = |message: String| Error::Parse { line, message };
    match model {
        Model::HalfPlane => {
            if token.eq_ignore_ascii_case("inf") {
                return Ok(BoundaryPoint::infinity());
            }
            let t: f64 = token.parse().map_err(|_| bad(format!("bad endpoint `{token}`")))?;
            if !t.is_finite() {
                return Err(bad(format!("bad endpoint `{token}`")));
            }
            Ok(BoundaryPoint::from_real(t))
        }
        Model::Disk => {
            let a: f64 = token.parse().map_err(|_| bad(format!("bad angle `{token}`")))?;
            if !a.is_finite() {
                return Err(bad(format!("bad angle `{token}`")));
            }
            Ok(BoundaryPoint::from_disk(num_complex::Complex64::from_polar(1.0, a)))
        }
    }
}

pub fn parse_lamination(text: &str) -> Result<FiniteMeasuredLamination> {
    let mut model = None;
    let mut leaves = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(m) = model else {
            model = Some(match tokens.as_slice() {
                ["model", "halfplane"] => Model::HalfPlane,
                ["model", "disk"] => Model::Disk,
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: "expected header `model halfplane` or `model disk`".into(),
                    })
                }
            });
            continue;
        };
        let [a, b, w] = tokens.as_slice() else {
            return Err(Error::Parse { line, message: format!("expected 3 fields, found {}", tokens.len()) });
        };
        let p = parse_endpoint(a, m, line)?;
        let q = parse_endpoint(b, m, line)?;
        let weight: f64 = w.parse().map_err(|_| Error::Parse { line, message: format!("bad weight `{w}`") })?;
        let geodesic = Geodesic::new(p, q).map_err(|_| Error::DegenerateLeaf { index: leaves.len() })?;
        leaves.push((geodesic, weight));
    }
    if model.is_none() {
        return Err(Error::Parse { line: 0, message: "missing model header".into() });
    }
    FiniteMeasuredLamination::new(leaves)
}

fn format_endpoint(p: &BoundaryPoint) -> String {
    match p.real() {
        Some(t) => format!("{t:.16e}"),
        None => "inf".to_string(),
    }
}

pub fn format_lamination(mu: &FiniteMeasuredLamination) -> String {
    let mut out = String::from("model halfplane\n");
    for leaf in mu.leaves() {
        let (p, q) = leaf.geodesic.endpoints();
        let _ = writeln!(out, "{} {} {:.16e}", format_endpoint(&p), format_endpoint(&q), leaf.weight);
    }
    out
}

pub fn read_lamination(path: impl AsRef<Path>) -> Result<FiniteMeasuredLamination> {
    parse_lamination(&std::fs::read_to_string(path)?)
}

pub fn write_lamination(mu: &FiniteMeasuredLamination, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_lamination(mu))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_then_read() {
        let mu = parse_lamination("model halfplane\n-1 1 0.5\n1.5 inf 1.25 # trailing\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lam.txt");
        write_lamination(&mu, &path).unwrap();
        let back = read_lamination(&path).unwrap();
        assert!(back.approx_eq(&mu, 0.0));
    }

    #[test]
    fn crossing_leaves_named() {
        let err = parse_lamination("model halfplane\n-1 1 1\n2 3 1\n0 5 1\n").unwrap_err();
        assert!(matches!(err, Error::CrossingLeaves { first: 0, second: 2 }), "{err}");
    }

    #[test]
    fn zero_weight_rejected() {
        let err = parse_lamination("model halfplane\n-1 1 0\n").unwrap_err();
        assert!(matches!(err, Error::BadWeight { index: 0, .. }));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_lamination("-1 1 0.5\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_lamination("model halfplane\n-1 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_lamination("model halfplane\nx 1 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_lamination("model halfplane\n1 1 2\n"), Err(Error::DegenerateLeaf { index: 0 })));
    }

    #[test]
    fn disk_model_angles() {
        // angles π and 0 are the images of 0 and ∞
        let mu = parse_lamination("model disk\n3.141592653589793 0 1\n").unwrap();
        let expected = parse_lamination("model halfplane\n0 inf 1\n").unwrap();
        assert!(mu.approx_eq(&expected, 0.0));
    }
}
