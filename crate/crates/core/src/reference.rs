//! Published reference coefficients for the 5 x 5 `(epsilon, lambda)` grid,
//! bundled as CSV exactly as printed.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{MonopoleError, Result};

pub const REFERENCE_CSV: &str = include_str!("../data/table1.csv");
/// SHA-256 of [`REFERENCE_CSV`].
pub const REFERENCE_SHA256: &str =
    "6aa06a9de66a06608c536018491cbbae72a8e2731bf93128c48375db567e76af";

pub const GRID_EPSILON: [f64; 5] = [0.1, 0.3, 1.0, 3.0, 10.0];
pub const GRID_LAMBDA: [f64; 5] = [0.0, 1.0, 3.0, 10.0, 30.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub epsilon: f64,
    pub lambda: f64,
    pub a1: f64,
    pub b2: f64,
}

/// Parses `epsilon,lambda,a1,b2` rows with a mandatory header.
pub fn parse_reference_csv(text: &str) -> Result<Vec<ReferenceRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().unwrap_or_default();
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        cols.iter().position(|c| *c == name).ok_or_else(|| {
            MonopoleError::Config(format!("reference table lacks a `{name}` column"))
        })
    };
    let idx = [find("epsilon")?, find("lambda")?, find("a1")?, find("b2")?];
    lines
        .enumerate()
        .map(|(n, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |k: usize| -> Result<f64> {
                fields
                    .get(idx[k])
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| {
                        MonopoleError::Config(format!("bad reference row {}: `{line}`", n + 2))
                    })
            };
            Ok(ReferenceRow {
                epsilon: get(0)?,
                lambda: get(1)?,
                a1: get(2)?,
                b2: get(3)?,
            })
        })
        .collect()
}

/// The bundled reference rows.
pub fn reference_table() -> &'static [ReferenceRow] {
    static TABLE: OnceLock<Vec<ReferenceRow>> = OnceLock::new();
    TABLE.get_or_init(|| parse_reference_csv(REFERENCE_CSV).expect("bundled table parses"))
}

pub fn reference_row(epsilon: f64, lambda: f64) -> Option<&'static ReferenceRow> {
    reference_table()
        .iter()
        .find(|r| r.epsilon == epsilon && r.lambda == lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sha2::{Digest, Sha256};

    #[test]
    fn checksum_matches() {
        let digest = Sha256::digest(REFERENCE_CSV.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, REFERENCE_SHA256);
    }

    #[test]
    fn full_grid_present() {
        let t = reference_table();
        assert_eq!(t.len(), 25);
        for e in GRID_EPSILON {
            for l in GRID_LAMBDA {
                assert!(reference_row(e, l).is_some(), "missing ({e}, {l})");
            }
        }
        let row = reference_row(1.0, 0.0).unwrap();
        assert_eq!((row.a1, row.b2), (1.67098122, -1.02894746));
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_reference_csv("epsilon,lambda,a1\n1,0,2\n").is_err());
        assert!(parse_reference_csv("epsilon,lambda,a1,b2\n1,0,x,2\n").is_err());
        let swapped = parse_reference_csv("b2,a1,lambda,epsilon\n-1,2,0,1\n").unwrap();
        assert_eq!(swapped[0].a1, 2.0);
        assert_eq!(swapped[0].epsilon, 1.0);
    }
}
