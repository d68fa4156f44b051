use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use monopole::sweep::CellOutcome;
use monopole::{Profile, ShootingConfig, SweepCell};
use serde::Serialize;

use crate::error::CliError;

pub const TABLE_HEADER: &str = "epsilon,lambda,a1,b2,residual_inf,iterations,status";
pub const PROFILE_HEADER: &str = "r,gamma,phi,dgamma,dphi";

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn manifest_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    data.with_file_name(name)
}

/// Shortest round-trip decimal, in exponent form for very small or very large
/// magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn profile_csv(profile: &Profile, sample: Option<usize>) -> String {
    let states = profile.states();
    let mut out = String::with_capacity(64 * states.len());
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for i in sample_indices(states.len(), sample) {
        let s = &states[i];
        writeln!(
            out,
            "{},{},{},{},{}",
            num(s.r),
            num(s.gamma()),
            num(s.phi),
            num(s.dgamma),
            num(s.dphi)
        )
        .unwrap();
    }
    out
}

/// `n` indices spread evenly over `0..len`, always including both ends.
pub fn sample_indices(len: usize, n: Option<usize>) -> Vec<usize> {
    match n {
        Some(n) if n >= 2 && n < len => (0..n)
            .map(|k| ((k as f64) * (len - 1) as f64 / (n - 1) as f64).round() as usize)
            .collect(),
        _ => (0..len).collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct TableRow {
    pub epsilon: f64,
    pub lambda: f64,
    pub a1: Option<f64>,
    pub b2: Option<f64>,
    pub residual_inf: Option<f64>,
    pub iterations: Option<usize>,
    pub status: String,
}

impl From<&SweepCell> for TableRow {
    fn from(c: &SweepCell) -> Self {
        match &c.outcome {
            CellOutcome::Converged(r) => TableRow {
                epsilon: c.epsilon,
                lambda: c.lambda,
                a1: Some(r.seed.a1),
                b2: Some(r.seed.b2),
                residual_inf: Some(r.residual_inf()),
                iterations: Some(r.iterations),
                status: "converged".into(),
            },
            CellOutcome::Failed { code, best, .. } => TableRow {
                epsilon: c.epsilon,
                lambda: c.lambda,
                a1: best.map(|b| b.a1),
                b2: best.map(|b| b.b2),
                residual_inf: None,
                iterations: None,
                status: code.clone(),
            },
        }
    }
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let mut out = String::new();
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(r.epsilon),
            num(r.lambda),
            opt(r.a1),
            opt(r.b2),
            opt(r.residual_inf),
            r.iterations.map(|i| i.to_string()).unwrap_or_default(),
            r.status
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp: String,
    pub command: &'static str,
    pub epsilon: Vec<f64>,
    pub lambda: Vec<f64>,
    pub config: ShootingConfig,
    pub files: Vec<String>,
    pub cells: &'a [TableRow],
}

impl<'a> RunManifest<'a> {
    pub fn new(
        command: &'static str,
        config: ShootingConfig,
        data: &Path,
        cells: &'a [TableRow],
    ) -> Self {
        let mut epsilon: Vec<f64> = cells.iter().map(|c| c.epsilon).collect();
        let mut lambda: Vec<f64> = cells.iter().map(|c| c.lambda).collect();
        for v in [&mut epsilon, &mut lambda] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            command,
            epsilon,
            lambda,
            config,
            files: vec![data
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default()],
            cells,
        }
    }
}

/// Writes the data file and its manifest next to it.
pub fn emit_with_manifest(
    path: &Path,
    contents: &str,
    manifest: &RunManifest<'_>,
) -> Result<(), CliError> {
    write_atomic(path, contents)?;
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes") + "\n";
    write_atomic(&manifest_path(path), &json)
}

pub fn to_json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes") + "\n"
}
