//! Plain-text file formats.
//!
//! * Signal CSV: one sample per line, optional first line `# sample_rate=<f>`.
//! * Decomposition: `decomposition.json` (metadata) next to `a.csv` and
//!   `b.csv`, each `N` rows by `K` comma-separated columns.
//! * `spectrum.csv` (`k,f_k,z_k`), `trace.csv`, `band.csv`, `phasediff.csv`.
//!
//! Reals are written with 17 significant digits so that a write/read cycle
//! is bit-exact.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::band::{BandComponent, PhaseSeries};
use crate::error::{Result, SfaError};
use crate::model::{AmplitudeMatrix, Decomposition, FrequencyGrid, Signal, SolveInfo, Spectrum};
use crate::solver::{SolverConfig, TraceRow};

pub const DECOMPOSITION_FILE: &str = "decomposition.json";
pub const A_FILE: &str = "a.csv";
pub const B_FILE: &str = "b.csv";

/// Formats a real with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path, source: std::io::Error) -> SfaError {
    SfaError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn parse_real(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| SfaError::Parse(format!("{what}: cannot parse {s:?} as a number")))
}

/// Splits off `# key=value` header lines.
fn split_header(text: &str) -> (Vec<(String, String)>, Vec<&str>) {
    let mut meta = Vec::new();
    let mut body = Vec::new();
    for line in text.lines() {
        match line.trim().strip_prefix('#') {
            Some(rest) if body.is_empty() => {
                if let Some((k, v)) = rest.split_once('=') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
            }
            _ => body.push(line),
        }
    }
    (meta, body)
}

pub fn parse_signal_csv(text: &str) -> Result<Signal> {
    let (meta, body) = split_header(text);
    let mut rate = 1.0;
    for (k, v) in &meta {
        if k == "sample_rate" {
            rate = parse_real(v, "sample_rate")?;
        }
    }
    let samples = body
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_real(l, &format!("line {}", i + 1 + meta.len())))
        .collect::<Result<Vec<f64>>>()?;
    if samples.is_empty() {
        return Err(SfaError::Parse("no samples".into()));
    }
    Signal::with_rate(samples, rate)
}

pub fn read_signal_csv(path: &Path) -> Result<Signal> {
    parse_signal_csv(&read_text(path)?).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, e: SfaError) -> SfaError {
    match e {
        SfaError::Parse(m) => SfaError::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

pub fn signal_csv(x: &Signal) -> String {
    let mut out = format!("# sample_rate={}\n", x.sample_rate());
    for v in x.samples() {
        out.push_str(&fmt_real(*v));
        out.push('\n');
    }
    out
}

pub fn write_signal_csv(path: &Path, x: &Signal) -> Result<()> {
    write_text(path, &signal_csv(x))
}

/// Contents of `decomposition.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionMeta {
    pub n: usize,
    pub k: usize,
    pub grid: FrequencyGrid,
    pub sample_rate: f64,
    pub info: Option<SolveInfo>,
    pub a_file: String,
    pub b_file: String,
}

pub fn matrix_csv(m: &AmplitudeMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 25);
    for n in 0..m.rows() {
        for k in 0..m.cols() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&fmt_real(m.get(n, k)));
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str, rows: usize, cols: usize) -> Result<AmplitudeMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut m = AmplitudeMatrix::zeros(rows, cols);
    let mut n = 0;
    for rec in reader.records() {
        let rec = rec.map_err(|e| SfaError::Parse(e.to_string()))?;
        if n >= rows {
            return Err(SfaError::Dimension(format!("more than {rows} rows")));
        }
        if rec.len() != cols {
            return Err(SfaError::Dimension(format!(
                "row {} has {} columns, expected {cols}",
                n + 1,
                rec.len()
            )));
        }
        for (k, field) in rec.iter().enumerate() {
            m.set(n, k, parse_real(field, &format!("row {} column {}", n + 1, k + 1))?);
        }
        n += 1;
    }
    if n != rows {
        return Err(SfaError::Dimension(format!("{n} rows, expected {rows}")));
    }
    Ok(m)
}

/// Writes metadata plus both amplitude matrices into `dir`.
pub fn write_decomposition(dir: &Path, d: &Decomposition, sample_rate: f64) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let meta = DecompositionMeta {
        n: d.len(),
        k: d.num_freqs(),
        grid: d.grid,
        sample_rate,
        info: d.info.clone(),
        a_file: A_FILE.into(),
        b_file: B_FILE.into(),
    };
    let paths = [dir.join(DECOMPOSITION_FILE), dir.join(A_FILE), dir.join(B_FILE)];
    write_text(&paths[0], &(serde_json::to_string_pretty(&meta)? + "\n"))?;
    write_text(&paths[1], &matrix_csv(&d.a))?;
    write_text(&paths[2], &matrix_csv(&d.b))?;
    Ok(paths.to_vec())
}

pub fn read_decomposition(dir: &Path) -> Result<(Decomposition, DecompositionMeta)> {
    let meta_path = dir.join(DECOMPOSITION_FILE);
    let meta: DecompositionMeta = serde_json::from_str(&read_text(&meta_path)?)
        .map_err(|e| SfaError::Parse(format!("{}: {e}", meta_path.display())))?;
    let load = |name: &str| {
        let p = dir.join(name);
        parse_matrix_csv(&read_text(&p)?, meta.n, meta.k).map_err(|e| match e {
            SfaError::Dimension(m) => SfaError::Dimension(format!("{}: {m}", p.display())),
            other => with_path(&p, other),
        })
    };
    let (a, b) = (load(&meta.a_file)?, load(&meta.b_file)?);
    let mut d = Decomposition::new(a, b, meta.grid)?;
    d.info = meta.info.clone();
    Ok((d, meta))
}

/// `k,f_k,z_k` with `f_k` in cycles/sample.
pub fn spectrum_csv(z: &Spectrum, grid: &FrequencyGrid) -> String {
    let mut out = String::from("k,f_k,z_k\n");
    for (k, v) in z.z.iter().enumerate() {
        out.push_str(&format!("{k},{},{}\n", fmt_real(grid.freq(k)), fmt_real(*v)));
    }
    out
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("iter,objective,primal_residual,feasibility_gap,relative_change\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.iter,
            fmt_real(r.objective),
            fmt_real(r.primal_residual),
            fmt_real(r.feasibility_gap),
            fmt_real(r.relative_change)
        ));
    }
    out
}

/// `n,t,g,aM,bM,theta_deg`, preceded by `# center_omega=` (radians/sample)
/// and `# sample_rate=`. Unmerged bands leave the last three columns empty.
pub fn band_csv(bc: &BandComponent, phase: Option<&PhaseSeries>, sample_rate: f64) -> String {
    let mut out = format!(
        "# center_omega={}\n# sample_rate={sample_rate}\nn,t,g,aM,bM,theta_deg\n",
        fmt_real(bc.center_omega)
    );
    let opt = |v: Option<f64>| v.filter(|x| x.is_finite()).map(fmt_real).unwrap_or_default();
    for (n, g) in bc.samples.iter().enumerate() {
        out.push_str(&format!(
            "{n},{},{},{},{},{}\n",
            fmt_real(n as f64 / sample_rate),
            fmt_real(*g),
            opt(bc.am.as_ref().map(|v| v[n])),
            opt(bc.bm.as_ref().map(|v| v[n])),
            opt(phase.map(|p| p.theta[n].to_degrees())),
        ));
    }
    out
}

/// Reads the phase column of a band CSV back into radians.
pub fn parse_band_phase(text: &str) -> Result<(PhaseSeries, f64)> {
    let (meta, body) = split_header(text);
    let lookup = |key: &str| {
        meta.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| parse_real(v, key))
            .transpose()
    };
    let center_omega = lookup("center_omega")?
        .ok_or_else(|| SfaError::Parse("missing `# center_omega=` header".into()))?;
    let sample_rate = lookup("sample_rate")?.unwrap_or(1.0);
    let joined = body.join("\n");
    let mut reader = csv::Reader::from_reader(joined.as_bytes());
    let headers = reader.headers().map_err(|e| SfaError::Parse(e.to_string()))?.clone();
    let col = headers
        .iter()
        .position(|h| h == "theta_deg")
        .ok_or_else(|| SfaError::Parse("no theta_deg column".into()))?;
    let mut theta = Vec::new();
    let mut mask = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| SfaError::Parse(format!("row {}: {e}", i + 1)))?;
        let field = rec.get(col).unwrap_or("").trim();
        if field.is_empty() {
            theta.push(f64::NAN);
            mask.push(true);
        } else {
            theta.push(parse_real(field, &format!("row {} theta_deg", i + 1))?.to_radians());
            mask.push(false);
        }
    }
    Ok((
        PhaseSeries {
            theta,
            center_omega,
            mask,
        },
        sample_rate,
    ))
}

/// `n,t,dtheta_deg,plv`.
pub fn phasediff_csv(delta: &[f64], plv: &[f64], sample_rate: f64) -> String {
    let mut out = String::from("n,t,dtheta_deg,plv\n");
    let opt = |v: f64| if v.is_finite() { fmt_real(v) } else { String::new() };
    for (n, (d, p)) in delta.iter().zip(plv).enumerate() {
        out.push_str(&format!(
            "{n},{},{},{}\n",
            fmt_real(n as f64 / sample_rate),
            opt(d.to_degrees()),
            opt(*p)
        ));
    }
    out
}

/// Record written next to every command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub config: Option<SolverConfig>,
    pub threads: usize,
    pub wall_clock_s: f64,
    pub info: Option<SolveInfo>,
    pub version: String,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &(serde_json::to_string_pretty(self)? + "\n"))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read_text(path)?)?)
    }
}
