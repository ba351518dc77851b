//! File formats.
//!
//! * Grid fields: CSV with one line per `x₁` row and columns
//!   `re₀,im₀,re₁,im₁,…` over `x₂`, or binary: `n1`, `n2` as little-endian
//!   `u64` followed by interleaved little-endian `f64` real/imaginary parts.
//! * Spectral fields: JSON `{K, basis, coeffs: [{xi1, xi2, re, im}]}`;
//!   frequencies not listed are zero.
//! * Coefficients `a(x₁)`: JSON `{mean, modes: [{k, re, im}]}` or CSV
//!   samples on the uniform grid.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigenbasis::FreqIndex;
use crate::error::{Error, Result};
use crate::normal_form::CoefficientFunction;
use crate::transforms::{Basis, GridField, GridSpec, SpectralField};

fn parse_f64(tok: &str, line: usize, col: usize) -> Result<f64> {
    tok.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}, field {col}: `{}` is not a number", tok.trim())))
}

pub fn grid_to_csv(f: &GridField) -> String {
    let mut out = String::with_capacity(f.values.len() * 48);
    for row in f.values.chunks(f.spec.n2) {
        let line: Vec<String> = row.iter().map(|v| format!("{:.16e},{:.16e}", v.re, v.im)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn grid_from_csv(text: &str) -> Result<GridField> {
    let mut values = Vec::new();
    let mut n2 = None;
    let mut n1 = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() % 2 != 0 {
            return Err(Error::Parse(format!("line {}: odd number of fields {}", i + 1, toks.len())));
        }
        match n2 {
            None => n2 = Some(toks.len() / 2),
            Some(m) if m != toks.len() / 2 => {
                return Err(Error::Parse(format!(
                    "line {}: {} samples, earlier rows have {m}",
                    i + 1,
                    toks.len() / 2
                )))
            }
            _ => {}
        }
        for (j, pair) in toks.chunks(2).enumerate() {
            values.push(Complex64::new(parse_f64(pair[0], i + 1, 2 * j + 1)?, parse_f64(pair[1], i + 1, 2 * j + 2)?));
        }
        n1 += 1;
    }
    let spec = GridSpec::new(n1, n2.unwrap_or(0)).map_err(|e| Error::Parse(e.to_string()))?;
    GridField::new(spec, values)
}

pub fn grid_to_bytes(f: &GridField) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 16 * f.values.len());
    out.extend_from_slice(&(f.spec.n1 as u64).to_le_bytes());
    out.extend_from_slice(&(f.spec.n2 as u64).to_le_bytes());
    for v in &f.values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn grid_from_bytes(bytes: &[u8]) -> Result<GridField> {
    let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().expect("8-byte slice") };
    if bytes.len() < 16 {
        return Err(Error::Parse("binary grid shorter than its 16-byte header".into()));
    }
    let (n1, n2) = (u64::from_le_bytes(word(0)), u64::from_le_bytes(word(1)));
    let expected = n1
        .checked_mul(n2)
        .and_then(|m| m.checked_mul(16))
        .and_then(|m| m.checked_add(16));
    if expected != Some(bytes.len() as u64) {
        return Err(Error::Parse(format!(
            "binary grid header says {n1}x{n2} but the payload has {} bytes",
            bytes.len() - 16
        )));
    }
    let spec = GridSpec::new(n1 as usize, n2 as usize).map_err(|e| Error::Parse(e.to_string()))?;
    let values = (0..spec.len())
        .map(|k| Complex64::new(f64::from_le_bytes(word(2 + 2 * k)), f64::from_le_bytes(word(3 + 2 * k))))
        .collect();
    GridField::new(spec, values)
}

/// Reads a grid field, choosing the format from the extension (`.csv`
/// for text, anything else binary).
pub fn read_grid(path: &Path) -> Result<GridField> {
    if path.extension().is_some_and(|e| e == "csv") {
        grid_from_csv(&fs::read_to_string(path)?)
    } else {
        grid_from_bytes(&fs::read(path)?)
    }
}

pub fn write_grid(path: &Path, f: &GridField) -> Result<()> {
    if path.extension().is_some_and(|e| e == "csv") {
        fs::write(path, grid_to_csv(f))?;
    } else {
        fs::write(path, grid_to_bytes(f))?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    xi1: i64,
    xi2: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SpectralJson {
    #[serde(rename = "K")]
    k: usize,
    basis: Basis,
    coeffs: Vec<CoeffJson>,
}

pub fn spectral_to_json(c: &SpectralField) -> String {
    crate::report::to_json(&SpectralJson {
        k: c.trunc(),
        basis: c.basis(),
        coeffs: c
            .iter()
            .map(|(xi, v)| CoeffJson {
                xi1: xi.xi1,
                xi2: xi.xi2,
                re: v.re,
                im: v.im,
            })
            .collect(),
    })
}

pub fn spectral_from_json(text: &str) -> Result<SpectralField> {
    let raw: SpectralJson = serde_json::from_str(text)?;
    let mut out = SpectralField::zeros(raw.k, raw.basis);
    let mut seen = std::collections::HashSet::new();
    for (i, c) in raw.coeffs.iter().enumerate() {
        let xi = FreqIndex::new(c.xi1, c.xi2);
        if !out.contains(xi) {
            return Err(Error::Parse(format!(
                "coeffs[{i}]: frequency ({}, {}) outside K = {}",
                c.xi1, c.xi2, raw.k
            )));
        }
        if !seen.insert(xi) {
            return Err(Error::Parse(format!("coeffs[{i}]: duplicate frequency ({}, {})", c.xi1, c.xi2)));
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Parse(format!("coeffs[{i}]: non-finite value")));
        }
        out.set(xi, Complex64::new(c.re, c.im))?;
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct ModeJson {
    k: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct CoefficientJson {
    mean: f64,
    #[serde(default)]
    modes: Vec<ModeJson>,
}

pub fn coefficient_to_json(a: &CoefficientFunction) -> String {
    crate::report::to_json(&CoefficientJson {
        mean: a.mean(),
        modes: a
            .modes()
            .iter()
            .map(|&(k, c)| ModeJson { k, re: c.re, im: c.im })
            .collect(),
    })
}

pub fn coefficient_from_json(text: &str) -> Result<CoefficientFunction> {
    let raw: CoefficientJson = serde_json::from_str(text)?;
    let modes: Vec<(i64, Complex64)> = raw.modes.iter().map(|m| (m.k, Complex64::new(m.re, m.im))).collect();
    CoefficientFunction::from_modes(raw.mean, &modes)
}

/// Samples separated by commas or newlines.
pub fn coefficient_from_csv(text: &str) -> Result<CoefficientFunction> {
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for (j, tok) in line.split(',').enumerate().filter(|(_, t)| !t.trim().is_empty()) {
            samples.push(parse_f64(tok, i + 1, j + 1)?);
        }
    }
    CoefficientFunction::from_samples(&samples)
}

/// Reads `a(x₁)` from `.json` or `.csv`.
pub fn read_coefficient(path: &Path) -> Result<CoefficientFunction> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "csv") {
        coefficient_from_csv(&text)
    } else {
        coefficient_from_json(&text)
    }
}
