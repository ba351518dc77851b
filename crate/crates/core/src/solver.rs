//! Fourier division `ŵ = f̂ / σ` off the zero set of the symbol.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigenbasis::{weight_2d, BoundaryParams, FreqIndex};
use crate::error::{Error, Result};
use crate::multiplier::Symbol;
use crate::transforms::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SolveOptions {
    /// `|σ| ≤ zero_tol` counts as a zero. `None` uses `1e−12 · max|σ|` over
    /// the truncation.
    pub zero_tol: Option<f64>,
    /// Reject solutions with `|ŵ(ξ)| > ⟨ξ⟩^{guard}`.
    pub growth_guard: Option<f64>,
}

pub const DEFAULT_RELATIVE_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub xi: FreqIndex,
    pub sigma_abs: f64,
    pub fhat_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub zero_tol: f64,
    /// Sorted by frequency.
    pub violations: Vec<Violation>,
}

fn symbol_values(s: &Symbol, fhat: &SpectralField) -> Vec<Complex64> {
    let pts: Vec<FreqIndex> = fhat.iter().map(|(xi, _)| xi).collect();
    pts.par_iter().map(|&xi| s.eval(xi)).collect()
}

fn zero_tol(opts: &SolveOptions, sigma: &[Complex64]) -> f64 {
    opts.zero_tol.unwrap_or_else(|| {
        DEFAULT_RELATIVE_ZERO_TOL * sigma.iter().map(|v| v.norm()).fold(0.0, f64::max)
    })
}

fn check(fhat: &SpectralField, sigma: &[Complex64], tol: f64) -> AdmissibilityReport {
    let violations: Vec<Violation> = fhat
        .iter()
        .zip(sigma)
        .filter_map(|((xi, f), s)| {
            let (sa, fa) = (s.norm(), f.norm());
            (sa <= tol && fa > tol).then_some(Violation {
                xi,
                sigma_abs: sa,
                fhat_abs: fa,
            })
        })
        .collect();
    AdmissibilityReport {
        admissible: violations.is_empty(),
        zero_tol: tol,
        violations,
    }
}

/// Checks `σ(ξ) = 0 ⟹ f̂(ξ) = 0` on every kept frequency.
pub fn admissibility(fhat: &SpectralField, s: &Symbol, opts: &SolveOptions) -> AdmissibilityReport {
    let sigma = symbol_values(s, fhat);
    check(fhat, &sigma, zero_tol(opts, &sigma))
}

/// `ŵ = f̂/σ` off the zero set, `0` on it.
pub fn solve(s: &Symbol, fhat: &SpectralField, opts: &SolveOptions) -> Result<SpectralField> {
    solve_with_weights(s, fhat, opts, None)
}

/// As [`solve`]; the growth guard measures `⟨ξ⟩` for the given `h`
/// (the torus when absent).
pub fn solve_with_weights(
    s: &Symbol,
    fhat: &SpectralField,
    opts: &SolveOptions,
    h: Option<&BoundaryParams>,
) -> Result<SpectralField> {
    let sigma = symbol_values(s, fhat);
    let tol = zero_tol(opts, &sigma);
    let report = check(fhat, &sigma, tol);
    if let Some(first) = report.violations.first() {
        return Err(Error::Inadmissible {
            count: report.violations.len(),
            first: first.xi,
        });
    }
    let mut k = 0;
    let w = fhat.map(|_, f| {
        let sv = sigma[k];
        k += 1;
        if sv.norm() <= tol {
            Complex64::new(0.0, 0.0)
        } else {
            f / sv
        }
    });
    if let Some(guard) = opts.growth_guard {
        let h = h.copied().unwrap_or_else(BoundaryParams::torus);
        let worst = w
            .iter()
            .filter(|(xi, v)| v.norm() > weight_2d(&h, *xi).powf(guard))
            .min_by_key(|(xi, _)| (xi.sup_norm(), xi.xi1, xi.xi2));
        if let Some((xi, v)) = worst {
            return Err(Error::GrowthGuard {
                xi,
                magnitude: v.norm(),
                guard,
            });
        }
    }
    Ok(w)
}

/// `max_ξ |σ(ξ)ŵ(ξ) − f̂(ξ)|`.
pub fn residual(s: &Symbol, what: &SpectralField, fhat: &SpectralField) -> Result<f64> {
    what.check_same_shape(fhat)?;
    Ok(what
        .iter()
        .zip(fhat.iter())
        .map(|((xi, w), (_, f))| (s.eval(xi) * w - f).norm())
        .fold(0.0, f64::max))
}
