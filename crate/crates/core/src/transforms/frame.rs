use num_complex::Complex64;
use serde::Serialize;

use super::{analyze_in, synthesize, Basis, GridSpec, SpectralField};
use crate::eigenbasis::BoundaryParams;
use crate::error::{invalid, Result};
use crate::random::random_spectral_field;

/// Empirical frame constants of the L- and L*-transforms together with the
/// analytic envelopes `[inf h^{∓x}, sup h^{∓x}]` they must lie in.
#[derive(Debug, Clone, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_star: f64,
    pub upper_star: f64,
    pub envelope: [f64; 2],
    pub envelope_star: [f64; 2],
    /// `(Σ|f̂|²)^{1/2} / ‖f‖` for every trial, probes included.
    pub ratios: Vec<f64>,
    pub ratios_star: Vec<f64>,
}

impl FrameBounds {
    pub fn within_envelope(&self, slack: f64) -> bool {
        let inside = |r: f64, e: [f64; 2]| r >= e[0] - slack && r <= e[1] + slack;
        self.ratios.iter().all(|&r| inside(r, self.envelope))
            && self.ratios_star.iter().all(|&r| inside(r, self.envelope_star))
    }
}

/// `[inf, sup]` of `h^{s·x}` over the closed square.
fn envelope(h: &BoundaryParams, s: f64) -> [f64; 2] {
    let (l1, l2) = h.logs();
    let lo = (s * l1).min(0.0) + (s * l2).min(0.0);
    let hi = (s * l1).max(0.0) + (s * l2).max(0.0);
    [lo.exp(), hi.exp()]
}

/// Fejér-weighted bump in the coefficient space, concentrated at `centre`.
fn probe(trunc: usize, basis: Basis, centre: (f64, f64)) -> SpectralField {
    let k = trunc as f64 + 1.0;
    SpectralField::from_fn(trunc, basis, |xi| {
        let w = (1.0 - xi.xi1.abs() as f64 / k) * (1.0 - xi.xi2.abs() as f64 / k);
        let phase = -2.0 * std::f64::consts::PI * (xi.xi1 as f64 * centre.0 + xi.xi2 as f64 * centre.1);
        Complex64::from_polar(w, phase)
    })
}

fn ratio(c: &SpectralField, h: &BoundaryParams, grid: GridSpec) -> Result<Option<f64>> {
    let f = synthesize(c, h, grid);
    let norm = f.l2_norm();
    if norm == 0.0 {
        return Ok(None);
    }
    Ok(Some(analyze_in(&f, h, c.trunc(), c.basis())?.l2_norm() / norm))
}

/// Estimates the frame constants from `trials` random fields of band `K`
/// (plus deterministic probes concentrated near the corners of the square).
/// The L-bounds use fields band-limited in the `u_ξ` system, the L*-bounds
/// fields band-limited in the `v_ξ` system, so that each ratio reduces to a
/// discrete Parseval identity on the weighted samples.
pub fn frame_bounds(h: &BoundaryParams, trials: usize, grid: GridSpec, k: usize, seed: u64) -> Result<FrameBounds> {
    if trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    grid.check_alias(super::Axis::X1, k)?;
    grid.check_alias(super::Axis::X2, k)?;

    let off = 1.5 / (k as f64 + 1.0);
    let centres = [(off, off), (1.0 - off, off), (off, 1.0 - off), (1.0 - off, 1.0 - off)];
    let mut out = [Vec::new(), Vec::new()];
    for (slot, basis) in [Basis::L, Basis::Lstar].into_iter().enumerate() {
        for t in 0..trials {
            let c = random_spectral_field(k, basis, seed.wrapping_add(t as u64));
            if let Some(r) = ratio(&c, h, grid)? {
                out[slot].push(r);
            }
        }
        for centre in centres {
            if let Some(r) = ratio(&probe(k, basis, centre), h, grid)? {
                out[slot].push(r);
            }
        }
    }
    let [ratios, ratios_star] = out;
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(FrameBounds {
        lower: min(&ratios),
        upper: max(&ratios),
        lower_star: min(&ratios_star),
        upper_star: max(&ratios_star),
        envelope: envelope(h, -1.0),
        envelope_star: envelope(h, 1.0),
        ratios,
        ratios_star,
    })
}
