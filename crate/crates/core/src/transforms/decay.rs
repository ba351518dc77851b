//! Growth/decay classification of coefficient sequences on dyadic shells of
//! the weight `⟨ξ⟩`.

use serde::Serialize;

use super::SpectralField;
use crate::eigenbasis::{weight_2d, BoundaryParams, FreqIndex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayClass {
    /// Decays faster than every tested polynomial order.
    Rapid,
    /// Bounded by a polynomial in `⟨ξ⟩` at the tested depth.
    Moderate,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayOptions {
    /// Decay faster than `⟨ξ⟩^{-rapid_order}` counts as rapid.
    pub rapid_order: f64,
    /// Magnitudes at or below `floor_rel · max` in shells beyond the one
    /// holding the maximum are treated as zero.
    pub floor_rel: f64,
    /// Minimum change between consecutive local exponents that counts as
    /// acceleration.
    pub trend_step: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            rapid_order: 20.0,
            floor_rel: 1e-13,
            trend_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShellStat {
    /// Shell covers `2^index ≤ ⟨ξ⟩ < 2^{index+1}`.
    pub index: i32,
    pub max: f64,
    pub weight_at_max: f64,
    pub complete: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub class: DecayClass,
    /// Least-squares slope of `log max|c|` against `log ⟨ξ⟩` over nonzero shells.
    pub fitted_exponent: f64,
    /// Local slope between the last two nonzero shells.
    pub tail_exponent: f64,
    /// RMS residual of the linear fit.
    pub residual: f64,
    /// Local exponents increase steadily across the last shells: growth
    /// outruns every polynomial fit available at this depth.
    pub superpolynomial: bool,
    pub shells: Vec<ShellStat>,
}

impl DecayReport {
    /// Whether the data is consistent with `|c(ξ)| ≲ ⟨ξ⟩^{order}`.
    pub fn consistent_with_moderate(&self, order: f64) -> bool {
        match self.class {
            DecayClass::Rapid => true,
            DecayClass::Moderate => self.fitted_exponent <= order && self.tail_exponent <= order,
            DecayClass::Indeterminate => false,
        }
    }
}

/// Classifies `(weight, magnitude)` samples. `cover` is the weight radius the
/// sample set covers completely; shells beyond it only count when they carry
/// nonzero data.
pub fn decay_classify_samples<I>(samples: I, cover: f64, opts: &DecayOptions) -> Result<DecayReport>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let samples: Vec<(f64, f64)> = samples.into_iter().collect();
    let gmax = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    if gmax == 0.0 {
        return Ok(DecayReport {
            class: DecayClass::Rapid,
            fitted_exponent: f64::NEG_INFINITY,
            tail_exponent: f64::NEG_INFINITY,
            residual: 0.0,
            superpolynomial: false,
            shells: Vec::new(),
        });
    }
    let floor = opts.floor_rel * gmax;
    let shell_of = |w: f64| w.max(1.0).log2().floor() as usize;
    let peak = samples
        .iter()
        .filter(|s| s.1 == gmax)
        .map(|s| shell_of(s.0))
        .min()
        .expect("gmax is attained");

    let top = samples
        .iter()
        .map(|s| s.0.max(1.0).log2().floor() as i32)
        .max()
        .unwrap_or(0);
    let mut shells: Vec<ShellStat> = (0..=top)
        .map(|index| ShellStat {
            index,
            max: 0.0,
            weight_at_max: 0.0,
            complete: 2f64.powi(index + 1) <= cover,
        })
        .collect();
    let mut populated = vec![false; shells.len()];
    for &(w, m) in &samples {
        let s = shell_of(w);
        populated[s] = true;
        let m = if s <= peak || m > floor { m } else { 0.0 };
        if shells[s].weight_at_max == 0.0 || m > shells[s].max {
            shells[s].max = m;
            shells[s].weight_at_max = w;
        }
    }
    let shells: Vec<ShellStat> = shells
        .into_iter()
        .zip(populated)
        .filter(|(s, p)| *p && (s.complete || s.max > 0.0))
        .map(|(s, _)| s)
        .collect();
    if shells.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 dyadic shells, got {}",
            shells.len()
        )));
    }

    let last_nonzero = shells.iter().rposition(|s| s.max > 0.0).expect("gmax > 0");
    let trailing_zero = shells[last_nonzero + 1..].iter().any(|s| s.complete);

    let pts: Vec<(f64, f64)> = shells
        .iter()
        .filter(|s| s.max > 0.0)
        .map(|s| (s.weight_at_max.ln(), s.max.ln()))
        .collect();
    let (slope, residual) = fit_line(&pts);
    let local: Vec<f64> = pts
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let tail = local.last().copied().unwrap_or(slope);
    let trend = |sign: f64| {
        local.len() >= 3
            && local[local.len() - 3..]
                .windows(2)
                .all(|w| sign * (w[1] - w[0]) >= opts.trend_step)
    };
    let superpolynomial = !trailing_zero && trend(1.0) && tail > 0.0;
    let accelerating_decay = trend(-1.0) && tail < -1.0;

    let class = if trailing_zero || slope < -opts.rapid_order || tail < -opts.rapid_order || accelerating_decay {
        DecayClass::Rapid
    } else if superpolynomial || pts.len() < 2 {
        DecayClass::Indeterminate
    } else {
        DecayClass::Moderate
    };
    Ok(DecayReport {
        class,
        fitted_exponent: slope,
        tail_exponent: tail,
        residual,
        superpolynomial,
        shells,
    })
}

fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    if pts.len() < 2 {
        return (0.0, 0.0);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let res = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / n;
    (slope, res.sqrt())
}

/// Smallest weight just outside the square truncation `K`.
pub(crate) fn cover_radius(h: &BoundaryParams, k: usize) -> f64 {
    let r = k as i64 + 1;
    let mut m = f64::INFINITY;
    for t in -r..=r {
        for xi in [
            FreqIndex::new(r, t),
            FreqIndex::new(-r, t),
            FreqIndex::new(t, r),
            FreqIndex::new(t, -r),
        ] {
            m = m.min(weight_2d(h, xi));
        }
    }
    m
}

pub fn decay_classify(c: &SpectralField, h: &BoundaryParams, opts: &DecayOptions) -> Result<DecayReport> {
    let samples = c.iter().map(|(xi, v)| (weight_2d(h, xi), v.norm()));
    decay_classify_samples(samples, cover_radius(h, c.trunc()), opts)
}
