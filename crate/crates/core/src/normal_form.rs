//! Conjugation of `P = ∂₁ + a(x₁)∂₂` to `P₀ = ∂₁ + a₀∂₂` through
//! `Ψ_a w = Σ e^{(log h₂ + 2πiξ₂) A(x₁)} ℱ₂w(x₁, ξ₂) u_{ξ₂}(x₂)`, where
//! `a₀` is the mean of `a` and `A(x₁) = ∫₀^{x₁} a − x₁a₀`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::eigenbasis::{weight_1d, BoundaryParams};
use crate::error::{invalid, Error, Result};
use crate::multiplier::{diff_symbol, OperatorSpec, Term};
use crate::solver::{admissibility, solve, AdmissibilityReport, SolveOptions};
use crate::transforms::{
    analyze, derivative_norms_1d, differentiate, partial_analyze, partial_synthesize, synthesize, Axis, Basis,
    GridField, GridSpec, SpectralField,
};

const TWO_PI: f64 = 2.0 * PI;

/// Modes below this fraction of the sample scale are dropped when a
/// coefficient is built from samples.
const SAMPLE_TRIM_REL: f64 = 1e-14;
/// Largest imaginary residue accepted from complex samples or mode pairs.
const REALITY_TOL: f64 = 1e-12;

/// A real, 1-periodic coefficient `a(x₁) = a₀ + Σ_{k≠0} a_k e^{2πikx₁}`
/// stored through its modes `k > 0` (`a_{−k} = conj(a_k)`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientFunction {
    mean: f64,
    modes: Vec<(i64, Complex64)>,
}

impl CoefficientFunction {
    pub fn constant(mean: f64) -> Self {
        Self { mean, modes: Vec::new() }
    }

    /// `mean + amp·cos(2πkx)`.
    pub fn cosine(mean: f64, amp: f64, k: i64) -> Result<Self> {
        Self::from_modes(mean, &[(k.abs(), Complex64::new(amp / 2.0, 0.0))])
    }

    /// `mean + amp·sin(2πkx)`.
    pub fn sine(mean: f64, amp: f64, k: i64) -> Result<Self> {
        Self::from_modes(mean, &[(k, Complex64::new(0.0, -amp / 2.0))])
    }

    /// Modes with `k ≠ 0`. When only positive `k` appear the negative ones are
    /// completed by conjugation; otherwise every pair must already satisfy
    /// `a_{−k} = conj(a_k)`.
    pub fn from_modes(mean: f64, modes: &[(i64, Complex64)]) -> Result<Self> {
        if !mean.is_finite() || modes.iter().any(|(_, c)| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(invalid("a", "coefficients must be finite"));
        }
        if modes.iter().any(|&(k, _)| k == 0) {
            return Err(invalid("a", "the k = 0 mode is the mean; pass it separately"));
        }
        let mut pos: std::collections::BTreeMap<i64, Complex64> = Default::default();
        let mut neg: std::collections::BTreeMap<i64, Complex64> = Default::default();
        for &(k, c) in modes {
            let slot = if k > 0 { pos.entry(k) } else { neg.entry(-k) };
            *slot.or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        if !neg.is_empty() {
            let keys: std::collections::BTreeSet<i64> = pos.keys().chain(neg.keys()).copied().collect();
            for k in keys {
                let zero = Complex64::new(0.0, 0.0);
                let (p, n) = (pos.get(&k).copied().unwrap_or(zero), neg.get(&k).copied().unwrap_or(zero));
                let scale = 1.0f64.max(p.norm()).max(n.norm());
                if (p - n.conj()).norm() > REALITY_TOL * scale {
                    return Err(invalid(
                        "a",
                        format!("modes ±{k} are not conjugate: the coefficient would not be real"),
                    ));
                }
                pos.insert(k, (p + n.conj()) / 2.0);
            }
        }
        Ok(Self {
            mean,
            modes: pos.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).collect(),
        })
    }

    /// From samples `a(j/n)`, `j = 0..n`.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(invalid("a", "need at least two samples"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(invalid("a", "samples must be finite"));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
        let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mut modes = Vec::new();
        for k in 1..=n / 2 {
            let mut c = buf[k] / n as f64;
            if 2 * k == n {
                c = Complex64::new(c.re / 2.0, 0.0);
            }
            if c.norm() > SAMPLE_TRIM_REL * scale {
                modes.push((k as i64, c));
            }
        }
        Ok(Self {
            mean: buf[0].re / n as f64,
            modes,
        })
    }

    /// As [`from_samples`](Self::from_samples) for complex samples whose
    /// imaginary parts must vanish.
    pub fn from_complex_samples(samples: &[Complex64]) -> Result<Self> {
        let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.norm()));
        if let Some(v) = samples.iter().find(|v| v.im.abs() > REALITY_TOL * scale) {
            return Err(invalid("a", format!("coefficient must be real; found imaginary part {:e}", v.im)));
        }
        Self::from_samples(&samples.iter().map(|v| v.re).collect::<Vec<_>>())
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Modes `k > 0`.
    pub fn modes(&self) -> &[(i64, Complex64)] {
        &self.modes
    }

    /// Largest `|k|` carried.
    pub fn band(&self) -> usize {
        self.modes.last().map_or(0, |(k, _)| *k as usize)
    }

    pub fn is_constant(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.mean
            + self
                .modes
                .iter()
                .map(|&(k, c)| 2.0 * (c * Complex64::from_polar(1.0, TWO_PI * k as f64 * x)).re)
                .sum::<f64>()
    }

    pub fn samples(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.eval(j as f64 / n as f64)).collect()
    }

    /// `a′`.
    pub fn derivative(&self) -> Self {
        Self {
            mean: 0.0,
            modes: self
                .modes
                .iter()
                .map(|&(k, c)| (k, c * Complex64::new(0.0, TWO_PI * k as f64)))
                .collect(),
        }
    }

    fn combine(&self, other: &Self, s: f64) -> Self {
        let mut pairs: Vec<(i64, Complex64)> = self.modes.clone();
        pairs.extend(other.modes.iter().map(|&(k, c)| (k, c * s)));
        Self::from_modes(self.mean + s * other.mean, &pairs).expect("sums of real coefficients stay real")
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn neg(&self) -> Self {
        Self::constant(0.0).combine(self, -1.0)
    }
}

/// Mean and primitive of a coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveData {
    pub a0: f64,
    /// `A(x₁) = ∫₀^{x₁} a − x₁a₀` as a Fourier series.
    pub primitive: CoefficientFunction,
    /// `A(j/n)`.
    pub a_samples: Vec<f64>,
}

/// `a₀` and `A` by termwise integration: `A_k = a_k/(2πik)` plus the
/// constant making `A(0) = 0`.
pub fn mean_and_primitive(a: &CoefficientFunction, n: usize) -> PrimitiveData {
    let modes: Vec<(i64, Complex64)> = a
        .modes
        .iter()
        .map(|&(k, c)| (k, c / Complex64::new(0.0, TWO_PI * k as f64)))
        .collect();
    let offset: f64 = modes.iter().map(|(_, c)| 2.0 * c.re).sum();
    let primitive = CoefficientFunction { mean: -offset, modes };
    PrimitiveData {
        a0: a.mean,
        a_samples: primitive.samples(n),
        primitive,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PsiDirection {
    Forward,
    /// `Ψ_a^{−1} = Ψ_{−a}`.
    Inverse,
}

/// `Ψ_a w` (or `Ψ_{−a} w`) on the grid of `w`: partial transform in `x₂` at
/// the largest alias-free band, multiplication by the exponential factor
/// at every `(x₁, ξ₂)`, and resynthesis.
pub fn psi_apply(a: &CoefficientFunction, h: &BoundaryParams, w: &GridField, dir: PsiDirection) -> Result<GridField> {
    if a.is_constant() {
        return Ok(w.clone());
    }
    let spec = w.spec;
    let k2 = (spec.n2 - 1) / 2;
    let mut p = partial_analyze(w, h, Axis::X2, k2, Basis::L)?;
    let sign = match dir {
        PsiDirection::Forward => 1.0,
        PsiDirection::Inverse => -1.0,
    };
    let prim = mean_and_primitive(a, spec.n1);
    let l2 = h.h2().ln();
    for (r, big_a) in prim.a_samples.iter().enumerate() {
        for xi2 in -(k2 as i64)..=k2 as i64 {
            let factor = (Complex64::new(l2, TWO_PI * xi2 as f64) * (sign * big_a)).exp();
            *p.get_mut(r, xi2) *= factor;
        }
    }
    Ok(partial_synthesize(&p, h))
}

/// `(a₀, P₀ = ∂₁ + a₀∂₂)`.
pub fn reduce(a: &CoefficientFunction) -> (f64, OperatorSpec) {
    let a0 = a.mean;
    let op = OperatorSpec::new(vec![
        Term::new(1, 0, Complex64::new(1.0, 0.0)),
        Term::new(0, 1, Complex64::new(a0, 0.0)),
    ]);
    (a0, op)
}

fn full_band_derivative(f: &GridField, h: &BoundaryParams, alpha: (u32, u32)) -> Result<GridField> {
    differentiate(f, h, f.spec.max_truncation(), alpha)
}

/// `Pw = ∂₁w + a(x₁)∂₂w` with full-band spectral derivatives.
pub fn apply_variable(a: &CoefficientFunction, h: &BoundaryParams, w: &GridField) -> Result<GridField> {
    let d1 = full_band_derivative(w, h, (1, 0))?;
    let d2 = full_band_derivative(w, h, (0, 1))?;
    let av = a.samples(w.spec.n1);
    let n2 = w.spec.n2;
    let values = d1
        .values
        .iter()
        .zip(&d2.values)
        .enumerate()
        .map(|(i, (x, y))| x + y * av[i / n2])
        .collect();
    GridField::new(w.spec, values)
}

/// `‖Ψ_a(Pw) − P₀(Ψ_a w)‖` in the discrete `L²` norm.
pub fn intertwine_residual(a: &CoefficientFunction, h: &BoundaryParams, w: &GridField) -> Result<f64> {
    let lhs = psi_apply(a, h, &apply_variable(a, h, w)?, PsiDirection::Forward)?;
    let v = psi_apply(a, h, w, PsiDirection::Forward)?;
    let rhs = apply_variable(&CoefficientFunction::constant(a.mean), h, &v)?;
    Ok(lhs.l2_diff(&rhs))
}

/// Required oversampling `n₁ ≥ OVERSAMPLING · K`.
pub const OVERSAMPLING: usize = 16;
/// Grid doubling must shrink the residual at least this much.
pub const SHRINK_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionCheck {
    pub n_coarse: usize,
    pub n_fine: usize,
    pub residual_coarse: f64,
    pub residual_fine: f64,
    /// `residual_coarse / residual_fine`.
    pub shrink: f64,
    /// A coarse residual at or below this is already at rounding level.
    pub floor: f64,
    pub shrinks: bool,
    pub converged: bool,
}

/// Intertwining residual of the field with coefficients `w` on `n × n` and
/// `2n × 2n` grids. Rejects grids below the oversampling requirement.
pub fn intertwine_convergence(
    a: &CoefficientFunction,
    h: &BoundaryParams,
    w: &SpectralField,
    n: usize,
    floor: f64,
) -> Result<ResolutionCheck> {
    let k = w.trunc().max(a.band());
    if n < OVERSAMPLING * k {
        return Err(Error::Resolution(format!(
            "grid n = {n} is below the oversampling requirement {OVERSAMPLING}·K = {}",
            OVERSAMPLING * k
        )));
    }
    let residual_at = |m: usize| -> Result<f64> {
        let spec = GridSpec::square(m)?;
        intertwine_residual(a, h, &synthesize(w, h, spec))
    };
    let (rc, rf) = (residual_at(n)?, residual_at(2 * n)?);
    let shrink = if rf > 0.0 { rc / rf } else { f64::INFINITY };
    let shrinks = shrink >= SHRINK_FACTOR;
    Ok(ResolutionCheck {
        n_coarse: n,
        n_fine: 2 * n,
        residual_coarse: rc,
        residual_fine: rf,
        shrink,
        floor,
        shrinks,
        converged: shrinks || rc <= floor,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableSolution {
    pub w: GridField,
    /// Coefficients of `Ψ_a w`, the solution of the reduced problem.
    pub reduced: SpectralField,
    /// `‖Pw − f‖` on the grid.
    pub residual: f64,
    pub admissibility: AdmissibilityReport,
}

fn reduced_data(a: &CoefficientFunction, h: &BoundaryParams, f: &GridField) -> Result<SpectralField> {
    let g = psi_apply(a, h, f, PsiDirection::Forward)?;
    analyze(&g, h, f.spec.max_truncation())
}

/// Whether `Ψ_a f` is admissible for `σ_{P₀}`.
pub fn membership(
    a: &CoefficientFunction,
    h: &BoundaryParams,
    f: &GridField,
    opts: &SolveOptions,
) -> Result<AdmissibilityReport> {
    let s0 = diff_symbol(&reduce(a).1, h);
    Ok(admissibility(&reduced_data(a, h, f)?, &s0, opts))
}

/// Solves `Pw = f` as `w = Ψ_{−a} solve(σ_{P₀}, (Ψ_a f)^)`.
pub fn solve_variable(
    a: &CoefficientFunction,
    h: &BoundaryParams,
    f: &GridField,
    opts: &SolveOptions,
) -> Result<VariableSolution> {
    let s0 = diff_symbol(&reduce(a).1, h);
    let ghat = reduced_data(a, h, f)?;
    let report = admissibility(&ghat, &s0, opts);
    let reduced = solve(&s0, &ghat, opts)?;
    let v = synthesize(&reduced, h, f.spec);
    let w = psi_apply(a, h, &v, PsiDirection::Inverse)?;
    let residual = apply_variable(a, h, &w)?.l2_diff(f);
    Ok(VariableSolution {
        w,
        reduced,
        residual,
        admissibility: report,
    })
}

/// Derivative norms of one partial transform column `ℱ₂w(·, ξ₂)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityRow {
    pub xi2: i64,
    /// `⟨ξ₂⟩` of the one-dimensional factor.
    pub weight: f64,
    /// `‖d^k/dx₁^k ℱ₂w(·, ξ₂)‖` for `k = 0..=kmax`.
    pub norms: Vec<f64>,
}

/// Growth profile of `ξ₂ ↦ ‖d^k/dx₁^k ℱ₂w(·, ξ₂)‖` from full coefficients.
pub fn partial_regularity_profile(c: &SpectralField, h: &BoundaryParams, kmax: u32) -> Vec<RegularityRow> {
    let k = c.trunc() as i64;
    (-k..=k)
        .map(|xi2| {
            let column: Vec<(i64, Complex64)> = (-k..=k)
                .map(|xi1| (xi1, c.get((xi1, xi2).into()).expect("inside truncation")))
                .collect();
            RegularityRow {
                xi2,
                weight: weight_1d(h.h2(), xi2),
                norms: derivative_norms_1d(&column, h.h1(), kmax),
            }
        })
        .collect()
}
