//! Finite-truncation versions of the global hypoellipticity and solvability
//! criteria, and the exact classification of `∂₁ + c∂₂`.

mod diophantine;

pub use diophantine::{
    continued_fraction, continued_fraction_exact, liouville_evidence, liouville_evidence_exact,
    min_scaled_distance_brute, min_scaled_distance_cf, parse_decimal_exact, ContinuedFraction,
    DiophantineStatus, ExponentRecord, IrrationalityReport, Termination,
};

/// Exact rationals, as used by [`ClassifyOptions::exact_re`].
pub use num_rational::BigRational;

use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigenbasis::{weight_2d, BoundaryParams, FreqIndex};
use crate::error::{invalid, Result};
use crate::multiplier::{symbol_constant_P, Symbol};

/// Closest-to-origin ordering used to pick deterministic witnesses.
fn origin_order(a: &FreqIndex) -> (i64, i64, i64) {
    (a.sup_norm(), a.xi1, a.xi2)
}

/// All `ξ` with `|ξ_j| ≤ r` and `|σ(ξ)| ≤ tol`, sorted.
pub fn zero_set(s: &Symbol, r: i64, tol: f64) -> Vec<FreqIndex> {
    if let Some(cache) = s.zero_cache() {
        if cache.radius >= r && cache.tol == tol {
            return cache.points.iter().copied().filter(|p| p.sup_norm() <= r).collect();
        }
    }
    if r < 0 {
        return Vec::new();
    }
    let mut pts: Vec<FreqIndex> = (-r..=r)
        .into_par_iter()
        .flat_map_iter(|xi2| {
            let (lo, hi) = s.row_window(xi2, -r, r, tol);
            (lo..=hi)
                .map(move |xi1| FreqIndex::new(xi1, xi2))
                .filter(|&xi| s.eval(xi).norm() <= tol)
                .collect::<Vec<_>>()
        })
        .collect();
    pts.sort();
    pts
}

/// Threshold and exponent of the lower bound `|σ(ξ)| > ⟨ξ⟩^{−exponent}`
/// required for `⟨ξ⟩ ≥ threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateParams {
    pub threshold: f64,
    pub exponent: f64,
    /// `|σ| ≤ zero_tol` counts as a zero, exempt in the solvability gate.
    pub zero_tol: f64,
}

impl GateParams {
    /// One constant `M` in both roles.
    pub fn single(m: f64) -> Self {
        Self {
            threshold: m,
            exponent: m,
            zero_tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub xi: FreqIndex,
    pub sigma_abs: f64,
    pub weight: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateResult {
    pub passed: bool,
    pub radius: i64,
    pub params: GateParams,
    /// The violating frequency closest to the origin.
    pub witness: Option<Witness>,
}

fn gate(s: &Symbol, h: &BoundaryParams, r: i64, params: GateParams, exempt_zeros: bool) -> GateResult {
    let bound_max = if params.exponent >= 0.0 {
        params.threshold.max(1.0).powf(-params.exponent)
    } else {
        (2.0 * weight_2d(h, FreqIndex::new(r, r))).powf(-params.exponent)
    };
    let witness = (-r..=r)
        .into_par_iter()
        .filter_map(|xi2| {
            let (lo, hi) = s.row_window(xi2, -r, r, bound_max);
            (lo..=hi)
                .filter_map(|xi1| {
                    let xi = FreqIndex::new(xi1, xi2);
                    let weight = weight_2d(h, xi);
                    if weight < params.threshold {
                        return None;
                    }
                    let sigma_abs = s.eval(xi).norm();
                    if exempt_zeros && sigma_abs <= params.zero_tol {
                        return None;
                    }
                    let bound = weight.powf(-params.exponent);
                    (sigma_abs <= bound).then_some(Witness {
                        xi,
                        sigma_abs,
                        weight,
                        bound,
                    })
                })
                .min_by_key(|w| origin_order(&w.xi))
        })
        .min_by_key(|w| origin_order(&w.xi));
    GateResult {
        passed: witness.is_none(),
        radius: r,
        params,
        witness,
    }
}

/// Hypoellipticity gate: `|σ(ξ)| > ⟨ξ⟩^{−M}` at every `|ξ_j| ≤ r` with
/// `⟨ξ⟩ ≥ threshold`.
pub fn ghe_gate(s: &Symbol, h: &BoundaryParams, r: i64, params: GateParams) -> GateResult {
    gate(s, h, r, params, false)
}

/// Solvability gate: as [`ghe_gate`] with the zeros of `σ` exempt.
pub fn gs_gate(s: &Symbol, h: &BoundaryParams, r: i64, params: GateParams) -> GateResult {
    gate(s, h, r, params, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellEntry {
    /// Outer sup-norm radius `R_s` of the shell `R_{s−1} < |ξ|_∞ ≤ R_s`.
    pub radius: i64,
    /// Minimum of `|σ|` over the nonzero values in the shell.
    pub min_sigma: f64,
    pub argmin: FreqIndex,
    pub min_weight: f64,
    /// `−ln min|σ| / ln min⟨ξ⟩`; absent when `min⟨ξ⟩ = 1`.
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentCurve {
    pub shells: Vec<ShellEntry>,
}

impl ExponentCurve {
    pub fn max_exponent(&self) -> Option<f64> {
        self.shells.iter().filter_map(|s| s.exponent).reduce(f64::max)
    }

    /// `R,min_sigma,exponent` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R,min_sigma,exponent\n");
        for s in &self.shells {
            let e = s.exponent.map(|e| format!("{e:.16e}")).unwrap_or_default();
            writeln!(out, "{},{:.16e},{}", s.radius, s.min_sigma, e).expect("string write");
        }
        out
    }
}

/// Real roots of `t³ + p t + q`.
fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let mut roots = if p == 0.0 {
        vec![-q.cbrt()]
    } else {
        let disc = q * q / 4.0 + p * p * p / 27.0;
        if disc > 0.0 {
            let sd = disc.sqrt();
            vec![(-q / 2.0 + sd).cbrt() + (-q / 2.0 - sd).cbrt()]
        } else {
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            (0..3)
                .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
                .collect()
        }
    };
    for t in &mut roots {
        for _ in 0..3 {
            let d = 3.0 * *t * *t + p;
            if d != 0.0 {
                *t -= (*t * *t * *t + p * *t + q) / d;
            }
        }
    }
    roots
}

/// `min ⟨ξ⟩` over `ξ₁ ∈ [lo, hi]` on row `ξ₂`. The squared eigenvalue
/// modulus is a quartic in `t = 2πξ₁` whose critical points solve
/// `t³ + (ℓ₁² − ℓ₂² + s²) t + 2ℓ₁ℓ₂ s = 0`, `s = 2πξ₂`.
fn row_min_weight(h: &BoundaryParams, xi2: i64, lo: i64, hi: i64) -> f64 {
    let (l1, l2) = h.logs();
    let tau = 2.0 * std::f64::consts::PI;
    let s = tau * xi2 as f64;
    let mut cands = vec![lo, hi];
    for t in depressed_cubic_roots(l1 * l1 - l2 * l2 + s * s, 2.0 * l1 * l2 * s) {
        let x = t / tau;
        if x.is_finite() {
            for c in [x.floor(), x.ceil()] {
                cands.push((c.max(lo as f64).min(hi as f64)) as i64);
            }
        }
    }
    cands
        .into_iter()
        .map(|xi1| weight_2d(h, FreqIndex::new(xi1, xi2)))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy)]
struct ShellAcc {
    min_sigma: f64,
    argmin: FreqIndex,
    min_weight: f64,
}

impl ShellAcc {
    const EMPTY: ShellAcc = ShellAcc {
        min_sigma: f64::INFINITY,
        argmin: FreqIndex::ZERO,
        min_weight: f64::INFINITY,
    };

    fn merge(self, o: ShellAcc) -> ShellAcc {
        let take = o.min_sigma < self.min_sigma
            || (o.min_sigma == self.min_sigma && origin_order(&o.argmin) < origin_order(&self.argmin));
        let (min_sigma, argmin) = if take {
            (o.min_sigma, o.argmin)
        } else {
            (self.min_sigma, self.argmin)
        };
        ShellAcc {
            min_sigma,
            argmin,
            min_weight: self.min_weight.min(o.min_weight),
        }
    }
}

fn scan_segment(s: &Symbol, h: &BoundaryParams, xi2: i64, lo: i64, hi: i64) -> ShellAcc {
    let mut acc = ShellAcc::EMPTY;
    let mut visit = |xi1: i64| {
        let xi = FreqIndex::new(xi1, xi2);
        let v = s.eval(xi).norm();
        if v > 0.0 {
            acc = acc.merge(ShellAcc {
                min_sigma: v,
                argmin: xi,
                min_weight: f64::INFINITY,
            });
        }
    };
    match s.row_min_candidates(xi2, lo, hi) {
        Some(c) => c.into_iter().for_each(&mut visit),
        None => (lo..=hi).for_each(&mut visit),
    }
    acc.min_weight = row_min_weight(h, xi2, lo, hi);
    acc
}

/// Per-shell minima of `|σ|` over sup-norm shells `R_{s−1} < |ξ|_∞ ≤ R_s`
/// (the first shell contains the origin) and the implied exponents.
pub fn exponent_curve(s: &Symbol, h: &BoundaryParams, radii: &[i64]) -> Result<ExponentCurve> {
    if radii.first().is_some_and(|&r| r < 0) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("radii", "radii must be nonnegative and strictly increasing"));
    }
    let mut shells = Vec::new();
    let mut inner = -1i64;
    for &r in radii {
        let acc = (-r..=r)
            .into_par_iter()
            .map(|xi2| {
                if xi2.abs() > inner {
                    scan_segment(s, h, xi2, -r, r)
                } else {
                    scan_segment(s, h, xi2, -r, -inner - 1).merge(scan_segment(s, h, xi2, inner + 1, r))
                }
            })
            .reduce(|| ShellAcc::EMPTY, ShellAcc::merge);
        inner = r;
        if !acc.min_sigma.is_finite() {
            continue;
        }
        let lw = acc.min_weight.ln();
        shells.push(ShellEntry {
            radius: r,
            min_sigma: acc.min_sigma,
            argmin: acc.argmin,
            min_weight: acc.min_weight,
            exponent: (lw > 0.0).then(|| -acc.min_sigma.ln() / lw),
        });
    }
    Ok(ExponentCurve { shells })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

/// What a verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictBasis {
    /// A branch of the classification decides exactly.
    Theorem,
    /// Decided by finite-depth Diophantine evidence on `Re c`.
    DiophantineEvidence,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub q_max: u64,
    /// Liouville evidence when the running exponent `n(q)` reaches this.
    pub threshold: f64,
    /// `|c log h₂ + log h₁| ≤ relation_tol · scale` counts as equality.
    pub relation_tol: f64,
    /// `|c log h₂ + log h₁| ≥ separation_tol · scale` counts as inequality;
    /// in between the relation is ambiguous.
    pub separation_tol: f64,
    /// Overrides the tolerance test of the relation.
    pub assert_relation: Option<bool>,
    /// Exact value of `Re c` for the Diophantine analysis.
    #[serde(skip)]
    pub exact_re: Option<BigRational>,
    pub radii: Vec<i64>,
    pub zero_radius: i64,
    pub zero_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            q_max: 10_000,
            threshold: 3.5,
            relation_tol: 1e-12,
            separation_tol: 1e-8,
            assert_relation: None,
            exact_re: None,
            radii: vec![1, 3, 10, 30, 100, 300, 1000],
            zero_radius: 10,
            zero_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosisReport {
    pub c_re: f64,
    pub c_im: f64,
    pub h: BoundaryParams,
    pub gh_verdict: Verdict,
    pub gs_verdict: Verdict,
    pub deciding_branch: &'static str,
    pub verdict_basis: VerdictBasis,
    /// `|c log h₂ + log h₁| / (|c||log h₂| + |log h₁|)`, zero on the torus.
    pub relation_residual: f64,
    pub zero_set_radius: i64,
    pub zero_set_sample: Vec<FreqIndex>,
    pub exponent_curve: ExponentCurve,
    pub diophantine: Option<IrrationalityReport>,
}

impl DiagnosisReport {
    pub fn to_json(&self) -> String {
        crate::report::to_json(self)
    }
}

enum Relation {
    Holds,
    Fails,
    Ambiguous,
}

/// Branch tags of the decision tree.
pub mod branch {
    pub const RELATION_FAILS: &str = "c_log_h2_ne_minus_log_h1";
    pub const RELATION_AMBIGUOUS: &str = "relation_within_tolerance_band";
    pub const IMAGINARY: &str = "resonant_im_c_nonzero";
    pub const RATIONAL: &str = "resonant_real_rational";
    pub const NON_LIOUVILLE: &str = "resonant_real_irrational_non_liouville";
    pub const LIOUVILLE: &str = "resonant_real_liouville";
    pub const INCONCLUSIVE: &str = "resonant_real_diophantine_inconclusive";
}

/// Classifies `P = ∂₁ + c∂₂` on `[0,1]²` with boundary weights `h`.
///
/// When `c log h₂ ≠ −log h₁` both properties hold. Otherwise they hold when
/// `Im c ≠ 0`; for real `c` hypoellipticity needs `c` irrational and not
/// Liouville, solvability needs `c` rational or irrational and not Liouville.
#[allow(non_snake_case)]
pub fn classify_constant_P(c: Complex64, h: &BoundaryParams, opts: &ClassifyOptions) -> Result<DiagnosisReport> {
    let sigma = symbol_constant_P(c, h)?;
    if let Some(x) = &opts.exact_re {
        let xf = x.to_f64().unwrap_or(f64::NAN);
        if (xf - c.re).abs() > 1e-12 * (1.0 + c.re.abs()) {
            return Err(invalid("exact_re", format!("exact value {xf} does not match Re c = {}", c.re)));
        }
    }
    let (l1, l2) = h.logs();
    let scale = c.norm() * l2.abs() + l1.abs();
    let relation_residual = if scale == 0.0 { 0.0 } else { (c * l2 + l1).norm() / scale };
    let relation = match opts.assert_relation {
        Some(true) => Relation::Holds,
        Some(false) => Relation::Fails,
        None if relation_residual <= opts.relation_tol => Relation::Holds,
        None if relation_residual >= opts.separation_tol => Relation::Fails,
        None => Relation::Ambiguous,
    };

    use Verdict::*;
    let mut diophantine = None;
    let (gh, gs, branch_tag, basis) = match relation {
        Relation::Fails => (Yes, Yes, branch::RELATION_FAILS, VerdictBasis::Theorem),
        Relation::Ambiguous => (Unknown, Unknown, branch::RELATION_AMBIGUOUS, VerdictBasis::Undecided),
        // Exactly, b·log h₂ = 0 and a·log h₂ = −log h₁: a nonzero imaginary
        // part is only possible on the torus. Off the torus a nonzero `b`
        // here is a tolerance artefact, not a case of the theorem.
        Relation::Holds if c.im != 0.0 && l2 != 0.0 => {
            (Unknown, Unknown, branch::RELATION_AMBIGUOUS, VerdictBasis::Undecided)
        }
        Relation::Holds if c.im != 0.0 => (Yes, Yes, branch::IMAGINARY, VerdictBasis::Theorem),
        Relation::Holds => {
            let report = match &opts.exact_re {
                Some(x) => liouville_evidence_exact(x, opts.q_max, opts.threshold)?,
                None => liouville_evidence(c.re, opts.q_max, opts.threshold)?,
            };
            let out = match report.status {
                DiophantineStatus::Rational => (No, Yes, branch::RATIONAL, VerdictBasis::Theorem),
                DiophantineStatus::PrecisionExhausted => {
                    (Unknown, Unknown, branch::INCONCLUSIVE, VerdictBasis::Undecided)
                }
                DiophantineStatus::Irrational if report.liouville_evidence => {
                    (No, No, branch::LIOUVILLE, VerdictBasis::DiophantineEvidence)
                }
                DiophantineStatus::Irrational => (Yes, Yes, branch::NON_LIOUVILLE, VerdictBasis::DiophantineEvidence),
            };
            diophantine = Some(report);
            out
        }
    };

    Ok(DiagnosisReport {
        c_re: c.re,
        c_im: c.im,
        h: *h,
        gh_verdict: gh,
        gs_verdict: gs,
        deciding_branch: branch_tag,
        verdict_basis: basis,
        relation_residual,
        zero_set_radius: opts.zero_radius,
        zero_set_sample: zero_set(&sigma, opts.zero_radius, opts.zero_tol),
        exponent_curve: exponent_curve(&sigma, h, &opts.radii)?,
        diophantine,
    })
}
