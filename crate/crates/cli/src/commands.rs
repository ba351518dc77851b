//! Subcommand bodies. Each writes its JSON report to stdout and, with
//! `--out DIR`, to files in that directory.

use std::fmt;
use std::fs;
use std::path::Path;

use nonharmonic::diagnostics::{
    zero_set, DiophantineStatus, ExponentCurve, GateParams, GateResult,
};
use nonharmonic::eigenbasis::{eval_u_1d, eval_v_1d};
use nonharmonic::io::{read_grid, spectral_from_json, spectral_to_json, write_grid};
use nonharmonic::normal_form::{
    apply_variable, intertwine_convergence, membership, ResolutionCheck, VariableSolution,
};
use nonharmonic::random::random_spectral_field;
use nonharmonic::report::to_json;
use nonharmonic::solver::solve_with_weights;
use nonharmonic::transforms::{analyze_in, differentiate, frame_bounds};
use nonharmonic::{
    admissibility, analyze, classify_constant_P, diff_symbol, eigenvalue_2d, eval_u, exponent_curve, ghe_gate,
    gs_gate, mean_and_primitive, reduce, residual, solve_variable, symbol_constant_P, synthesize,
    AdmissibilityReport, Basis, BoundaryParams, ClassifyOptions, CoefficientFunction, Complex64, Error,
    FreqIndex, GridField, GridSpec, SolveOptions, SpectralField, Symbol,
};
use serde::Serialize;

use crate::config::ExperimentConfig;

pub enum Failure {
    Lib(Error),
    Invariant(String),
    Inadmissible(String),
    Resolution(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Inadmissible(_) => 3,
            Failure::Resolution(_) => 4,
            Failure::Lib(e) => match e {
                Error::Inadmissible { .. } => 3,
                Error::Resolution(_) | Error::InsufficientData(_) => 4,
                Error::GrowthGuard { .. } => 1,
                _ => 2,
            },
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Invariant(s) | Failure::Inadmissible(s) | Failure::Resolution(s) => f.write_str(s),
        }
    }
}

type Outcome = Result<(), Failure>;

fn out_dir(cfg: &ExperimentConfig) -> Result<Option<&Path>, Error> {
    match &cfg.out {
        Some(d) => {
            fs::create_dir_all(d)?;
            Ok(Some(d.as_path()))
        }
        None => Ok(None),
    }
}

/// Prints the report and stores it as `name` under `--out`.
fn emit(cfg: &ExperimentConfig, name: &str, json: &str) -> Result<(), Error> {
    println!("{json}");
    if let Some(d) = out_dir(cfg)? {
        fs::write(d.join(name), format!("{json}\n"))?;
    }
    Ok(())
}

fn classify_options(cfg: &ExperimentConfig, exact: bool) -> Result<ClassifyOptions, Error> {
    Ok(ClassifyOptions {
        q_max: cfg.qmax,
        threshold: cfg.threshold,
        exact_re: if exact { cfg.exact_re()? } else { None },
        radii: cfg.radii.clone(),
        zero_radius: cfg.zero_radius,
        zero_tol: cfg.zero_tol.unwrap_or(ClassifyOptions::default().zero_tol),
        ..ClassifyOptions::default()
    })
}

fn solve_options(cfg: &ExperimentConfig) -> SolveOptions {
    SolveOptions {
        zero_tol: cfg.zero_tol,
        growth_guard: cfg.growth_guard,
    }
}

// ---------------------------------------------------------------- validate

#[derive(Serialize)]
struct Check {
    name: &'static str,
    measured: f64,
    tolerance: f64,
    passed: bool,
}

fn check(name: &'static str, measured: f64, tolerance: f64) -> Check {
    Check {
        name,
        measured,
        tolerance,
        passed: measured <= tolerance,
    }
}

#[derive(Serialize)]
struct ValidateReport {
    h: BoundaryParams,
    #[serde(rename = "K")]
    k: usize,
    n: usize,
    seed: u64,
    passed: bool,
    checks: Vec<Check>,
}

/// Largest `|Σ_j u_ξ conj(v_η) / n² − δ_{ξη}|` over `|ξ|_∞, |η|_∞ ≤ r`,
/// from the 1-D Riemann sums whose products give the 2-D ones.
fn biorthogonality_error(h: &BoundaryParams, n: usize, r: i64) -> f64 {
    let gram = |hj: f64| -> Vec<Vec<Complex64>> {
        (-r..=r)
            .map(|a| {
                (-r..=r)
                    .map(|b| {
                        (0..n)
                            .map(|j| {
                                let t = j as f64 / n as f64;
                                eval_u_1d(hj, a, t) * eval_v_1d(hj, b, t).conj()
                            })
                            .sum::<Complex64>()
                            / n as f64
                    })
                    .collect()
            })
            .collect()
    };
    let (g1, g2) = (gram(h.h1()), gram(h.h2()));
    let m = g1.len();
    let mut worst = 0.0f64;
    for a1 in 0..m {
        for b1 in 0..m {
            for a2 in 0..m {
                for b2 in 0..m {
                    let delta = if a1 == b1 && a2 == b2 { 1.0 } else { 0.0 };
                    worst = worst.max((g1[a1][b1] * g2[a2][b2] - delta).norm());
                }
            }
        }
    }
    worst
}

fn round_trip_error(cfg: &ExperimentConfig, h: &BoundaryParams, grid: GridSpec, basis: Basis) -> Result<f64, Error> {
    let mut worst = 0.0f64;
    for t in 0..cfg.trials {
        let c = random_spectral_field(cfg.k, basis, cfg.seed.wrapping_add(t as u64));
        let back = analyze_in(&synthesize(&c, h, grid), h, cfg.k, basis)?;
        worst = worst.max(back.max_diff(&c)? / c.max_abs());
    }
    Ok(worst)
}

/// Relative error of spectral derivatives of `u_ξ` against the closed
/// forms: first derivatives and `L_h u_ξ = λ_ξ u_ξ`.
fn derivative_errors(h: &BoundaryParams, grid: GridSpec, k: usize) -> Result<(f64, f64), Error> {
    let (l1, l2) = h.logs();
    let r = k.min(4) as i64;
    let (mut first, mut eigen) = (0.0f64, 0.0f64);
    for x1 in -r..=r {
        for x2 in -r..=r {
            let xi = FreqIndex::new(x1, x2);
            let u = GridField::from_fn(grid, |x| eval_u(h, xi, x));
            for (alpha, z) in [((1, 0), Complex64::new(l1, 2.0 * std::f64::consts::PI * x1 as f64)),
                               ((0, 1), Complex64::new(l2, 2.0 * std::f64::consts::PI * x2 as f64))] {
                let d = differentiate(&u, h, k, alpha)?;
                let want = u.map(|_, v| z * v);
                first = first.max(d.max_diff(&want) / want.max_abs().max(u.max_abs()));
            }
            let d11 = differentiate(&u, h, k, (2, 0))?;
            let d22 = differentiate(&u, h, k, (0, 2))?;
            let lap = d11.zip_with(&d22, |a, b| a + b)?;
            let lambda = eigenvalue_2d(h, xi);
            let want = u.map(|_, v| lambda * v);
            eigen = eigen.max(lap.max_diff(&want) / want.max_abs().max(u.max_abs()));
        }
    }
    Ok((first, eigen))
}

/// Intertwining residual relative to `‖Pw‖` with the rounding floor this
/// implies, on the coarsest grid meeting the oversampling rule.
fn resolution(
    a: &CoefficientFunction,
    h: &BoundaryParams,
    w: &SpectralField,
    n: usize,
) -> Result<(ResolutionCheck, f64), Error> {
    let scale = apply_variable(a, h, &synthesize(w, h, GridSpec::square(n)?))?.l2_norm();
    let check = intertwine_convergence(a, h, w, n, ROUNDING_FLOOR * scale)?;
    let rel = if scale > 0.0 { check.residual_coarse / scale } else { check.residual_coarse };
    Ok((check, rel))
}

/// Relative residual treated as rounding level.
const ROUNDING_FLOOR: f64 = 1e-10;
/// Required relative intertwining residual.
const INTERTWINE_TOL: f64 = 1e-6;

pub fn validate(cfg: &ExperimentConfig) -> Outcome {
    let h = cfg.h()?;
    let grid = cfg.grid()?;
    let mut checks = Vec::new();
    checks.push(check("biorthogonality", biorthogonality_error(&h, cfg.n, cfg.k.min(8) as i64), cfg.tol));
    checks.push(check("round_trip_L", round_trip_error(cfg, &h, grid, Basis::L)?, cfg.tol));
    checks.push(check("round_trip_Lstar", round_trip_error(cfg, &h, grid, Basis::Lstar)?, cfg.tol));
    let fb = frame_bounds(&h, cfg.trials, grid, cfg.k, cfg.seed)?;
    let excess = |r: &[f64], e: [f64; 2]| r.iter().map(|&x| (e[0] - x).max(x - e[1]).max(0.0)).fold(0.0, f64::max);
    let frame = excess(&fb.ratios, fb.envelope).max(excess(&fb.ratios_star, fb.envelope_star));
    checks.push(check("frame_bounds", frame, cfg.tol));
    let (first, eigen) = derivative_errors(&h, grid, cfg.k)?;
    checks.push(check("derivative_symbol", first, cfg.tol));
    checks.push(check("eigen_relation", eigen, cfg.tol));

    let a = match cfg.coefficient()? {
        Some(a) => a,
        None => CoefficientFunction::cosine(1.0, 1.0, 1)?,
    };
    let ki = cfg.k.min(8);
    let w = random_spectral_field(ki, Basis::L, cfg.seed);
    let (res, rel) = resolution(&a, &h, &w, nonharmonic::normal_form::OVERSAMPLING * ki.max(a.band()))?;
    let mut c = check("intertwining", rel, INTERTWINE_TOL);
    c.passed &= res.converged;
    checks.push(c);

    let passed = checks.iter().all(|c| c.passed);
    let report = ValidateReport {
        h,
        k: cfg.k,
        n: cfg.n,
        seed: cfg.seed,
        passed,
        checks,
    };
    emit(cfg, "validate.json", &to_json(&report))?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(Failure::Invariant(format!("invariant checks failed: {}", failed.join(", "))))
    }
}

// ---------------------------------------------------------------- diagnose

#[derive(Serialize)]
struct SymbolReport {
    operator: String,
    h: BoundaryParams,
    zero_set_radius: i64,
    zero_set_sample: Vec<FreqIndex>,
    ghe_gate: GateResult,
    gs_gate: GateResult,
    exponent_curve: ExponentCurve,
}

fn write_curve(cfg: &ExperimentConfig, curve: &ExponentCurve) -> Result<(), Error> {
    if let Some(d) = out_dir(cfg)? {
        fs::write(d.join("curve.csv"), curve.to_csv())?;
    }
    Ok(())
}

pub fn diagnose(cfg: &ExperimentConfig) -> Outcome {
    let h = cfg.h()?;
    let op = cfg.operator()?;
    if let Some(c) = op.as_first_order() {
        let report = classify_constant_P(c, &h, &classify_options(cfg, cfg.operator.is_none())?)?;
        emit(cfg, "diagnosis.json", &report.to_json())?;
        write_curve(cfg, &report.exponent_curve)?;
        if report
            .diophantine
            .as_ref()
            .is_some_and(|d| d.status == DiophantineStatus::PrecisionExhausted)
        {
            return Err(Failure::Resolution(format!(
                "input precision of Re c exhausted before Q_max = {}; pass an exact decimal literal",
                cfg.qmax
            )));
        }
        return Ok(());
    }
    let s = diff_symbol(&op, &h);
    let zt = cfg.zero_tol.unwrap_or(ClassifyOptions::default().zero_tol);
    let params = GateParams {
        threshold: cfg.gate_m,
        exponent: cfg.gate_m,
        zero_tol: zt,
    };
    let report = SymbolReport {
        operator: op.to_string(),
        h,
        zero_set_radius: cfg.zero_radius,
        zero_set_sample: zero_set(&s, cfg.zero_radius, zt),
        ghe_gate: ghe_gate(&s, &h, cfg.gate_radius, params),
        gs_gate: gs_gate(&s, &h, cfg.gate_radius, params),
        exponent_curve: exponent_curve(&s, &h, &cfg.radii)?,
    };
    emit(cfg, "diagnosis.json", &to_json(&report))?;
    write_curve(cfg, &report.exponent_curve)?;
    Ok(())
}

// ---------------------------------------------------------------- solve

#[derive(Serialize)]
struct SolveReport {
    operator: String,
    h: BoundaryParams,
    #[serde(rename = "K")]
    k: usize,
    admissibility: AdmissibilityReport,
    /// `max |σŵ − f̂|`, or `‖Pw − f‖` on the grid for variable `a`.
    residual: Option<f64>,
    fhat_max_abs: Option<f64>,
    w_max_abs: Option<f64>,
}

fn is_json(p: &Path) -> bool {
    p.extension().is_some_and(|e| e == "json")
}

fn witnesses(r: &AdmissibilityReport) -> String {
    let list: Vec<String> = r.violations.iter().take(20).map(|v| format!("({}, {})", v.xi.xi1, v.xi.xi2)).collect();
    let more = if r.violations.len() > 20 { ", …" } else { "" };
    format!(
        "datum is not admissible: {} violation(s) at {}{more}",
        r.violations.len(),
        list.join(", ")
    )
}

fn require_input(cfg: &ExperimentConfig) -> Result<&Path, Error> {
    cfg.input.as_deref().ok_or_else(|| Error::InvalidParameter {
        name: "input",
        reason: "an input file is required".into(),
    })
}

fn configured_symbol(cfg: &ExperimentConfig, h: &BoundaryParams) -> Result<(String, Symbol), Error> {
    let op = cfg.operator()?;
    let s = match (&cfg.operator, op.as_first_order()) {
        (None, Some(c)) => symbol_constant_P(c, h)?,
        _ => diff_symbol(&op, h),
    };
    Ok((op.to_string(), s))
}

pub fn solve(cfg: &ExperimentConfig) -> Outcome {
    let h = cfg.h()?;
    let input = require_input(cfg)?;
    let opts = solve_options(cfg);
    if let Some(a) = cfg.coefficient()? {
        return solve_variable_cmd(cfg, &h, &a, input, &opts);
    }
    let (name, s) = configured_symbol(cfg, &h)?;
    let (fhat, grid) = if is_json(input) {
        let fhat = spectral_from_json(&fs::read_to_string(input)?)?;
        if fhat.basis() != Basis::L {
            return Err(Error::Parse("solve expects coefficients in the L basis".into()).into());
        }
        (fhat, cfg.grid()?)
    } else {
        let f = read_grid(input)?;
        (analyze(&f, &h, cfg.k)?, f.spec)
    };
    let adm = admissibility(&fhat, &s, &opts);
    let mut report = SolveReport {
        operator: name,
        h,
        k: fhat.trunc(),
        admissibility: adm,
        residual: None,
        fhat_max_abs: Some(fhat.max_abs()),
        w_max_abs: None,
    };
    if !report.admissibility.admissible {
        emit(cfg, "solve.json", &to_json(&report))?;
        return Err(Failure::Inadmissible(witnesses(&report.admissibility)));
    }
    let w = solve_with_weights(&s, &fhat, &opts, Some(&h))?;
    report.residual = Some(residual(&s, &w, &fhat)?);
    report.w_max_abs = Some(w.max_abs());
    if let Some(d) = out_dir(cfg)? {
        fs::write(d.join("w.json"), format!("{}\n", spectral_to_json(&w)))?;
        write_grid(&d.join("w.csv"), &synthesize(&w, &h, grid))?;
    }
    emit(cfg, "solve.json", &to_json(&report))?;
    Ok(())
}

fn solve_variable_cmd(
    cfg: &ExperimentConfig,
    h: &BoundaryParams,
    a: &CoefficientFunction,
    input: &Path,
    opts: &SolveOptions,
) -> Outcome {
    if is_json(input) {
        return Err(Error::Parse("variable-coefficient solves need grid samples (.csv or .bin)".into()).into());
    }
    let f = read_grid(input)?;
    let name = format!("d1 + a(x1) d2, mean {}", a.mean());
    let adm = membership(a, h, &f, opts)?;
    if !adm.admissible {
        let msg = witnesses(&adm);
        let report = SolveReport {
            operator: name,
            h: *h,
            k: f.spec.max_truncation(),
            admissibility: adm,
            residual: None,
            fhat_max_abs: None,
            w_max_abs: None,
        };
        emit(cfg, "solve.json", &to_json(&report))?;
        return Err(Failure::Inadmissible(msg));
    }
    let VariableSolution {
        w,
        reduced,
        residual,
        admissibility,
    } = solve_variable(a, h, &f, opts)?;
    if let Some(d) = out_dir(cfg)? {
        fs::write(d.join("reduced.json"), format!("{}\n", spectral_to_json(&reduced)))?;
        write_grid(&d.join("w.csv"), &w)?;
    }
    let report = SolveReport {
        operator: name,
        h: *h,
        k: reduced.trunc(),
        admissibility,
        residual: Some(residual),
        fhat_max_abs: None,
        w_max_abs: Some(w.max_abs()),
    };
    emit(cfg, "solve.json", &to_json(&report))?;
    Ok(())
}

// ---------------------------------------------------------------- normalform

#[derive(Serialize)]
struct NormalFormReport {
    a0: f64,
    reduced_operator: String,
    primitive: CoefficientFunction,
    h: BoundaryParams,
    #[serde(rename = "K")]
    k: usize,
    resolution: ResolutionCheck,
    relative_residual: f64,
    tolerance: f64,
    diagnosis: Option<nonharmonic::DiagnosisReport>,
}

pub fn normalform(cfg: &ExperimentConfig) -> Outcome {
    let h = cfg.h()?;
    let a = cfg.coefficient()?.ok_or_else(|| Error::InvalidParameter {
        name: "a",
        reason: "normalform needs a coefficient (--a FILE or inline JSON)".into(),
    })?;
    let (a0, op0) = reduce(&a);
    let w = random_spectral_field(cfg.k, Basis::L, cfg.seed);
    let (res, rel) = resolution(&a, &h, &w, cfg.n)?;
    let diagnosis = if a0 == 0.0 {
        None
    } else {
        Some(classify_constant_P(Complex64::new(a0, 0.0), &h, &classify_options(cfg, false)?)?)
    };
    let report = NormalFormReport {
        a0,
        reduced_operator: op0.to_string(),
        primitive: mean_and_primitive(&a, cfg.n).primitive,
        h,
        k: cfg.k,
        relative_residual: rel,
        tolerance: INTERTWINE_TOL,
        resolution: res,
        diagnosis,
    };
    emit(cfg, "normalform.json", &to_json(&report))?;
    if let Some(d) = &report.diagnosis {
        write_curve(cfg, &d.exponent_curve)?;
    }
    if report.resolution.converged && rel <= INTERTWINE_TOL {
        Ok(())
    } else {
        Err(Failure::Invariant(format!(
            "intertwining residual {rel:e} (shrink {:.3}×) does not meet {INTERTWINE_TOL:e}",
            report.resolution.shrink
        )))
    }
}

// ---------------------------------------------------------------- transform

#[derive(Serialize)]
struct TransformReport {
    direction: &'static str,
    basis: Basis,
    #[serde(rename = "K")]
    k: usize,
    n1: usize,
    n2: usize,
    input_max_abs: f64,
    output_max_abs: f64,
    output: String,
}

pub fn transform(cfg: &ExperimentConfig) -> Outcome {
    let h = cfg.h()?;
    let input = require_input(cfg)?;
    let dir = out_dir(cfg)?.ok_or_else(|| Error::InvalidParameter {
        name: "out",
        reason: "transform writes its result under --out DIR".into(),
    })?;
    let report = if is_json(input) {
        let c = spectral_from_json(&fs::read_to_string(input)?)?;
        let spec = GridSpec::square(cfg.n)?;
        spec.check_alias(nonharmonic::Axis::X1, c.trunc())?;
        spec.check_alias(nonharmonic::Axis::X2, c.trunc())?;
        let g = synthesize(&c, &h, spec);
        let path = dir.join("grid.csv");
        write_grid(&path, &g)?;
        TransformReport {
            direction: "synthesize",
            basis: c.basis(),
            k: c.trunc(),
            n1: spec.n1,
            n2: spec.n2,
            input_max_abs: c.max_abs(),
            output_max_abs: g.max_abs(),
            output: path.display().to_string(),
        }
    } else {
        let f = read_grid(input)?;
        let c = analyze_in(&f, &h, cfg.k, cfg.basis)?;
        let path = dir.join("spectral.json");
        fs::write(&path, format!("{}\n", spectral_to_json(&c)))?;
        TransformReport {
            direction: "analyze",
            basis: cfg.basis,
            k: cfg.k,
            n1: f.spec.n1,
            n2: f.spec.n2,
            input_max_abs: f.max_abs(),
            output_max_abs: c.max_abs(),
            output: path.display().to_string(),
        }
    };
    emit(cfg, "transform.json", &to_json(&report))?;
    Ok(())
}
