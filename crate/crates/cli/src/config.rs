//! Experiment configuration: a JSON file with every field optional, then
//! command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use nonharmonic::diagnostics::{parse_decimal_exact, BigRational};
use nonharmonic::io::{coefficient_from_json, read_coefficient};
use nonharmonic::normal_form::CoefficientFunction;
use nonharmonic::{BoundaryParams, Complex64, Error, GridSpec, OperatorSpec, Result};
use serde::{Deserialize, Serialize};

/// A real number kept as the decimal literal it was written as.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Decimal {
    Text(String),
    Number(f64),
}

impl Decimal {
    pub fn literal(&self) -> String {
        match self {
            Decimal::Text(s) => s.trim().to_string(),
            Decimal::Number(x) => format!("{x:?}"),
        }
    }

    pub fn value(&self) -> Result<f64> {
        let lit = self.literal();
        lit.parse()
            .map_err(|_| Error::Parse(format!("c_re: `{lit}` is not a number")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorInput {
    /// Shorthand such as `d1 + (0.5+1.2i) d2`.
    Shorthand(String),
    Terms(OperatorSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientInput {
    /// Path to a `.json` series or `.csv` samples.
    Path(PathBuf),
    Series(serde_json::Value),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub h1: f64,
    pub h2: f64,
    pub c_re: Decimal,
    pub c_im: f64,
    pub operator: Option<OperatorInput>,
    /// Coefficient `a(x₁)` of `∂₁ + a(x₁)∂₂`.
    pub a: Option<CoefficientInput>,
    #[serde(rename = "K")]
    pub k: usize,
    pub n: usize,
    pub radii: Vec<i64>,
    pub qmax: u64,
    pub threshold: f64,
    pub tol: f64,
    pub zero_tol: Option<f64>,
    pub growth_guard: Option<f64>,
    pub zero_radius: i64,
    pub gate_radius: i64,
    pub gate_m: f64,
    pub trials: usize,
    pub seed: u64,
    pub basis: nonharmonic::Basis,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            h1: 1.0,
            h2: 1.0,
            c_re: Decimal::Text("1".into()),
            c_im: 0.0,
            operator: None,
            a: None,
            k: 16,
            n: 72,
            radii: vec![1, 3, 10, 30, 100, 300, 1000],
            qmax: 10_000,
            threshold: 3.5,
            tol: 1e-9,
            zero_tol: None,
            growth_guard: None,
            zero_radius: 10,
            gate_radius: 100,
            gate_m: 2.0,
            trials: 20,
            seed: 0,
            basis: nonharmonic::Basis::L,
            input: None,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| {
            Error::Parse(format!(
                "{}: line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }

    pub fn h(&self) -> Result<BoundaryParams> {
        BoundaryParams::new(self.h1, self.h2)
    }

    pub fn c(&self) -> Result<Complex64> {
        Ok(Complex64::new(self.c_re.value()?, self.c_im))
    }

    pub fn exact_re(&self) -> Result<Option<BigRational>> {
        match &self.c_re {
            Decimal::Text(s) => parse_decimal_exact(s).map(Some),
            Decimal::Number(_) => Ok(None),
        }
    }

    /// The configured operator, `∂₁ + c∂₂` unless one is given explicitly.
    pub fn operator(&self) -> Result<OperatorSpec> {
        match &self.operator {
            Some(OperatorInput::Shorthand(s)) => OperatorSpec::parse_shorthand(s),
            Some(OperatorInput::Terms(t)) => Ok(t.clone()),
            None => OperatorSpec::first_order(self.c()?),
        }
    }

    pub fn coefficient(&self) -> Result<Option<CoefficientFunction>> {
        match &self.a {
            None => Ok(None),
            Some(CoefficientInput::Path(p)) => read_coefficient(p).map(Some),
            Some(CoefficientInput::Series(v)) => coefficient_from_json(&v.to_string()).map(Some),
        }
    }

    /// Grid of `n × n` nodes that resolves the truncation `K`.
    pub fn grid(&self) -> Result<GridSpec> {
        let spec = GridSpec::square(self.n)?;
        spec.check_alias(nonharmonic::Axis::X1, self.k)?;
        spec.check_alias(nonharmonic::Axis::X2, self.k)?;
        Ok(spec)
    }

    /// Checks the preconditions shared by every subcommand.
    pub fn validate(&self) -> Result<()> {
        self.h()?;
        self.c_re.value()?;
        if !self.c_im.is_finite() {
            return Err(invalid("c_im", "must be finite"));
        }
        if self.radii.first().is_some_and(|&r| r < 0) || self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("radii", "must be nonnegative and strictly increasing"));
        }
        if self.qmax < 2 {
            return Err(invalid("qmax", "must be at least 2"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol", "must be positive"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.zero_radius < 0 || self.gate_radius < 0 {
            return Err(invalid("zero_radius", "radii must be nonnegative"));
        }
        Ok(())
    }
}

fn invalid(name: &'static str, reason: &str) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
