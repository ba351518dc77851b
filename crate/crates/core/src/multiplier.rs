//! Symbols of constant-coefficient differential operators in the `L_h`
//! calculus: `∂_j` acts on `u_ξ` as multiplication by `log h_j + 2πiξ_j`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigenbasis::{derivative_factor, BoundaryParams, FreqIndex};
use crate::error::{invalid, Error, Result};
use crate::transforms::SpectralField;

const TWO_PI: f64 = 2.0 * PI;

/// One term `coeff · ∂₁^{α₁} ∂₂^{α₂}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub alpha1: u32,
    pub alpha2: u32,
    pub re: f64,
    pub im: f64,
}

impl Term {
    pub fn new(alpha1: u32, alpha2: u32, coeff: Complex64) -> Self {
        Self {
            alpha1,
            alpha2,
            re: coeff.re,
            im: coeff.im,
        }
    }

    pub fn coeff(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// A constant-coefficient differential operator as a finite term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatorSpec {
    pub terms: Vec<Term>,
}

impl OperatorSpec {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    /// `∂₁ + c ∂₂`.
    pub fn first_order(c: Complex64) -> Result<Self> {
        if c == Complex64::new(0.0, 0.0) {
            return Err(invalid("c", "the transport coefficient must be nonzero"));
        }
        Ok(Self::new(vec![
            Term::new(1, 0, Complex64::new(1.0, 0.0)),
            Term::new(0, 1, c),
        ]))
    }

    /// `∂_j` for `axis ∈ {0, 1}`.
    pub fn partial(axis: usize) -> Self {
        let (a1, a2) = if axis == 0 { (1, 0) } else { (0, 1) };
        Self::new(vec![Term::new(a1, a2, Complex64::new(1.0, 0.0))])
    }

    /// The model operator `L_h = ∂₁² + ∂₂²`.
    pub fn laplacian() -> Self {
        Self::new(vec![
            Term::new(2, 0, Complex64::new(1.0, 0.0)),
            Term::new(0, 2, Complex64::new(1.0, 0.0)),
        ])
    }

    pub fn order(&self) -> u32 {
        self.terms.iter().map(|t| t.alpha1 + t.alpha2).max().unwrap_or(0)
    }

    /// If the operator is `∂₁ + c∂₂` (after merging like terms), returns `c`.
    pub fn as_first_order(&self) -> Option<Complex64> {
        let mut c = [Complex64::new(0.0, 0.0); 3];
        for t in &self.terms {
            match (t.alpha1, t.alpha2) {
                (0, 0) => c[0] += t.coeff(),
                (1, 0) => c[1] += t.coeff(),
                (0, 1) => c[2] += t.coeff(),
                _ if t.coeff() == Complex64::new(0.0, 0.0) => {}
                _ => return None,
            }
        }
        (c[0] == Complex64::new(0.0, 0.0) && c[1] == Complex64::new(1.0, 0.0) && c[2] != Complex64::new(0.0, 0.0))
            .then_some(c[2])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses shorthand such as `"d1 + (0.5+1.2i) d2"`, `"d1^2 + d2^2"` or
    /// `"d1 - 2 d2"`.
    pub fn parse_shorthand(text: &str) -> Result<Self> {
        ShorthandParser::new(text).parse()
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)", t.re, t.im)?;
            for (name, p) in [("d1", t.alpha1), ("d2", t.alpha2)] {
                match p {
                    0 => {}
                    1 => write!(f, " {name}")?,
                    _ => write!(f, " {name}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

/// Closed-form metadata attached to a symbol.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolDescriptor {
    Differential { operator: String, h: BoundaryParams },
    ConstantP { c_re: f64, c_im: f64, h: BoundaryParams },
    Adjoint { of: Box<SymbolDescriptor> },
    Scaled { factor_re: f64, factor_im: f64, of: Box<SymbolDescriptor> },
    Custom { name: String },
}

/// `σ(ξ) = c0 + p1 ξ₁ + p2 ξ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineForm {
    pub c0: Complex64,
    pub p1: Complex64,
    pub p2: Complex64,
}

impl AffineForm {
    fn eval(&self, xi: FreqIndex) -> Complex64 {
        self.c0 + self.p1 * xi.xi1 as f64 + self.p2 * xi.xi2 as f64
    }

    /// Real `t` minimizing `|c0 + p2 ξ₂ + p1 t|`.
    fn row_argmin(&self, xi2: i64) -> Option<f64> {
        let a = self.c0 + self.p2 * xi2 as f64;
        let d = self.p1.norm_sqr();
        (d > 0.0).then(|| -(a * self.p1.conj()).re / d)
    }
}

/// Zeros of a symbol within a square truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCache {
    pub radius: i64,
    pub tol: f64,
    pub points: Vec<FreqIndex>,
}

type Evaluator = Arc<dyn Fn(FreqIndex) -> Complex64 + Send + Sync>;

/// An evaluator `ξ ↦ σ(ξ)` with optional closed-form metadata.
#[derive(Clone)]
pub struct Symbol {
    eval: Evaluator,
    descriptor: SymbolDescriptor,
    affine: Option<AffineForm>,
    zeros: Option<Arc<ZeroCache>>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("descriptor", &self.descriptor)
            .field("affine", &self.affine)
            .finish()
    }
}

impl Symbol {
    /// Wraps a user evaluator.
    pub fn custom(name: impl Into<String>, f: impl Fn(FreqIndex) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            descriptor: SymbolDescriptor::Custom { name: name.into() },
            affine: None,
            zeros: None,
        }
    }

    /// Symbol `c0 + p1 ξ₁ + p2 ξ₂`.
    pub fn affine(name: impl Into<String>, form: AffineForm) -> Self {
        Self {
            eval: Arc::new(move |xi| form.eval(xi)),
            descriptor: SymbolDescriptor::Custom { name: name.into() },
            affine: Some(form),
            zeros: None,
        }
    }

    #[inline]
    pub fn eval(&self, xi: FreqIndex) -> Complex64 {
        (self.eval)(xi)
    }

    pub fn descriptor(&self) -> &SymbolDescriptor {
        &self.descriptor
    }

    pub fn affine_form(&self) -> Option<AffineForm> {
        self.affine
    }

    pub fn zero_cache(&self) -> Option<&ZeroCache> {
        self.zeros.as_deref()
    }

    /// Builds the zero-set cache for `|ξ_j| ≤ radius` eagerly.
    pub fn with_zero_cache(mut self, radius: i64, tol: f64) -> Self {
        self.zeros = None;
        let points = crate::diagnostics::zero_set(&self, radius, tol);
        self.zeros = Some(Arc::new(ZeroCache { radius, tol, points }));
        self
    }

    /// `k · σ`.
    pub fn scaled(&self, k: Complex64) -> Self {
        let inner = self.eval.clone();
        Self {
            eval: Arc::new(move |xi| inner(xi) * k),
            descriptor: SymbolDescriptor::Scaled {
                factor_re: k.re,
                factor_im: k.im,
                of: Box::new(self.descriptor.clone()),
            },
            affine: self.affine.map(|a| AffineForm {
                c0: a.c0 * k,
                p1: a.p1 * k,
                p2: a.p2 * k,
            }),
            zeros: None,
        }
    }

    /// Integers `ξ₁ ∈ [lo, hi]` on row `ξ₂` where `|σ| ≤ bound` is possible.
    pub(crate) fn row_window(&self, xi2: i64, lo: i64, hi: i64, bound: f64) -> (i64, i64) {
        match self.affine.and_then(|a| a.row_argmin(xi2).map(|t| (a, t))) {
            Some((a, t)) => {
                let hw = bound / a.p1.norm();
                // One extra integer on each side absorbs rounding in `t`.
                let l = ((t - hw).ceil() - 1.0).max(lo as f64);
                let r = ((t + hw).floor() + 1.0).min(hi as f64);
                if l > r {
                    (1, 0)
                } else {
                    (l as i64, r as i64)
                }
            }
            None => (lo, hi),
        }
    }

    /// Candidates containing the minimal nonzero `|σ|` on row `ξ₂` within
    /// `[lo, hi]`, or `None` when the whole row must be scanned.
    pub(crate) fn row_min_candidates(&self, xi2: i64, lo: i64, hi: i64) -> Option<Vec<i64>> {
        let a = self.affine?;
        let t = a.row_argmin(xi2)?;
        let c = (t.round().max(lo as f64).min(hi as f64)) as i64;
        let mut v: Vec<i64> = [c - 1, c, c + 1].into_iter().filter(|x| (lo..=hi).contains(x)).collect();
        v.dedup();
        Some(v)
    }
}

/// `σ(ξ) = Σ coeff · Π_j (log h_j + 2πiξ_j)^{α_j}`.
pub fn diff_symbol(op: &OperatorSpec, h: &BoundaryParams) -> Symbol {
    let (l1, l2) = h.logs();
    let terms = op.terms.clone();
    let eval_terms = terms.clone();
    let eval = move |xi: FreqIndex| -> Complex64 {
        let z1 = derivative_factor(l1, xi.xi1);
        let z2 = derivative_factor(l2, xi.xi2);
        eval_terms
            .iter()
            .map(|t| t.coeff() * z1.powu(t.alpha1) * z2.powu(t.alpha2))
            .sum()
    };
    let affine = (op.order() <= 1 && terms.iter().all(|t| t.alpha1 + t.alpha2 <= 1)).then(|| {
        let mut form = AffineForm {
            c0: Complex64::new(0.0, 0.0),
            p1: Complex64::new(0.0, 0.0),
            p2: Complex64::new(0.0, 0.0),
        };
        for t in &terms {
            match (t.alpha1, t.alpha2) {
                (0, 0) => form.c0 += t.coeff(),
                (1, 0) => {
                    form.c0 += t.coeff() * l1;
                    form.p1 += t.coeff() * Complex64::new(0.0, TWO_PI);
                }
                _ => {
                    form.c0 += t.coeff() * l2;
                    form.p2 += t.coeff() * Complex64::new(0.0, TWO_PI);
                }
            }
        }
        form
    });
    Symbol {
        eval: Arc::new(eval),
        descriptor: SymbolDescriptor::Differential {
            operator: op.to_string(),
            h: *h,
        },
        affine,
        zeros: None,
    }
}

/// Symbol of `P = ∂₁ + c∂₂`, `c = a + ib`, in its real/imaginary split
/// `σ_P(ξ) = (log(h₁h₂^a) − 2πbξ₂) + i(b log h₂ + 2π(ξ₁ + aξ₂))`.
#[allow(non_snake_case)]
pub fn symbol_constant_P(c: Complex64, h: &BoundaryParams) -> Result<Symbol> {
    if c == Complex64::new(0.0, 0.0) {
        return Err(invalid("c", "the transport coefficient must be nonzero"));
    }
    let (l1, l2) = h.logs();
    let (a, b) = (c.re, c.im);
    let re0 = l1 + a * l2;
    let im0 = b * l2;
    let eval = move |xi: FreqIndex| {
        let (x1, x2) = (xi.xi1 as f64, xi.xi2 as f64);
        Complex64::new(re0 - TWO_PI * b * x2, im0 + TWO_PI * (x1 + a * x2))
    };
    Ok(Symbol {
        eval: Arc::new(eval),
        descriptor: SymbolDescriptor::ConstantP { c_re: a, c_im: b, h: *h },
        affine: Some(AffineForm {
            c0: Complex64::new(re0, im0),
            p1: Complex64::new(0.0, TWO_PI),
            p2: Complex64::new(-TWO_PI * b, TWO_PI * a),
        }),
        zeros: None,
    })
}

/// `(Af)^(ξ) = σ(ξ) f̂(ξ)`.
pub fn apply_multiplier(s: &Symbol, c: &SpectralField) -> SpectralField {
    c.map(|xi, v| s.eval(xi) * v)
}

/// Pointwise conjugate `conj(σ)`, the symbol of the adjoint as an
/// L*-multiplier.
pub fn adjoint_symbol(s: &Symbol) -> Symbol {
    let inner = s.eval.clone();
    let descriptor = match &s.descriptor {
        SymbolDescriptor::Adjoint { of } => (**of).clone(),
        d => SymbolDescriptor::Adjoint { of: Box::new(d.clone()) },
    };
    Symbol {
        eval: Arc::new(move |xi| inner(xi).conj()),
        descriptor,
        affine: s.affine.map(|a| AffineForm {
            c0: a.c0.conj(),
            p1: a.p1.conj(),
            p2: a.p2.conj(),
        }),
        zeros: s.zeros.clone(),
    }
}

struct ShorthandParser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> ShorthandParser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("operator `{}` at column {}: {msg}", self.src, self.pos + 1))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<OperatorSpec> {
        let mut terms = Vec::new();
        let mut sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        loop {
            let mut t = self.term()?;
            t.re *= sign;
            t.im *= sign;
            terms.push(t);
            match self.peek() {
                None => break,
                Some('+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                Some(_) => return Err(self.err("expected `+` or `-`")),
            }
        }
        if terms.is_empty() {
            return Err(self.err("empty operator"));
        }
        Ok(OperatorSpec::new(terms))
    }

    fn term(&mut self) -> Result<Term> {
        let coeff = match self.peek() {
            Some('d') => Complex64::new(1.0, 0.0),
            Some('(') => {
                self.pos += 1;
                let c = self.complex()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                c
            }
            Some(c) if c.is_ascii_digit() || c == '.' || c == 'i' => self.imag_or_real()?,
            _ => return Err(self.err("expected a coefficient or `d1`/`d2`")),
        };
        self.eat('*');
        let (mut a1, mut a2) = (0u32, 0u32);
        let mut any = false;
        while self.peek() == Some('d') {
            self.pos += 1;
            let axis = match self.chars.get(self.pos) {
                Some('1') => 1,
                Some('2') => 2,
                _ => return Err(self.err("expected `d1` or `d2`")),
            };
            self.pos += 1;
            let mut p = 1u32;
            if self.eat('^') {
                self.skip_ws();
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                p = s.parse().map_err(|_| self.err("expected an integer exponent"))?;
            }
            if axis == 1 {
                a1 += p;
            } else {
                a2 += p;
            }
            any = true;
            self.eat('*');
        }
        if !any && self.peek().is_some_and(|c| c != '+' && c != '-') {
            return Err(self.err("unexpected input after coefficient"));
        }
        Ok(Term::new(a1, a2, coeff))
    }

    fn number(&mut self) -> Option<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            let exp_sign = (c == '-' || c == '+')
                && self.pos > start
                && matches!(self.chars[self.pos - 1], 'e' | 'E');
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        if s.is_empty() {
            return None;
        }
        match s.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = start;
                None
            }
        }
    }

    /// `number`, `number i`, or bare `i`.
    fn imag_or_real(&mut self) -> Result<Complex64> {
        let v = self.number();
        if self.chars.get(self.pos) == Some(&'i') {
            self.pos += 1;
            return Ok(Complex64::new(0.0, v.unwrap_or(1.0)));
        }
        v.map(|v| Complex64::new(v, 0.0)).ok_or_else(|| self.err("expected a number"))
    }

    /// `[sign] part ([+-] part)*` inside parentheses.
    fn complex(&mut self) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        loop {
            total += self.imag_or_real()? * sign;
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                _ => return Ok(total),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{eigenvalue_2d, eval_u};
    use crate::random::random_spectral_field;
    use crate::transforms::{analyze, analyze_star, synthesize, Basis, GridField, GridSpec};
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_symbol_examples() {
        let t = BoundaryParams::torus();
        let d1 = diff_symbol(&OperatorSpec::partial(0), &t);
        assert!((d1.eval(FreqIndex::new(3, 7)) - c(0.0, TWO_PI * 3.0)).norm() < 1e-13);
        let op = OperatorSpec::first_order(c(0.0, 1.0)).unwrap();
        let s = diff_symbol(&op, &t).eval(FreqIndex::new(3, 4));
        assert!((s - c(-8.0 * PI, 6.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn laplacian_symbol_is_eigenvalue() {
        let h = BoundaryParams::new(0.3, 4.5).unwrap();
        let s = diff_symbol(&OperatorSpec::laplacian(), &h);
        for a in -6..=6 {
            for b in -6..=6 {
                let xi = FreqIndex::new(a, b);
                let l = eigenvalue_2d(&h, xi);
                assert!((s.eval(xi) - l).norm() <= 1e-13 * l.norm().max(1.0));
            }
        }
    }

    #[test]
    fn constant_p_examples() {
        let t = BoundaryParams::torus();
        let s = symbol_constant_P(c(0.0, 1.0), &t).unwrap();
        assert_eq!(s.eval(FreqIndex::new(2, 3)), c(-TWO_PI * 3.0, TWO_PI * 2.0));
        let he = BoundaryParams::new(E, E).unwrap();
        let s = symbol_constant_P(c(-1.0, 0.0), &he).unwrap();
        for k in -5..=5 {
            assert_eq!(s.eval(FreqIndex::new(k, k)), c(0.0, 0.0));
        }
        assert!((s.eval(FreqIndex::new(3, 1)) - c(0.0, TWO_PI * 2.0)).norm() < 1e-13);
        let a = 2f64.sqrt();
        let s = symbol_constant_P(c(a, 0.0), &t).unwrap();
        assert!((s.eval(FreqIndex::new(4, -3)) - c(0.0, TWO_PI * (4.0 - 3.0 * a))).norm() < 1e-13);
        assert!(symbol_constant_P(c(0.0, 0.0), &t).is_err());
    }

    #[test]
    fn constant_p_matches_general_symbol() {
        let mut r = crate::random::rng(42);
        for _ in 0..20 {
            let cc = crate::random::random_complex(&mut r) * 3.0;
            let h = BoundaryParams::new(
                (crate::random::random_complex(&mut r).re * 2.0).exp(),
                (crate::random::random_complex(&mut r).re * 2.0).exp(),
            )
            .unwrap();
            let split = symbol_constant_P(cc, &h).unwrap();
            let general = diff_symbol(&OperatorSpec::first_order(cc).unwrap(), &h);
            for a in (-1000..=1000).step_by(97) {
                for b in (-1000..=1000).step_by(89) {
                    let xi = FreqIndex::new(a, b);
                    let (x, y) = (split.eval(xi), general.eval(xi));
                    assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()), "{xi:?}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn multiplier_examples() {
        let h = BoundaryParams::new(1.4, 0.6).unwrap();
        let one = Symbol::custom("one", |_| c(1.0, 0.0));
        let f = random_spectral_field(4, Basis::L, 1);
        assert_eq!(apply_multiplier(&one, &f), f);
        let eta = FreqIndex::new(2, -1);
        let s = diff_symbol(&OperatorSpec::laplacian(), &h);
        let d = SpectralField::delta(4, Basis::L, eta, c(1.0, 0.0)).unwrap();
        let out = apply_multiplier(&s, &d);
        for (xi, v) in out.iter() {
            let e = if xi == eta { s.eval(eta) } else { c(0.0, 0.0) };
            assert_eq!(v, e);
        }
    }

    /// Spectral `∂₁` of a closed-form band-limited field against the
    /// analytic derivative of each basis function.
    #[test]
    fn grid_differentiation_matches_closed_form() {
        let h = BoundaryParams::new(2.0, 0.5).unwrap();
        let spec = GridSpec::square(36).unwrap();
        let coeffs = random_spectral_field(5, Basis::L, 4);
        let f = synthesize(&coeffs, &h, spec);
        let s = diff_symbol(&OperatorSpec::partial(0), &h);
        let df = synthesize(&apply_multiplier(&s, &analyze(&f, &h, 5).unwrap()), &h, spec);
        let l1 = 2f64.ln();
        let exact = GridField::from_fn(spec, |x| {
            coeffs
                .iter()
                .map(|(xi, v)| v * derivative_factor(l1, xi.xi1) * eval_u(&h, xi, x))
                .sum()
        });
        assert!(df.max_diff(&exact) < 1e-8);
    }

    #[test]
    fn adjoint_examples() {
        let t = BoundaryParams::torus();
        let d1 = diff_symbol(&OperatorSpec::partial(0), &t);
        let adj = adjoint_symbol(&d1);
        assert!((adj.eval(FreqIndex::new(2, 0)) - c(0.0, -TWO_PI * 2.0)).norm() < 1e-13);
        let h = BoundaryParams::new(0.8, 2.2).unwrap();
        let lap = diff_symbol(&OperatorSpec::laplacian(), &h);
        let adj = adjoint_symbol(&lap);
        let twice = adjoint_symbol(&adj);
        assert_eq!(twice.descriptor(), lap.descriptor());
        for a in -5..=5 {
            for b in -5..=5 {
                let xi = FreqIndex::new(a, b);
                assert!((adj.eval(xi) - eigenvalue_2d(&h, xi.neg())).norm() <= 1e-12 * (1.0 + adj.eval(xi).norm()));
                assert_eq!(twice.eval(xi), lap.eval(xi));
                assert_eq!(adj.eval(xi).norm(), lap.eval(xi).norm());
            }
        }
    }

    /// `Σ (σ f̂)(ξ) conj(ĝ_*(ξ)) = Σ f̂(ξ) conj((conj σ · ĝ_*)(ξ))`, and the
    /// left side equals the grid pairing `(Af, g)`.
    #[test]
    fn adjoint_duality() {
        let h = BoundaryParams::new(1.8, 0.45).unwrap();
        let s = diff_symbol(&OperatorSpec::first_order(c(0.3, -1.1)).unwrap(), &h);
        let fh = random_spectral_field(6, Basis::L, 21);
        let gs = random_spectral_field(6, Basis::Lstar, 22);
        let lhs: Complex64 = apply_multiplier(&s, &fh).iter().zip(gs.iter()).map(|((_, a), (_, b))| a * b.conj()).sum();
        let rhs: Complex64 = fh
            .iter()
            .zip(apply_multiplier(&adjoint_symbol(&s), &gs).iter())
            .map(|((_, a), (_, b))| a * b.conj())
            .sum();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm());

        let spec = GridSpec::square(28).unwrap();
        let af = synthesize(&apply_multiplier(&s, &fh), &h, spec);
        let g = synthesize(&gs, &h, spec);
        let pairing: Complex64 = af.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum::<Complex64>()
            / spec.len() as f64;
        assert!((pairing - lhs).norm() < 1e-10 * lhs.norm());
        // The L*-coefficients of g are recovered by the star transform.
        assert!(analyze_star(&g, &h, 6).unwrap().max_diff(&gs).unwrap() < 1e-10);
    }

    #[test]
    fn shorthand_parsing() {
        let op = OperatorSpec::parse_shorthand("d1 + (0.5+1.2i) d2").unwrap();
        assert_eq!(op.as_first_order(), Some(c(0.5, 1.2)));
        let op = OperatorSpec::parse_shorthand("d1 - 2 d2").unwrap();
        assert_eq!(op.as_first_order(), Some(c(-2.0, 0.0)));
        let op = OperatorSpec::parse_shorthand("d1 + i d2").unwrap();
        assert_eq!(op.as_first_order(), Some(c(0.0, 1.0)));
        let op = OperatorSpec::parse_shorthand("d1^2 + d2^2").unwrap();
        assert_eq!(op, OperatorSpec::laplacian());
        let op = OperatorSpec::parse_shorthand("(1-2.5e-1i) d1 d2 - 3").unwrap();
        assert_eq!(op.terms[0], Term::new(1, 1, c(1.0, -0.25)));
        assert_eq!(op.terms[1], Term::new(0, 0, c(-3.0, 0.0)));
        assert!(OperatorSpec::parse_shorthand("d3").is_err());
        assert!(OperatorSpec::parse_shorthand("d1 +").is_err());
        assert!(OperatorSpec::parse_shorthand("(1+i d1").is_err());
    }

    #[test]
    fn json_terms() {
        let op = OperatorSpec::from_json(r#"[{"alpha1":1,"alpha2":0,"re":1,"im":0},{"alpha1":0,"alpha2":1,"re":0,"im":1}]"#).unwrap();
        assert_eq!(op.as_first_order(), Some(c(0.0, 1.0)));
        assert!(OperatorSpec::from_json(r#"[{"alpha1":1}]"#).is_err());
    }

    proptest! {
        #[test]
        fn scaling_keeps_moduli_ratio(re in -3.0f64..3.0, im in -3.0f64..3.0, a in -100i64..100, b in -100i64..100) {
            let k = c(re, im);
            let s = symbol_constant_P(c(0.7, 0.2), &BoundaryParams::new(1.3, 0.9).unwrap()).unwrap();
            let xi = FreqIndex::new(a, b);
            let ss = s.scaled(k);
            prop_assert!((ss.eval(xi) - s.eval(xi) * k).norm() <= 1e-12 * (1.0 + ss.eval(xi).norm()));
            let af = ss.affine_form().unwrap();
            let via_affine = af.c0 + af.p1 * a as f64 + af.p2 * b as f64;
            prop_assert!((via_affine - ss.eval(xi)).norm() <= 1e-10 * (1.0 + ss.eval(xi).norm()));
        }
    }
}
