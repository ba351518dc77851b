//! Continued fractions and Liouville-type approximation exponents.
//!
//! Floats are expanded through their exact dyadic value, so every partial
//! quotient is exact for the input actually supplied; the input precision
//! only decides how far that expansion says something about the real number
//! the float stands for.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The expansion of the exact input ended.
    Exact,
    /// A convergent matches the input to within its precision while sitting
    /// far above the noise floor `1/q²`.
    NearRational,
    /// The next convergent would have `q² > 1/precision`.
    PrecisionExhausted,
    DepthReached,
}

fn ser_big<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_bigs<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn ser_pairs<S: Serializer>(v: &[(BigInt, BigInt)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(p, q)| [p.to_string(), q.to_string()]))
}

/// `x = [a₀; a₁, …, a_d]` with convergents `p_n / q_n`, `n = 0..=d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuedFraction {
    #[serde(serialize_with = "ser_big")]
    pub a0: BigInt,
    #[serde(serialize_with = "ser_bigs")]
    pub quotients: Vec<BigInt>,
    #[serde(serialize_with = "ser_pairs")]
    pub convergents: Vec<(BigInt, BigInt)>,
    pub termination: Termination,
    /// Absolute precision of the input; zero for exact rationals.
    pub precision: f64,
}

impl ContinuedFraction {
    pub fn is_rational(&self) -> bool {
        matches!(self.termination, Termination::Exact | Termination::NearRational)
    }

    pub fn convergent(&self, n: usize) -> Option<BigRational> {
        self.convergents
            .get(n)
            .map(|(p, q)| BigRational::new(p.clone(), q.clone()))
    }
}

/// Lazy expansion yielding `(a_n, p_n, q_n)`.
struct Expansion {
    x: BigRational,
    num: BigInt,
    den: BigInt,
    prev: (BigInt, BigInt),
    cur: (BigInt, BigInt),
    eps: f64,
    inv_eps: Option<BigInt>,
    done: Option<Termination>,
}

impl Expansion {
    fn new(x: BigRational, eps: f64) -> Self {
        let inv_eps = (eps > 0.0).then(|| {
            let r = BigRational::from_float(1.0 / eps).expect("finite precision");
            r.to_integer()
        });
        Self {
            num: x.numer().clone(),
            den: x.denom().clone(),
            x,
            prev: (BigInt::zero(), BigInt::one()),
            cur: (BigInt::one(), BigInt::zero()),
            eps,
            inv_eps,
            done: None,
        }
    }

    fn next(&mut self) -> Option<(BigInt, BigInt, BigInt)> {
        if self.done.is_some() {
            return None;
        }
        let (a, rem) = self.num.div_mod_floor(&self.den);
        let p = &a * &self.cur.0 + &self.prev.0;
        let q = &a * &self.cur.1 + &self.prev.1;
        if let Some(inv) = &self.inv_eps {
            if &q * &q > *inv {
                self.done = Some(Termination::PrecisionExhausted);
                return None;
            }
        }
        self.prev = std::mem::replace(&mut self.cur, (p.clone(), q.clone()));
        self.num = std::mem::replace(&mut self.den, rem);
        if self.den.is_zero() {
            self.done = Some(Termination::Exact);
        } else if self.eps > 0.0 {
            let dist = (&self.x - BigRational::new(p.clone(), q.clone())).abs();
            let qf = q.to_f64().unwrap_or(f64::INFINITY);
            if dist.to_f64().unwrap_or(f64::INFINITY) <= self.eps && qf * qf * self.eps <= 1e-3 {
                self.done = Some(Termination::NearRational);
            }
        }
        Some((a, p, q))
    }
}

/// Absolute precision of a float input: half an ulp at its magnitude.
fn float_precision(x: f64) -> f64 {
    x.abs().max(f64::MIN_POSITIVE) * f64::EPSILON / 2.0
}

fn exact_value(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| invalid("x", format!("expected a finite number, got {x}")))
}

fn expand(x: BigRational, eps: f64, depth: usize) -> ContinuedFraction {
    let mut e = Expansion::new(x, eps);
    let mut quotients = Vec::new();
    let mut convergents = Vec::new();
    let mut a0 = BigInt::zero();
    while convergents.len() <= depth {
        match e.next() {
            Some((a, p, q)) => {
                if convergents.is_empty() {
                    a0 = a;
                } else {
                    quotients.push(a);
                }
                convergents.push((p, q));
            }
            None => break,
        }
    }
    ContinuedFraction {
        a0,
        quotients,
        convergents,
        termination: e.done.unwrap_or(Termination::DepthReached),
        precision: eps,
    }
}

/// Continued fraction of a float with up to `depth` partial quotients.
pub fn continued_fraction(x: f64, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(invalid("depth", "need at least one partial quotient"));
    }
    Ok(expand(exact_value(x)?, float_precision(x), depth))
}

/// Continued fraction of an exact rational.
pub fn continued_fraction_exact(x: &BigRational, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(invalid("depth", "need at least one partial quotient"));
    }
    Ok(expand(x.clone(), 0.0, depth))
}

/// Natural logarithm of a positive big integer.
pub(crate) fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().expect("64-bit").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational.
pub(crate) fn ln_rational(r: &BigRational) -> f64 {
    ln_big(r.numer()) - ln_big(r.denom())
}

/// Parses a decimal literal such as `-1.25e-3` into the rational it denotes.
pub fn parse_decimal_exact(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("not a decimal number: `{s}`"));
    let t = s.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all = format!("{int}{frac}");
    let n: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| err())? };
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    let mut r = if scale >= 0 {
        BigRational::from_integer(n * pow)
    } else {
        BigRational::new(n, pow)
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiophantineStatus {
    /// No convergent with `q ≤ Q_max` reproduces the input.
    Irrational,
    Rational,
    /// The input precision ran out before `Q_max` was reached.
    PrecisionExhausted,
}

/// Approximation quality at a single denominator `q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentRecord {
    pub q: u64,
    pub p: String,
    /// `ln dist(q x, ℤ)`.
    pub ln_dist: f64,
    /// `μ(q) = −ln dist(qx, ℤ) / ln q`.
    pub mu: f64,
    /// `n(q) = −ln |x − p/q| / ln q = μ(q) + 1`, the exponent in
    /// `|x − p/q| < q^{−n}`.
    pub exponent: f64,
    /// Running maximum of `exponent` over the records so far.
    pub running_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrrationalityReport {
    pub q_max: u64,
    pub threshold: f64,
    pub status: DiophantineStatus,
    pub termination: Termination,
    /// Denominators inspected: all convergents `2 ≤ q_n ≤ Q_max` plus every
    /// `2 ≤ q ≤ 16`.
    pub records: Vec<ExponentRecord>,
    pub best_q: u64,
    pub max_mu: f64,
    pub max_exponent: f64,
    /// `max_exponent ≥ threshold` for an input not flagged rational. Evidence
    /// only: a finite depth never proves the Liouville property.
    pub liouville_evidence: bool,
}

const SMALL_Q: u64 = 16;

fn evidence(x: BigRational, eps: f64, q_max: u64, threshold: f64) -> Result<IrrationalityReport> {
    if q_max < 2 {
        return Err(invalid("q_max", "need Q_max ≥ 2"));
    }
    let qmax_big = BigInt::from(q_max);
    let mut e = Expansion::new(x.clone(), eps);
    let mut qs: Vec<u64> = (2..=q_max.min(SMALL_Q)).collect();
    let mut beyond = false;
    while let Some((_, _, q)) = e.next() {
        if q > qmax_big {
            beyond = true;
            break;
        }
        if q >= BigInt::from(2) {
            qs.push(q.to_u64().expect("bounded by q_max"));
        }
    }
    let termination = if beyond {
        Termination::DepthReached
    } else {
        e.done.unwrap_or(Termination::DepthReached)
    };
    let status = match termination {
        Termination::Exact | Termination::NearRational => DiophantineStatus::Rational,
        Termination::PrecisionExhausted => DiophantineStatus::PrecisionExhausted,
        _ => DiophantineStatus::Irrational,
    };
    qs.sort_unstable();
    qs.dedup();

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut records: Vec<ExponentRecord> = Vec::new();
    let mut running = f64::NEG_INFINITY;
    let (mut best_q, mut max_mu) = (0, f64::NEG_INFINITY);
    for q in qs {
        let qx = &x * BigRational::from_integer(BigInt::from(q));
        let p = (&qx + &half).floor().to_integer();
        let dist = (qx - BigRational::from_integer(p.clone())).abs();
        if dist.is_zero() {
            continue;
        }
        let ln_dist = ln_rational(&dist);
        let lq = (q as f64).ln();
        let mu = -ln_dist / lq;
        let exponent = mu + 1.0;
        if exponent > running {
            running = exponent;
            best_q = q;
            max_mu = mu;
        }
        records.push(ExponentRecord {
            q,
            p: p.to_string(),
            ln_dist,
            mu,
            exponent,
            running_max: running,
        });
    }
    let liouville_evidence = status != DiophantineStatus::Rational && running >= threshold;
    Ok(IrrationalityReport {
        q_max,
        threshold,
        status,
        termination,
        records,
        best_q,
        max_mu,
        max_exponent: running,
        liouville_evidence,
    })
}

/// Running approximation exponent of a float up to denominator `Q_max`.
pub fn liouville_evidence(x: f64, q_max: u64, threshold: f64) -> Result<IrrationalityReport> {
    evidence(exact_value(x)?, float_precision(x), q_max, threshold)
}

/// As [`liouville_evidence`] for an exactly known rational input.
pub fn liouville_evidence_exact(x: &BigRational, q_max: u64, threshold: f64) -> Result<IrrationalityReport> {
    evidence(x.clone(), 0.0, q_max, threshold)
}

/// `min_{1≤q≤Q} q·dist(qx, ℤ)` by direct enumeration in floating point.
pub fn min_scaled_distance_brute(x: f64, q_max: u64) -> (u64, f64) {
    let mut best = (0, f64::INFINITY);
    for q in 1..=q_max {
        let qx = q as f64 * x;
        let v = q as f64 * (qx - qx.round()).abs();
        if v < best.1 {
            best = (q, v);
        }
    }
    best
}

/// The same minimum restricted to convergent denominators, which is where
/// every best approximation occurs.
pub fn min_scaled_distance_cf(x: f64, q_max: u64) -> Result<(u64, f64)> {
    let r = exact_value(x)?;
    let mut e = Expansion::new(r.clone(), float_precision(x));
    let qmax_big = BigInt::from(q_max);
    let mut best = (0, f64::INFINITY);
    let mut reached = false;
    while let Some((_, p, q)) = e.next() {
        if q > qmax_big {
            reached = true;
            break;
        }
        let scaled = (&r * BigRational::from_integer(q.clone()) - BigRational::from_integer(p)).abs()
            * BigRational::from_integer(q.clone());
        let v = scaled.to_f64().unwrap_or(f64::INFINITY);
        let qu = q.to_u64().expect("bounded by q_max");
        if v < best.1 && qu >= 1 {
            best = (qu, v);
        }
    }
    if !reached && e.done == Some(Termination::PrecisionExhausted) {
        return Err(Error::Resolution(format!(
            "float precision exhausted before denominator {q_max}"
        )));
    }
    Ok(best)
}
