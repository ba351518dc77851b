//! L- and L*-Fourier transforms on the uniform grid of `[0,1)²`.
//!
//! For `f` satisfying the boundary conditions, `f·h^{-x}` is 1-periodic, so
//! the quadrature `∫ f conj(v_ξ)` reduces to a plain DFT of the weighted
//! samples. Synthesis is the pointwise sum over kept modes, evaluated as an
//! inverse DFT followed by multiplication with `h^{±x}`.

mod decay;
mod fft;
mod frame;
mod norms;

pub use decay::{decay_classify, decay_classify_samples, DecayClass, DecayOptions, DecayReport};
pub use frame::{frame_bounds, FrameBounds};
pub use norms::{derivative_norms_1d, pk_seminorm, sobolev_seminorm};

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::eigenbasis::{BoundaryParams, FreqIndex};
use crate::error::{Error, Result};
use fft::{dft_axis, slot};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Which expansion a coefficient array belongs to: `f = Σ f̂ u_ξ` (`L`) or
/// `f = Σ f̂_* v_ξ` (`Lstar`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    L,
    Lstar,
}

impl Basis {
    /// Sign of the exponent in the analysis weight `h^{∓x}`.
    fn analysis_sign(self) -> f64 {
        match self {
            Basis::L => -1.0,
            Basis::Lstar => 1.0,
        }
    }
}

/// Coordinate axis of the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Axis::X1 => "x1",
            Axis::X2 => "x2",
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::X1 => Axis::X2,
            Axis::X2 => Axis::X1,
        }
    }
}

/// Uniform grid with nodes `x_k = (k₁/n1, k₂/n2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
}

impl GridSpec {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 4 || n2 < 4 {
            return Err(crate::error::invalid("grid", format!("need n1, n2 >= 4, got {n1}x{n2}")));
        }
        Ok(Self { n1, n2 })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// Default alias-free grid `n = 4K + 4` for truncation `K`.
    pub fn for_truncation(k: usize) -> Self {
        Self {
            n1: 4 * k + 4,
            n2: 4 * k + 4,
        }
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self, axis: Axis) -> usize {
        match axis {
            Axis::X1 => self.n1,
            Axis::X2 => self.n2,
        }
    }

    pub fn node(&self, k1: usize, k2: usize) -> (f64, f64) {
        (k1 as f64 / self.n1 as f64, k2 as f64 / self.n2 as f64)
    }

    /// Largest truncation the grid resolves without aliasing.
    pub fn max_truncation(&self) -> usize {
        (self.n1.min(self.n2) - 1) / 2
    }

    pub fn check_alias(&self, axis: Axis, k: usize) -> Result<()> {
        let n = self.dim(axis);
        if n <= 2 * k {
            return Err(Error::Aliasing { axis: axis.name(), n, k });
        }
        Ok(())
    }
}

/// Complex samples on a [`GridSpec`], row-major with `x₁` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Shape(format!(
                "{} samples for a {}x{} grid",
                values.len(),
                spec.n1,
                spec.n2
            )));
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            values: vec![ZERO; spec.len()],
        }
    }

    pub fn from_fn(spec: GridSpec, mut f: impl FnMut((f64, f64)) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(spec.len());
        for k1 in 0..spec.n1 {
            for k2 in 0..spec.n2 {
                values.push(f(spec.node(k1, k2)));
            }
        }
        Self { spec, values }
    }

    pub fn get(&self, k1: usize, k2: usize) -> Complex64 {
        self.values[k1 * self.spec.n2 + k2]
    }

    /// Discrete `L²` norm `(mean |f|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_k |self_k - other_k|`.
    pub fn max_diff(&self, other: &GridField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Discrete `L²` norm of the difference.
    pub fn l2_diff(&self, other: &GridField) -> f64 {
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        (s / self.values.len() as f64).sqrt()
    }

    pub fn map(&self, mut f: impl FnMut((f64, f64), Complex64) -> Complex64) -> GridField {
        let spec = self.spec;
        let mut out = self.clone();
        for k1 in 0..spec.n1 {
            for k2 in 0..spec.n2 {
                let i = k1 * spec.n2 + k2;
                out.values[i] = f(spec.node(k1, k2), self.values[i]);
            }
        }
        out
    }

    pub fn zip_with(&self, other: &GridField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<GridField> {
        if self.spec != other.spec {
            return Err(Error::Shape("grid specs differ".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(GridField { spec: self.spec, values })
    }
}

/// Truncated coefficients `{ f̂(ξ) : |ξ₁|, |ξ₂| ≤ K }`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    trunc: usize,
    basis: Basis,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(trunc: usize, basis: Basis) -> Self {
        let side = 2 * trunc + 1;
        Self {
            trunc,
            basis,
            coeffs: vec![ZERO; side * side],
        }
    }

    pub fn from_fn(trunc: usize, basis: Basis, mut f: impl FnMut(FreqIndex) -> Complex64) -> Self {
        let mut out = Self::zeros(trunc, basis);
        let k = trunc as i64;
        for a in -k..=k {
            for b in -k..=k {
                let xi = FreqIndex::new(a, b);
                let i = out.index(xi);
                out.coeffs[i] = f(xi);
            }
        }
        out
    }

    pub fn from_coeffs(trunc: usize, basis: Basis, coeffs: Vec<Complex64>) -> Result<Self> {
        let side = 2 * trunc + 1;
        if coeffs.len() != side * side {
            return Err(Error::Shape(format!(
                "{} coefficients for truncation K={trunc} (need {})",
                coeffs.len(),
                side * side
            )));
        }
        Ok(Self { trunc, basis, coeffs })
    }

    /// Single mode `δ_η` scaled by `value`.
    pub fn delta(trunc: usize, basis: Basis, eta: FreqIndex, value: Complex64) -> Result<Self> {
        let mut out = Self::zeros(trunc, basis);
        out.set(eta, value)?;
        Ok(out)
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn contains(&self, xi: FreqIndex) -> bool {
        xi.sup_norm() <= self.trunc as i64
    }

    fn index(&self, xi: FreqIndex) -> usize {
        let k = self.trunc as i64;
        let side = 2 * k + 1;
        ((xi.xi1 + k) * side + (xi.xi2 + k)) as usize
    }

    pub fn get(&self, xi: FreqIndex) -> Option<Complex64> {
        self.contains(xi).then(|| self.coeffs[self.index(xi)])
    }

    pub fn set(&mut self, xi: FreqIndex, value: Complex64) -> Result<()> {
        if !self.contains(xi) {
            return Err(Error::Shape(format!(
                "frequency ({}, {}) outside truncation K={}",
                xi.xi1, xi.xi2, self.trunc
            )));
        }
        let i = self.index(xi);
        self.coeffs[i] = value;
        Ok(())
    }

    /// Iterates `(ξ, f̂(ξ))` in lexicographic order of `(ξ₁, ξ₂)`.
    pub fn iter(&self) -> impl Iterator<Item = (FreqIndex, Complex64)> + '_ {
        let k = self.trunc as i64;
        let side = (2 * k + 1) as usize;
        self.coeffs.iter().enumerate().map(move |(i, c)| {
            let a = (i / side) as i64 - k;
            let b = (i % side) as i64 - k;
            (FreqIndex::new(a, b), *c)
        })
    }

    pub fn map(&self, mut f: impl FnMut(FreqIndex, Complex64) -> Complex64) -> SpectralField {
        let coeffs = self.iter().map(|(xi, c)| f(xi, c)).collect();
        SpectralField {
            trunc: self.trunc,
            basis: self.basis,
            coeffs,
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &SpectralField) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::Shape(format!(
                "truncations differ: K={} vs K={}",
                self.trunc, other.trunc
            )));
        }
        Ok(())
    }
}

/// Partial coefficients: grid samples in the retained variable × frequencies
/// in the transformed one, e.g. `ℱ₂f(x₁, ξ₂)` for `axis = X2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialField {
    axis: Axis,
    basis: Basis,
    trunc: usize,
    spec: GridSpec,
    data: Vec<Complex64>,
}

impl PartialField {
    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Grid the field was sampled on.
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    fn side(&self) -> usize {
        2 * self.trunc + 1
    }

    /// Value at retained grid index `r` and transformed frequency `xi`.
    pub fn get(&self, r: usize, xi: i64) -> Complex64 {
        let k = self.trunc as i64;
        assert!(xi.abs() <= k, "frequency {xi} outside truncation {k}");
        self.data[r * self.side() + (xi + k) as usize]
    }

    pub fn get_mut(&mut self, r: usize, xi: i64) -> &mut Complex64 {
        let k = self.trunc as i64;
        assert!(xi.abs() <= k, "frequency {xi} outside truncation {k}");
        let side = self.side();
        &mut self.data[r * side + (xi + k) as usize]
    }

    /// Samples of the column `r ↦ ℱf(r, xi)` along the retained axis.
    pub fn column(&self, xi: i64) -> Vec<Complex64> {
        let n = self.spec.dim(self.axis.other());
        (0..n).map(|r| self.get(r, xi)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn weighted(f: &GridField, logs: (f64, f64), sign: f64, axes: [bool; 2]) -> Vec<Complex64> {
    let spec = f.spec;
    let mut out = f.values.clone();
    for k1 in 0..spec.n1 {
        for k2 in 0..spec.n2 {
            let (x1, x2) = spec.node(k1, k2);
            let mut e = 0.0;
            if axes[0] {
                e += logs.0 * x1;
            }
            if axes[1] {
                e += logs.1 * x2;
            }
            out[k1 * spec.n2 + k2] *= (sign * e).exp();
        }
    }
    out
}

fn analyze_with(f: &GridField, h: &BoundaryParams, k: usize, basis: Basis) -> Result<SpectralField> {
    let spec = f.spec;
    spec.check_alias(Axis::X1, k)?;
    spec.check_alias(Axis::X2, k)?;
    let mut g = weighted(f, h.logs(), basis.analysis_sign(), [true, true]);
    dft_axis(&mut g, spec.n1, spec.n2, 1, FftDirection::Forward);
    dft_axis(&mut g, spec.n1, spec.n2, 0, FftDirection::Forward);
    let scale = 1.0 / spec.len() as f64;
    Ok(SpectralField::from_fn(k, basis, |xi| {
        g[slot(xi.xi1, spec.n1) * spec.n2 + slot(xi.xi2, spec.n2)] * scale
    }))
}

/// `f̂(ξ) = (f, v_ξ)` for `|ξ_j| ≤ K`, by DFT of `f·h^{-x}`.
pub fn analyze(f: &GridField, h: &BoundaryParams, k: usize) -> Result<SpectralField> {
    analyze_with(f, h, k, Basis::L)
}

/// `f̂_*(ξ) = (f, u_ξ)` for `|ξ_j| ≤ K`, by DFT of `f·h^{+x}`.
pub fn analyze_star(f: &GridField, h: &BoundaryParams, k: usize) -> Result<SpectralField> {
    analyze_with(f, h, k, Basis::Lstar)
}

/// Analyze in the basis given by the tag.
pub fn analyze_in(f: &GridField, h: &BoundaryParams, k: usize, basis: Basis) -> Result<SpectralField> {
    analyze_with(f, h, k, basis)
}

/// `f(x) = Σ f̂(ξ) u_ξ(x)` (or `Σ f̂_*(ξ) v_ξ(x)` for the `Lstar` tag) on
/// the nodes of `spec`. Modes sharing a grid slot are accumulated, so the
/// pointwise sum is exact even on coarse grids.
pub fn synthesize(c: &SpectralField, h: &BoundaryParams, spec: GridSpec) -> GridField {
    let mut g = vec![ZERO; spec.len()];
    for (xi, v) in c.iter() {
        g[slot(xi.xi1, spec.n1) * spec.n2 + slot(xi.xi2, spec.n2)] += v;
    }
    dft_axis(&mut g, spec.n1, spec.n2, 1, FftDirection::Inverse);
    dft_axis(&mut g, spec.n1, spec.n2, 0, FftDirection::Inverse);
    let field = GridField { spec, values: g };
    let values = weighted(&field, h.logs(), -c.basis().analysis_sign(), [true, true]);
    GridField { spec, values }
}

fn transform_along(
    values: &[Complex64],
    spec: GridSpec,
    axis: Axis,
    log_h: f64,
    sign: f64,
    k: usize,
) -> Vec<Complex64> {
    let mut g = values.to_vec();
    let mut axes = [false, false];
    axes[axis.index()] = true;
    let logs = if axis == Axis::X1 { (log_h, 0.0) } else { (0.0, log_h) };
    let tmp = GridField { spec, values: g };
    g = weighted(&tmp, logs, sign, axes);
    dft_axis(&mut g, spec.n1, spec.n2, axis.index(), FftDirection::Forward);
    let n = spec.dim(axis);
    let n_ret = spec.dim(axis.other());
    let side = 2 * k + 1;
    let scale = 1.0 / n as f64;
    let ki = k as i64;
    let mut data = vec![ZERO; n_ret * side];
    for r in 0..n_ret {
        for xi in -ki..=ki {
            let s = slot(xi, n);
            let v = match axis {
                Axis::X1 => g[s * spec.n2 + r],
                Axis::X2 => g[r * spec.n2 + s],
            };
            data[r * side + (xi + ki) as usize] = v * scale;
        }
    }
    data
}

/// Partial transform in `axis`: `ℱ_j f` (`L`) or `ℱ*_j f` (`Lstar`).
pub fn partial_analyze(
    f: &GridField,
    h: &BoundaryParams,
    axis: Axis,
    k_axis: usize,
    basis: Basis,
) -> Result<PartialField> {
    f.spec.check_alias(axis, k_axis)?;
    let log_h = h.get(axis.index()).ln();
    let data = transform_along(&f.values, f.spec, axis, log_h, basis.analysis_sign(), k_axis);
    Ok(PartialField {
        axis,
        basis,
        trunc: k_axis,
        spec: f.spec,
        data,
    })
}

/// `f = Σ ℱ_j f(·, ξ_j) u_{ξ_j}` (or with `v_{ξ_j}` for `Lstar`).
pub fn partial_synthesize(p: &PartialField, h: &BoundaryParams) -> GridField {
    let spec = p.spec;
    let axis = p.axis;
    let n = spec.dim(axis);
    let n_ret = spec.dim(axis.other());
    let ki = p.trunc as i64;
    let mut g = vec![ZERO; spec.len()];
    for r in 0..n_ret {
        for xi in -ki..=ki {
            let s = slot(xi, n);
            let idx = match axis {
                Axis::X1 => s * spec.n2 + r,
                Axis::X2 => r * spec.n2 + s,
            };
            g[idx] += p.get(r, xi);
        }
    }
    dft_axis(&mut g, spec.n1, spec.n2, axis.index(), FftDirection::Inverse);
    let log_h = h.get(axis.index()).ln();
    let mut axes = [false, false];
    axes[axis.index()] = true;
    let logs = if axis == Axis::X1 { (log_h, 0.0) } else { (0.0, log_h) };
    let tmp = GridField { spec, values: g };
    let values = weighted(&tmp, logs, -p.basis.analysis_sign(), axes);
    GridField { spec, values }
}

/// Completes a partial transform by transforming the retained variable,
/// giving the full coefficients: `f̂(ξ₁, ξ₂) = ∫ ℱ₂f(x₁, ξ₂) conj(v_{ξ₁}(x₁)) dx₁`.
pub fn analyze_retained(p: &PartialField, h: &BoundaryParams, k: usize) -> Result<SpectralField> {
    if k != p.trunc {
        return Err(Error::Shape(format!(
            "square truncation needs K={} in both variables, got K={k}",
            p.trunc
        )));
    }
    let retained = p.axis.other();
    p.spec.check_alias(retained, k)?;
    let n_ret = p.spec.dim(retained);
    let side = p.side();
    // Lay the partial data out as an (n_ret × side) grid along the retained axis.
    let tmp_spec = match retained {
        Axis::X1 => GridSpec { n1: n_ret, n2: side },
        Axis::X2 => GridSpec { n1: side, n2: n_ret },
    };
    let mut vals = vec![ZERO; tmp_spec.len()];
    for r in 0..n_ret {
        for j in 0..side {
            let v = p.data[r * side + j];
            match retained {
                Axis::X1 => vals[r * side + j] = v,
                Axis::X2 => vals[j * n_ret + r] = v,
            }
        }
    }
    let log_h = h.get(retained.index()).ln();
    let data = transform_along(&vals, tmp_spec, retained, log_h, p.basis.analysis_sign(), k);
    // `data` is indexed [j (transformed-axis frequency slot) * side + ξ_retained].
    let ki = k as i64;
    Ok(SpectralField::from_fn(k, p.basis, |xi| {
        let (ret_xi, tr_xi) = match retained {
            Axis::X1 => (xi.xi1, xi.xi2),
            Axis::X2 => (xi.xi2, xi.xi1),
        };
        data[(tr_xi + ki) as usize * side + (ret_xi + ki) as usize]
    }))
}

/// Spectral differentiation `∂₁^{α₁}∂₂^{α₂} f` of a field with band `K`.
pub fn differentiate(f: &GridField, h: &BoundaryParams, k: usize, alpha: (u32, u32)) -> Result<GridField> {
    let (l1, l2) = h.logs();
    let c = analyze(f, h, k)?;
    let d = c.map(|xi, v| {
        v * crate::eigenbasis::derivative_factor(l1, xi.xi1).powu(alpha.0)
            * crate::eigenbasis::derivative_factor(l2, xi.xi2).powu(alpha.1)
    });
    Ok(synthesize(&d, h, f.spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{eval_u, eval_v};
    use crate::random::random_spectral_field;
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn analyze_eigenfunction_is_delta() {
        let h = BoundaryParams::new(0.5, 3.0).unwrap();
        let spec = GridSpec::square(20).unwrap();
        let eta = FreqIndex::new(3, -4);
        let f = GridField::from_fn(spec, |x| eval_u(&h, eta, x));
        let fh = analyze(&f, &h, 8).unwrap();
        for (xi, v) in fh.iter() {
            let expected = if xi == eta { 1.0 } else { 0.0 };
            assert!((v - expected).norm() < 1e-12, "{xi:?}: {v}");
        }
        let g = GridField::from_fn(spec, |x| eval_v(&h, eta, x));
        let gs = analyze_star(&g, &h, 8).unwrap();
        assert!((gs.get(eta).unwrap() - 1.0).norm() < 1e-12);
        assert!(gs.iter().filter(|(xi, _)| *xi != eta).all(|(_, v)| v.norm() < 1e-12));
        assert_eq!(gs.basis(), Basis::Lstar);
    }

    #[test]
    fn constant_on_torus() {
        let h = BoundaryParams::torus();
        let f = GridField::from_fn(GridSpec::square(16).unwrap(), |_| c(1.0, 0.0));
        for fh in [analyze(&f, &h, 4).unwrap(), analyze_star(&f, &h, 4).unwrap()] {
            for (xi, v) in fh.iter() {
                let e = if xi == FreqIndex::ZERO { 1.0 } else { 0.0 };
                assert!((v - e).norm() < 1e-14);
            }
        }
    }

    /// `f ≡ 1` violates the boundary conditions for `h = (e, 1)`, so the DFT
    /// equals the geometric sum `(1/n) Σ e^{-(1+2πiξ)k/n}` exactly and the
    /// continuous integral `(1 - e^{-1})/(1 + 2πiξ)` only to first order.
    #[test]
    fn constant_with_nonperiodic_weight() {
        let h = BoundaryParams::new(E, 1.0).unwrap();
        let n = 4096;
        let spec = GridSpec::new(n, 4).unwrap();
        let f = GridField::from_fn(spec, |_| c(1.0, 0.0));
        let fh = analyze(&f, &h, 1).unwrap();
        let fs = analyze_star(&f, &h, 1).unwrap();
        for xi1 in -1i64..=1 {
            let z = c(1.0, 2.0 * PI * xi1 as f64);
            let discrete = (1.0 - (-1.0f64).exp()) / (n as f64 * (1.0 - (-z / n as f64).exp()));
            let v = fh.get(FreqIndex::new(xi1, 0)).unwrap();
            assert!((v - discrete).norm() < 1e-12);
            let continuous = (1.0 - (-1.0f64).exp()) / z;
            assert!((v - continuous).norm() < 1.0 / n as f64);
            assert!(fh.get(FreqIndex::new(xi1, 1)).unwrap().norm() < 1e-14);
            let zs = c(1.0, -2.0 * PI * xi1 as f64);
            let star = (E - 1.0) / zs;
            assert!((fs.get(FreqIndex::new(xi1, 0)).unwrap() - star).norm() < 2.0 / n as f64);
        }
    }

    /// Independent check of the constant-field integral with composite
    /// Simpson quadrature at high resolution.
    #[test]
    fn closed_form_integral_matches_simpson() {
        for xi1 in -2i64..=2 {
            let m = 20_000;
            let f = |x: f64| Complex64::from_polar((-x).exp(), -2.0 * PI * xi1 as f64 * x);
            let hstep = 1.0 / m as f64;
            let mut s = f(0.0) + f(1.0);
            for i in 1..m {
                s += f(i as f64 * hstep) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s *= hstep / 3.0;
            let closed = (1.0 - (-1.0f64).exp()) / c(1.0, 2.0 * PI * xi1 as f64);
            assert!((s - closed).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_aliasing() {
        let f = GridField::zeros(GridSpec::square(16).unwrap());
        let h = BoundaryParams::torus();
        assert!(matches!(analyze(&f, &h, 8), Err(Error::Aliasing { .. })));
        assert!(analyze(&f, &h, 7).is_ok());
        assert!(partial_analyze(&f, &h, Axis::X2, 8, Basis::L).is_err());
    }

    #[test]
    fn synthesize_examples() {
        let h = BoundaryParams::new(2.0, 3.0).unwrap();
        let spec = GridSpec::square(12).unwrap();
        let one = SpectralField::delta(2, Basis::L, FreqIndex::ZERO, c(1.0, 0.0)).unwrap();
        let f = synthesize(&one, &h, spec);
        let expected = GridField::from_fn(spec, |x| c(h.power(x), 0.0));
        assert!(f.max_diff(&expected) < 1e-13);
        let zero = synthesize(&SpectralField::zeros(2, Basis::L), &h, spec);
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn synthesize_matches_pointwise_sum() {
        let h = BoundaryParams::new(0.7, 1.9).unwrap();
        let spec = GridSpec::new(6, 5).unwrap();
        let cf = random_spectral_field(4, Basis::Lstar, 11);
        let f = synthesize(&cf, &h, spec);
        let direct = GridField::from_fn(spec, |x| cf.iter().map(|(xi, v)| v * eval_v(&h, xi, x)).sum());
        assert!(f.max_diff(&direct) < 1e-12);
    }

    #[test]
    fn round_trip_random() {
        let h = BoundaryParams::new(0.5, 3.0).unwrap();
        let spec = GridSpec::square(64).unwrap();
        for seed in 0..3 {
            for basis in [Basis::L, Basis::Lstar] {
                let cf = random_spectral_field(8, basis, seed);
                let back = analyze_in(&synthesize(&cf, &h, spec), &h, 8, basis).unwrap();
                assert!(back.max_diff(&cf).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn partial_examples() {
        let h = BoundaryParams::new(1.7, 0.6).unwrap();
        let spec = GridSpec::new(16, 18).unwrap();
        let eta = FreqIndex::new(-2, 3);
        let f = GridField::from_fn(spec, |x| eval_u(&h, eta, x));
        let p = partial_analyze(&f, &h, Axis::X2, 6, Basis::L).unwrap();
        for r in 0..spec.n1 {
            let x1 = r as f64 / spec.n1 as f64;
            for xi2 in -6i64..=6 {
                let expected = if xi2 == eta.xi2 {
                    crate::eigenbasis::eval_u_1d(h.h1(), eta.xi1, x1)
                } else {
                    c(0.0, 0.0)
                };
                assert!((p.get(r, xi2) - expected).norm() < 1e-12);
            }
        }
        assert!(partial_synthesize(&p, &h).max_diff(&f) < 1e-12);

        let torus2 = BoundaryParams::new(1.7, 1.0).unwrap();
        let one = GridField::from_fn(spec, |_| c(1.0, 0.0));
        let p = partial_analyze(&one, &torus2, Axis::X2, 4, Basis::L).unwrap();
        for r in 0..spec.n1 {
            for xi2 in -4i64..=4 {
                let e = if xi2 == 0 { 1.0 } else { 0.0 };
                assert!((p.get(r, xi2) - e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn partial_synthesize_zero() {
        let h = BoundaryParams::new(2.0, 2.0).unwrap();
        let spec = GridSpec::square(10).unwrap();
        let p = partial_analyze(&GridField::zeros(spec), &h, Axis::X1, 3, Basis::Lstar).unwrap();
        assert_eq!(partial_synthesize(&p, &h).max_abs(), 0.0);
    }

    #[test]
    fn full_transform_factorizes_through_partials() {
        let h = BoundaryParams::new(0.4, 1.7).unwrap();
        let spec = GridSpec::new(40, 36).unwrap();
        for basis in [Basis::L, Basis::Lstar] {
            let cf = random_spectral_field(9, basis, 5);
            let f = synthesize(&cf, &h, spec);
            let full = analyze_in(&f, &h, 9, basis).unwrap();
            for axis in [Axis::X1, Axis::X2] {
                let p = partial_analyze(&f, &h, axis, 9, basis).unwrap();
                let composed = analyze_retained(&p, &h, 9).unwrap();
                assert!(composed.max_diff(&full).unwrap() < 1e-10);
                assert!(partial_synthesize(&p, &h).max_diff(&f) < 1e-9);
            }
        }
    }

    #[test]
    fn parseval_on_weighted_field() {
        let h = BoundaryParams::new(0.3, 2.5).unwrap();
        let spec = GridSpec::square(32).unwrap();
        let cf = random_spectral_field(7, Basis::L, 3);
        let f = synthesize(&cf, &h, spec);
        let g = f.map(|x, v| v / h.power(x));
        let lhs = analyze(&f, &h, 7).unwrap().l2_norm().powi(2);
        assert!((lhs - g.l2_norm().powi(2)).abs() < 1e-9 * lhs.max(1.0));
    }
}
