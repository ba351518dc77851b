//! Closed-form eigen-system of the model operator `L_h = ∂₁² + ∂₂²` on
//! `[0,1]²` with the weighted boundary conditions `h_j f|_{x_j=0} = f|_{x_j=1}`.
//!
//! The eigenfunctions `u_ξ(x) = h^x e^{2πi x·ξ}` and the conjugate system
//! `v_ξ(x) = h^{-x} e^{2πi x·ξ}` are kept unnormalized so that
//! `(u_ξ, v_η) = δ_{ξη}` holds exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Boundary weights `h = (h₁, h₂)`; `(1, 1)` is the torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    h1: f64,
    h2: f64,
}

impl BoundaryParams {
    pub fn new(h1: f64, h2: f64) -> Result<Self> {
        for (name, v) in [("h1", h1), ("h2", h2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("boundary weight must be positive, got {v}")));
            }
        }
        Ok(Self { h1, h2 })
    }

    pub fn torus() -> Self {
        Self { h1: 1.0, h2: 1.0 }
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }

    /// `h_j` for `axis ∈ {0, 1}`.
    pub fn get(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.h1
        } else {
            self.h2
        }
    }

    /// `(log h₁, log h₂)`.
    pub fn logs(&self) -> (f64, f64) {
        (self.h1.ln(), self.h2.ln())
    }

    pub fn is_torus(&self) -> bool {
        self.h1 == 1.0 && self.h2 == 1.0
    }

    /// `h^x = h₁^{x₁} h₂^{x₂}`.
    pub fn power(&self, x: (f64, f64)) -> f64 {
        let (l1, l2) = self.logs();
        (l1 * x.0 + l2 * x.1).exp()
    }
}

/// A lattice frequency `ξ ∈ ℤ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreqIndex {
    pub xi1: i64,
    pub xi2: i64,
}

impl FreqIndex {
    pub const ZERO: FreqIndex = FreqIndex { xi1: 0, xi2: 0 };

    pub const fn new(xi1: i64, xi2: i64) -> Self {
        Self { xi1, xi2 }
    }

    pub fn neg(self) -> Self {
        Self::new(-self.xi1, -self.xi2)
    }

    /// Sup-norm `max(|ξ₁|, |ξ₂|)`, the radius used by square truncations.
    pub fn sup_norm(self) -> i64 {
        self.xi1.abs().max(self.xi2.abs())
    }

    pub fn norm_sq(self) -> f64 {
        let (a, b) = (self.xi1 as f64, self.xi2 as f64);
        a * a + b * b
    }
}

impl From<(i64, i64)> for FreqIndex {
    fn from((a, b): (i64, i64)) -> Self {
        Self::new(a, b)
    }
}

/// Eigenvalue of `L_h` together with the induced weight `⟨ξ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenData {
    pub lambda: Complex64,
    pub weight: f64,
}

/// Eigenvalue of the 1-D factor `L_j = -i d/dx_j` with its weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenData1D {
    pub lambda1d: Complex64,
    pub weight1d: f64,
}

/// `log h_j + 2πi ξ_j`, the symbol of `∂_j`.
#[inline]
pub fn derivative_factor(log_h: f64, xi: i64) -> Complex64 {
    Complex64::new(log_h, TWO_PI * xi as f64)
}

/// `λ_ξ = (log h₁ + 2πiξ₁)² + (log h₂ + 2πiξ₂)²`.
pub fn eigenvalue_2d(h: &BoundaryParams, xi: FreqIndex) -> Complex64 {
    let (l1, l2) = h.logs();
    let z1 = derivative_factor(l1, xi.xi1);
    let z2 = derivative_factor(l2, xi.xi2);
    z1 * z1 + z2 * z2
}

/// `(1 + |λ|²)^{1/(2m)}` for an operator of order `m`.
fn weight_of_order(lambda: Complex64, order: u32) -> f64 {
    (1.0 + lambda.norm_sqr()).powf(1.0 / (2.0 * order as f64))
}

/// `⟨ξ⟩ = (1 + |λ_ξ|²)^{1/4}`.
pub fn weight_2d(h: &BoundaryParams, xi: FreqIndex) -> f64 {
    weight_of_order(eigenvalue_2d(h, xi), 2)
}

pub fn eigen_data(h: &BoundaryParams, xi: FreqIndex) -> EigenData {
    let lambda = eigenvalue_2d(h, xi);
    EigenData {
        lambda,
        weight: weight_of_order(lambda, 2),
    }
}

/// `λ_{ξ_j} = -i log h_j + 2π ξ_j`.
pub fn eigenvalue_1d(hj: f64, xij: i64) -> Complex64 {
    Complex64::new(TWO_PI * xij as f64, -hj.ln())
}

/// `⟨ξ_j⟩ = (1 + |λ_{ξ_j}|²)^{1/2}`.
pub fn weight_1d(hj: f64, xij: i64) -> f64 {
    weight_of_order(eigenvalue_1d(hj, xij), 1)
}

pub fn eigen_data_1d(hj: f64, xij: i64) -> EigenData1D {
    let lambda1d = eigenvalue_1d(hj, xij);
    EigenData1D {
        lambda1d,
        weight1d: weight_of_order(lambda1d, 1),
    }
}

/// One-dimensional eigenfunction `u_{ξ_j}(t) = h_j^t e^{2πi t ξ_j}`.
pub fn eval_u_1d(hj: f64, xij: i64, t: f64) -> Complex64 {
    Complex64::from_polar((hj.ln() * t).exp(), TWO_PI * xij as f64 * t)
}

/// One-dimensional conjugate eigenfunction `v_{ξ_j}(t) = h_j^{-t} e^{2πi t ξ_j}`.
pub fn eval_v_1d(hj: f64, xij: i64, t: f64) -> Complex64 {
    Complex64::from_polar((-hj.ln() * t).exp(), TWO_PI * xij as f64 * t)
}

/// `u_ξ(x) = h^x e^{2πi x·ξ}`.
pub fn eval_u(h: &BoundaryParams, xi: FreqIndex, x: (f64, f64)) -> Complex64 {
    let phase = TWO_PI * (x.0 * xi.xi1 as f64 + x.1 * xi.xi2 as f64);
    Complex64::from_polar(h.power(x), phase)
}

/// `v_ξ(x) = h^{-x} e^{2πi x·ξ}`.
pub fn eval_v(h: &BoundaryParams, xi: FreqIndex, x: (f64, f64)) -> Complex64 {
    let phase = TWO_PI * (x.0 * xi.xi1 as f64 + x.1 * xi.xi2 as f64);
    Complex64::from_polar(1.0 / h.power(x), phase)
}
