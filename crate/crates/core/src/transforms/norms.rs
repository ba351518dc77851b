use num_complex::Complex64;

use super::{Basis, SpectralField};
use crate::eigenbasis::{derivative_factor, eigenvalue_2d, BoundaryParams};

/// `max_{j ≤ k} (Σ |λ_ξ^j f̂(ξ)|²)^{1/2}`, the spectral surrogate of the
/// `H^k_L` norm. For the `Lstar` tag the eigenvalues are `conj(λ_ξ)`, which
/// leaves the moduli unchanged.
pub fn sobolev_seminorm(c: &SpectralField, h: &BoundaryParams, k: u32) -> f64 {
    let mut best: f64 = 0.0;
    let mut sums = vec![0.0; k as usize + 1];
    for (xi, v) in c.iter() {
        let mut lam = eigenvalue_2d(h, xi);
        if c.basis() == Basis::Lstar {
            lam = lam.conj();
        }
        let mut term = v.norm_sqr();
        let l2 = lam.norm_sqr();
        for s in sums.iter_mut() {
            *s += term;
            term *= l2;
        }
    }
    for s in sums {
        best = best.max(s.sqrt());
    }
    best
}

/// `‖d^β φ/dx^β‖` for `β = 0..=kmax` of a 1-D expansion `φ = Σ φ̂(ξ) u_ξ`
/// in the `L_j` system, each norm taken as `(Σ |(log h_j + 2πiξ)^β φ̂(ξ)|²)^{1/2}`.
/// Their sum over `β ≤ K` is the seminorm `p_K(φ)`.
pub fn derivative_norms_1d(coeffs: &[(i64, Complex64)], hj: f64, kmax: u32) -> Vec<f64> {
    let l = hj.ln();
    let mut sums = vec![0.0; kmax as usize + 1];
    for &(xi, v) in coeffs {
        let d = derivative_factor(l, xi).norm_sqr();
        let mut term = v.norm_sqr();
        for s in sums.iter_mut() {
            *s += term;
            term *= d;
        }
    }
    sums.into_iter().map(f64::sqrt).collect()
}

/// `p_K(φ) = Σ_{β ≤ K} ‖d^β φ/dx^β‖`.
pub fn pk_seminorm(coeffs: &[(i64, Complex64)], hj: f64, k: u32) -> f64 {
    derivative_norms_1d(coeffs, hj, k).into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::FreqIndex;
    use crate::random::random_spectral_field;

    #[test]
    fn single_mode() {
        let h = BoundaryParams::new(2.0, 0.3).unwrap();
        let xi = FreqIndex::new(2, -1);
        let c = SpectralField::delta(3, Basis::L, xi, Complex64::new(1.0, 0.0)).unwrap();
        let lam = eigenvalue_2d(&h, xi).norm();
        for k in 0..4u32 {
            let expected = (0..=k).map(|j| lam.powi(j as i32)).fold(0.0, f64::max);
            assert!((sobolev_seminorm(&c, &h, k) - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn order_zero_is_l2_and_monotone() {
        let h = BoundaryParams::new(1.3, 0.8).unwrap();
        let c = random_spectral_field(5, Basis::L, 9);
        assert!((sobolev_seminorm(&c, &h, 0) - c.l2_norm()).abs() < 1e-14);
        let mut prev = 0.0;
        for k in 0..5 {
            let v = sobolev_seminorm(&c, &h, k);
            assert!(v >= prev);
            prev = v;
        }
        let s = random_spectral_field(5, Basis::Lstar, 9);
        assert!((sobolev_seminorm(&s, &h, 3) - sobolev_seminorm(&c, &h, 3)).abs() < 1e-9 * sobolev_seminorm(&c, &h, 3));
    }

    #[test]
    fn constant_on_torus() {
        let c = SpectralField::delta(4, Basis::L, FreqIndex::ZERO, Complex64::new(1.0, 0.0)).unwrap();
        for k in 0..6 {
            assert_eq!(sobolev_seminorm(&c, &BoundaryParams::torus(), k), 1.0);
        }
    }

    #[test]
    fn pk_of_single_mode() {
        let coeffs = [(3i64, Complex64::new(2.0, 0.0))];
        let d = derivative_factor(0.0, 3).norm();
        let expected = 2.0 * (1.0 + d + d * d);
        assert!((pk_seminorm(&coeffs, 1.0, 2) - expected).abs() < 1e-12 * expected);
    }
}
