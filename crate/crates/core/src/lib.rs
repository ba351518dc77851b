//! Nonharmonic Fourier analysis on `[0,1]²` for the operator
//! `L_h = ∂₁² + ∂₂²` with weighted boundary conditions
//! `h_j f|_{x_j=0} = f|_{x_j=1}`: expansions in the eigenfunctions
//! `u_ξ = h^x e^{2πix·ξ}`, multipliers, hypoellipticity and solvability
//! diagnostics, Fourier division and the normal form of `∂₁ + a(x₁)∂₂`.

pub mod diagnostics;
pub mod eigenbasis;
mod error;
pub mod io;
pub mod multiplier;
pub mod normal_form;
pub mod random;
pub mod report;
pub mod solver;
pub mod transforms;

pub use diagnostics::{
    classify_constant_P, continued_fraction, exponent_curve, ghe_gate, gs_gate, liouville_evidence, zero_set,
    ClassifyOptions, DiagnosisReport, ExponentCurve, GateParams, GateResult, IrrationalityReport, Verdict,
};
pub use eigenbasis::{
    eigen_data, eigen_data_1d, eigenvalue_1d, eigenvalue_2d, eval_u, eval_v, weight_1d, weight_2d, BoundaryParams,
    EigenData, EigenData1D, FreqIndex,
};
pub use error::{Error, Result};
pub use multiplier::{adjoint_symbol, apply_multiplier, diff_symbol, symbol_constant_P, OperatorSpec, Symbol};
pub use normal_form::{
    intertwine_residual, mean_and_primitive, psi_apply, reduce, solve_variable, CoefficientFunction, PsiDirection,
};
pub use solver::{admissibility, residual, solve, AdmissibilityReport, SolveOptions};
pub use transforms::{
    analyze, analyze_star, partial_analyze, partial_synthesize, synthesize, Axis, Basis, GridField, GridSpec,
    PartialField, SpectralField,
};

pub use num_complex::Complex64;
