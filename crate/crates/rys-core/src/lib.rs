//! Generalized Gauss-Rys orthogonal polynomials at extended precision.
//!
//! This crate constructs and cross-validates the orthogonal-polynomial system
//! of the weight (1−x²)^(λ−1/2)·e^(−zx²) on (−1,1) with λ > −1/2 and z ≥ 0:
//!
//! * closed-form moments with an independent integration oracle ([`moments`]),
//! * recurrence coefficients by Hankel-Cholesky factorization, checked
//!   against nonlinear discrete (Painlevé-type) identities ([`recurrence`]),
//! * polynomial evaluation with structure-relation, ladder-operator and
//!   second-order ODE residuals ([`polynomials`]),
//! * Gauss quadrature nodes and weights ([`quadrature`]),
//! * zeros, their electrostatic interpretation and z-dynamics ([`zeros`]),
//! * the Toda flow in z, Chazy-type ODE checks, and the Stieltjes transform
//!   with its defining ODEs ([`flows`]).
//!
//! Everything runs on an arbitrary-precision real type ([`numerics::XReal`])
//! at a caller-chosen digit budget; every analytic identity is exposed as a
//! residual so independent pipelines can be compared quantitatively.

// Domain guards are deliberately spelled `!(x > bound)` instead of
// `x <= bound`: the negated form also rejects NaN, which must fail
// validation rather than slip through a comparison that is always false.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flows;
pub mod moments;
pub mod numerics;
pub mod polynomials;
pub mod quadrature;
pub mod recurrence;
pub mod zeros;

pub use error::{Result, RysError};
pub use flows::{toda_integrate, toda_rhs, FlowState, StieltjesEval};
pub use moments::{moment, moment_oracle, moment_table, MomentTable, WeightParams};
pub use numerics::{Prec, XReal, DEFAULT_DIGITS, MIN_DIGITS};
pub use recurrence::{recurrence_table, RecurrenceTable};
