//! Numerics for the continuity equation of Gauduchon metrics on flat
//! complex tori.
//!
//! The library is organised bottom-up:
//!
//! * [`grid`] — periodic grids over ℂⁿ/Λ (n = 2, 3) and spectrally accurate
//!   complex derivatives ∂ᵢ, ∂ⱼ̄ of scalar fields,
//! * [`forms`] — pointwise exterior algebra of (p,q)-forms, the Hodge star,
//!   determinants, and the (1,1) ↔ (n−1,n−1) power maps,
//! * [`calculus`] — operators mixing the two: i∂∂̄, metric Laplacians, and
//!   exterior derivatives of form fields,
//! * [`chern`] — Chern connection quantities of a Hermitian metric
//!   (Christoffel symbols, torsion, Chern-Ricci form, Gauduchon defect),
//! * [`solver`] — the scalar Monge-Ampère-type equation
//!   log(ω̃ⁿ/αⁿ) = λφ + G and its method-of-continuity solution,
//! * [`driver`] — the geometric layer: reduction of the continuity equation
//!   ω^{n−1} = ω₀^{n−1} − s(n−1)(Ric(ω)∧α^{n−2} − …) to the scalar equation,
//!   metric reconstruction, and numerical estimation of the maximal time,
//! * [`eigen`] — the eigenvalue-function machinery (λ ↔ μ maps, f and f̃,
//!   their exact identities and inequalities) as grid-free vector math.
//!
//! All fields live on uniform periodic grids and all derivatives are
//! trigonometric (FFT-based), so smooth data is resolved to machine
//! precision and the solver error is isolated from discretisation error.

pub mod calculus;
pub mod chern;
pub mod driver;
pub mod eigen;
mod fft;
pub mod forms;
pub mod grid;
pub mod hermitian;
pub mod solver;

pub use grid::{ScalarField, TorusGrid};
