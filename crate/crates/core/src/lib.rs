//! Delta-shock solutions of the pressureless Euler equations with a source
//! that jumps across the front.
//!
//! The crate builds closed-form solutions for the solvable source pairs,
//! integrates the generalized Rankine–Hugoniot conditions for arbitrary
//! `(t, u)`-dependent sources, classifies each problem by the geometry of its
//! front, and checks candidate solutions against the weak form of the system.

// `!(x > 0.0)` is how NaN is rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characteristics;
pub mod critical;
pub mod exact;
pub mod export;
pub mod grh_ode;
pub mod model;
pub mod particles;
pub mod quadrature;
pub mod roots;
pub mod weak_residual;
