//! Exact symbolic engine for the differential-invariant hierarchy of
//! non-Lagrangian 2-distributions on a symplectic 4-fold and of the
//! symplectic Monge-Ampère equations they encode.
//!
//! Everything is computed over an exact coefficient field: multivariate
//! rational functions of the canonical chart variables x, p, y, q, optionally
//! extended by one adjoined square root and by formal jet symbols. There is no
//! floating arithmetic in the kernel; floats appear only in test oracles.
//!
//! The crate is organized bottom-up:
//!
//! - [`poly`], [`scalar`], [`parse`]: the coefficient field and its parser;
//! - [`linalg`]: exact linear algebra over scalars and over the rationals;
//! - [`exterior`]: vector fields, k-forms, multivectors, vector-valued forms;
//! - [`symplectic`]: the symplectic structure, pairings, Hodge star, Poisson
//!   bracket;
//! - [`dist`]: 2-distributions, their attached objects, and the
//!   Monge-Ampère front-end;
//! - [`invariants`]: the scalar differential invariants and invariant fields;
//! - [`analysis`]: integrability, Darboux classes, normal-form detection and
//!   linearization verdicts;
//! - [`jet`]: second-order jet computations on the Grassmannian bundle;
//! - [`report`]: report documents for the CLI and JSON output;
//! - [`verify`]: the batch identity suites driven by `smae verify`.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod analysis;
pub mod dist;
pub mod exterior;
pub mod invariants;
pub mod jet;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod symplectic;
pub mod verify;

pub use parse::parse;
pub use scalar::{Scalar, VariableContext};
