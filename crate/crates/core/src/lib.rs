//! Geometry of singular (degenerate-metric) semi-Riemannian charts.
//!
//! The crate evaluates the Koszul form, the covariant contraction on the
//! annihilator space of the metric, the Koszul-form Riemann curvature,
//! connection and curvature forms, and checks Cartan's first and second
//! structural equations numerically as residuals.
//!
//! Everything is pointwise on a single coordinate chart. Field data are
//! scalar expressions over the chart coordinates; derivatives come from
//! second-order jets, so there is no truncation error.

// tensor code reads better with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod cartan;
pub mod catalog;
pub mod chart;
pub mod cli;
pub mod config;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod jet;
pub mod koszul;
pub mod linalg;
pub mod radical;
pub mod report;

pub use catalog::{catalog, MetricSpec};
pub use chart::{Chart, EvaluableOneForm, MetricField, PointwiseCovector, VectorField};
pub use error::{Error, Result};
pub use expr::{parse, DomainError, ExprAst, ParseError};
pub use jet::Jet2;
pub use koszul::{KoszulEvaluator, Verdict};
pub use radical::{decompose, RadicalDecomposition};
pub use report::RunReport;
