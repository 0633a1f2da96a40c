//! Multiple testing with control of the whole FDR curve for location
//! families.
//!
//! The FDR of a rejection set is treated as a function of the location
//! `θ`: a rejection of hypothesis `i` counts as false at `θ` when the true
//! location satisfies `θ_i ≥ θ`. A user-supplied non-increasing target
//! curve `q(θ)` is enforced by running Benjamini-Hochberg at level 1 on
//! curve-normalized p-values; the level actually guaranteed is the
//! transformed curve `q*(θ) ≤ q(θ)`, which can be computed before seeing
//! any data.
//!
//! Modules:
//! - [`distributions`]: location families, quantiles, CDF-ratio suprema.
//! - [`fdr_curve`]: target curves, `q*`, dominance, constraint selection.
//! - [`testing`]: p-values, (generalized) BH, FDP curves.
//! - [`simulation`]: Monte Carlo FDR-curve estimates and lower bounds.
//! - [`ingest`]: expression matrices to per-gene statistics.
//! - [`cli`]: the `fdrcurve` command line front end.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod fdr_curve;
pub mod ingest;
pub mod output;
pub mod simulation;
pub mod testing;

pub use distributions::{FamilySet, LocationFamily};
pub use error::{Error, Result};
pub use fdr_curve::{Constraint, QStarCurve, TargetCurve};
pub use testing::{bh_generalized, bh_standard, HypothesisSet, RejectionResult};
