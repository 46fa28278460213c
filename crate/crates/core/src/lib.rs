//! Exact counting and numerical checks for the hard-core model on
//! triangle-free graphs.
//!
//! * [`graph`]: adjacency, triangles, and labelled-graph enumeration.
//! * [`poly`]: exact independence polynomials and `log Z`.
//! * [`special`]: Lambert W and the closed-form rate functions.
//! * [`verify`]: grid checks of the differential inequality behind the lower bound.
//! * [`experiments`]: random triangle-free graphs, Glauber dynamics, and exhaustive scans.
//! * [`bounds`]: one graph against both envelopes.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod numfmt;
pub mod poly;
pub mod special;
pub mod verify;

pub use bounds::{bound_report, BoundReport};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ExperimentResult, TriangleFreeMode};
pub use graph::Graph;
pub use poly::{Fugacity, IndependencePolynomial};
pub use verify::{Claim, Grid, GridSpec, InequalityMode, LemmaCheckReport};
