//! Functional neural network construction from quantum state fidelities.
//!
//! Tuning curves are embedded into quantum states (angle or amplitude
//! embedding), compared pairwise with fidelity circuits simulated on a dense
//! statevector backend, and the resulting distance matrices are compared
//! with Mantel tests and reduced to spanning trees or top-percent graphs.

pub mod circuit;
pub mod curve;
pub mod error;
pub mod metrics;
pub mod netgraph;
pub mod rng;
pub mod statevec;
pub mod stats;
pub mod transpile;

pub use circuit::{Circuit, GateCensus};
pub use curve::{PreparedCurve, TuningCurve};
pub use error::{Error, Result};
pub use metrics::{DistanceMatrix, MetricName, MetricSpec};
pub use netgraph::FunctionalNetwork;
pub use statevec::{Gate, GateKind, StateVector};
pub use stats::MantelResult;
