//! Orchestration around the `qfnet` core: curve ingestion and synthesis,
//! the end-to-end run, SVG heatmaps and the `qfnet` command line.

pub mod builtin;
pub mod cli;
pub mod config;
pub mod error;
pub mod heatmap;
pub mod ingest;
pub mod pipeline;
pub mod synth;

pub use config::{ConfigMap, Input, RunConfig};
pub use error::{ErrorClass, PipelineError, Stage};
pub use pipeline::{run_pipeline, RunReport};
pub use synth::{generate_synthetic, SyntheticSpec};
