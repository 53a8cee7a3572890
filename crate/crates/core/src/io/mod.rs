//! Price ingestion, experiment configuration and file output.

pub mod config;
pub mod experiment;
pub mod output;
pub mod prices;

pub use config::{load_bekk, load_model, ExperimentConfig, Inputs, Pipeline};
pub use experiment::run_experiment;
pub use output::{Manifest, ManifestEntry, OutputDir, MANIFEST_NAME};
pub use prices::{align_returns, ingest_prices, parse_prices, read_prices, write_prices, PriceSeries, Provenance, ReturnSeries};
