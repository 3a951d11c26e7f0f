//! Config parsing, exports and plot scripts.

pub mod config;
pub mod export;
pub mod plot;

pub use config::{parse_config, serialize_config, RunConfig};
pub use export::Format;
