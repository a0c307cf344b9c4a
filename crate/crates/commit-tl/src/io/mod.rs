//! Data ingestion, transforms, configuration, and result serialization.

pub mod config;
pub mod output;
pub mod table;
pub mod transform;

pub use config::{load_json_config, Candidates, RunConfig};
pub use table::{load_csv, save_csv, DataTable, Orientation};
pub use transform::{clr_transform, log_transform};
