//! Configuration, scan orchestration, presets and CSV emission.

pub mod config;
pub mod presets;
pub mod scan;

pub use config::{validate_config, CompiledConfig, RunConfig, ScanAxis};
pub use presets::{write_preset, PRESET_NAMES};
pub use scan::{oracle_csv, run_ocdma, run_scan, run_scan_to_file, with_threads, CSV_HEADER};
