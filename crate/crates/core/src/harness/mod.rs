//! Config files, presets and parameter sweeps behind the command-line tool.

pub mod config_file;
pub mod presets;
pub mod sweep;

pub use config_file::{apply_overrides, parse_config, Combination, ConfigFile, Param, SweepSpec};
pub use presets::{find_preset, list_presets, load_preset, Preset};
pub use sweep::{run_combinations, run_sweep, RunManifest, RunRecord, Status, SweepOptions};
