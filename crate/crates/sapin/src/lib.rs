//! File formats, result writers and the experiment harness around
//! [`sapin_core`].

pub mod config;
pub mod harness;
pub mod output;
pub mod render;
pub mod snapshot;
pub mod trace;

pub use config::{load_config, ConfigError, FileConfig, Overrides};
pub use harness::{RunOptions, Summary};
pub use snapshot::NetworkSnapshot;
pub use trace::{replay, Trace};
