//! Shared scenario builders for the simulation benchmarks.

use qrepsim_core::engine::{NetworkConfig, PolicyConfig};
use qrepsim_core::experiment::Preset;

/// Preset-b hardware over `n_nodes` nodes.
pub fn preset_b_config(n_nodes: usize) -> NetworkConfig {
    NetworkConfig::new(
        n_nodes,
        Preset::B.end_profile(),
        Preset::B.intermediate_profile(),
    )
}

/// The workhorse policy: well-purified links, end-to-end elsewhere.
pub fn end_to_end_policy() -> PolicyConfig {
    PolicyConfig::new(0.999, None)
}

/// The internetworking variant of the same policy.
pub fn internetworking_policy() -> PolicyConfig {
    PolicyConfig::new(0.999, Some(0.99))
}
