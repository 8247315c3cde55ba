//! Command-line front end for the repeater-chain simulator: option parsing
//! and the SVG chart emitter. The binary in `main.rs` is a thin wrapper
//! around these pieces so they stay testable as a library.

pub mod options;
pub mod svg;

pub use options::{parse_options, CliOptions, Metric, OutputFormat, Parsed, PresetChoice, UsageError};
pub use svg::{emit_svg, svg_string, SvgError};
