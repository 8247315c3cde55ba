//! Experiment presets, threshold sweeps and tabular output.
//!
//! A sweep fixes one hardware preset, iterates a grid of (l2, l3) threshold
//! settings over a range of path lengths, and records one row per run. Rows
//! past the first broken length are still emitted so plotted curves show
//! where each setting breaks.

use std::error::Error;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use crate::engine::{
    run_connection, NetworkConfig, NodeProfile, PolicyConfig, SuccessRule, DEFAULT_MAX_PUMP_ROUNDS,
};
use crate::bell::ErrorProbability;

/// The four hardware presets compared in the study, as
/// (intermediate, end) per-class error probabilities with memory and
/// operation rates equal within a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// intermediate 1e-4, end 1e-4
    A,
    /// intermediate 1e-4, end 1e-5
    B,
    /// intermediate 1e-4, end 0
    C,
    /// intermediate 1e-5, end 1e-5
    D,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::A, Preset::B, Preset::C, Preset::D];

    pub fn label(self) -> &'static str {
        match self {
            Preset::A => "a",
            Preset::B => "b",
            Preset::C => "c",
            Preset::D => "d",
        }
    }

    fn rates(self) -> (f64, f64) {
        match self {
            Preset::A => (1e-4, 1e-4),
            Preset::B => (1e-4, 1e-5),
            Preset::C => (1e-4, 0.0),
            Preset::D => (1e-5, 1e-5),
        }
    }

    pub fn intermediate_profile(self) -> NodeProfile {
        let (intermediate, _) = self.rates();
        NodeProfile::uniform(ErrorProbability::new(intermediate).expect("preset rate"))
    }

    pub fn end_profile(self) -> NodeProfile {
        let (_, end) = self.rates();
        NodeProfile::uniform(ErrorProbability::new(end).expect("preset rate"))
    }
}

/// Unknown preset label.
#[derive(Debug, Clone, PartialEq)]
pub struct UnknownPreset(pub String);

impl fmt::Display for UnknownPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown preset '{}', expected a, b, c or d", self.0)
    }
}

impl Error for UnknownPreset {}

impl FromStr for Preset {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a" => Ok(Preset::A),
            "b" => Ok(Preset::B),
            "c" => Ok(Preset::C),
            "d" => Ok(Preset::D),
            other => Err(UnknownPreset(other.to_string())),
        }
    }
}

/// The grid of threshold settings and path lengths a sweep covers.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingGrid {
    pub l2_values: Vec<f64>,
    /// `None` entries mean the end-to-end policy (no internetworking
    /// purification).
    pub l3_values: Vec<Option<f64>>,
    pub l4_threshold: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub success_rule: SuccessRule,
    pub max_pump_rounds: u32,
}

impl Default for SettingGrid {
    /// The studied grid: l2 in {0.90, 0.99, 0.999}, l3 in
    /// {None, 0.90, 0.99, 0.999}, l4 = 0.99, 3 to 256 nodes.
    fn default() -> Self {
        Self {
            l2_values: vec![0.90, 0.99, 0.999],
            l3_values: vec![None, Some(0.90), Some(0.99), Some(0.999)],
            l4_threshold: 0.99,
            min_nodes: 3,
            max_nodes: 256,
            success_rule: SuccessRule::default(),
            max_pump_rounds: DEFAULT_MAX_PUMP_ROUNDS,
        }
    }
}

impl SettingGrid {
    /// A single-setting grid, handy for focused runs and tests.
    pub fn single(l2: f64, l3: Option<f64>, l4: f64, min_nodes: usize, max_nodes: usize) -> Self {
        Self {
            l2_values: vec![l2],
            l3_values: vec![l3],
            l4_threshold: l4,
            min_nodes,
            max_nodes,
            ..Self::default()
        }
    }
}

/// One sweep record: a (preset, setting, length) run and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub preset: String,
    pub l2: f64,
    pub l3: Option<f64>,
    pub l4: f64,
    pub n_nodes: usize,
    pub end_time: f64,
    pub intermediate_time: f64,
    pub total_time: f64,
    /// Delivered fidelity, or the last fidelity achieved before the run
    /// broke.
    pub delivered_fidelity: f64,
    pub broken: bool,
    pub l2_purifications: u64,
    pub l3_purifications: u64,
    pub l4_purifications: u64,
}

impl ResultRow {
    /// The (l2, l3) pair identifying this row's threshold setting.
    pub fn setting(&self) -> (f64, Option<f64>) {
        (self.l2, self.l3)
    }
}

/// Sweep one preset over a setting grid. Rows come out setting-major, path
/// length ascending, and runs past a break are still included with
/// `broken = true`.
pub fn run_sweep(preset: Preset, grid: &SettingGrid) -> Vec<ResultRow> {
    run_sweep_with_profiles(
        preset.label(),
        preset.intermediate_profile(),
        preset.end_profile(),
        grid,
    )
}

/// Sweep arbitrary per-class profiles (used by the `custom` preset).
pub fn run_sweep_with_profiles(
    label: &str,
    intermediate: NodeProfile,
    end: NodeProfile,
    grid: &SettingGrid,
) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for &l2 in &grid.l2_values {
        for &l3 in &grid.l3_values {
            let policy = PolicyConfig {
                l2_threshold: l2,
                l3_threshold: l3,
                l4_threshold: grid.l4_threshold,
                success_rule: grid.success_rule,
                max_pump_rounds: grid.max_pump_rounds,
            };
            for n_nodes in grid.min_nodes..=grid.max_nodes {
                let config = NetworkConfig::new(n_nodes, end, intermediate);
                let result = run_connection(&config, &policy)
                    .expect("sweep configurations are valid by construction");
                rows.push(ResultRow {
                    preset: label.to_string(),
                    l2,
                    l3,
                    l4: grid.l4_threshold,
                    n_nodes,
                    end_time: result.ledger.end_qubit_time(),
                    intermediate_time: result.ledger.intermediate_qubit_time(),
                    total_time: result.ledger.total(),
                    delivered_fidelity: result.delivered_fidelity(),
                    broken: result.broken,
                    l2_purifications: result.purification_counts.l2,
                    l3_purifications: result.purification_counts.l3,
                    l4_purifications: result.purification_counts.l4,
                });
            }
        }
    }
    rows
}

/// Fraction of photons that survive `length_km` of fiber, `e^(−L/22)`:
/// attenuation costs a factor `1/e` every 22 km. Handy for deriving raw-pair
/// generation success rates from link length.
pub fn link_loss_rate(length_km: f64) -> f64 {
    debug_assert!(length_km >= 0.0, "negative fiber length");
    (-length_km / 22.0).exp()
}

/// CSV emission failure.
#[derive(Debug)]
pub enum CsvError {
    /// Refusing to write an empty sweep.
    NoRows,
    Io(io::Error),
}

impl fmt::Display for CsvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsvError::NoRows => write!(f, "no rows to write"),
            CsvError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl Error for CsvError {}

impl From<io::Error> for CsvError {
    fn from(e: io::Error) -> Self {
        CsvError::Io(e)
    }
}

/// Column order of the CSV output.
pub const CSV_HEADER: &str = "preset,l2,l3,l4,n_nodes,end_time,intermediate_time,total_time,\
delivered_fidelity,broken,l2_purifications,l3_purifications,l4_purifications";

/// Format a value with 12 significant digits, the fixed-width form every
/// decimal column uses so files are byte-identical across runs and
/// platforms.
pub fn format_significant(value: f64) -> String {
    format!("{value:.11e}")
}

fn format_row(row: &ResultRow) -> String {
    let l3 = match row.l3 {
        Some(value) => format_significant(value),
        None => "none".to_string(),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.preset,
        format_significant(row.l2),
        l3,
        format_significant(row.l4),
        row.n_nodes,
        format_significant(row.end_time),
        format_significant(row.intermediate_time),
        format_significant(row.total_time),
        format_significant(row.delivered_fidelity),
        row.broken,
        row.l2_purifications,
        row.l3_purifications,
        row.l4_purifications,
    )
}

/// Render rows as a newline-terminated CSV document.
pub fn csv_string(rows: &[ResultRow]) -> Result<String, CsvError> {
    if rows.is_empty() {
        return Err(CsvError::NoRows);
    }
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format_row(row));
        out.push('\n');
    }
    Ok(out)
}

/// Write rows as CSV to `path`.
pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<(), CsvError> {
    let document = csv_string(rows)?;
    let mut file = fs::File::create(path)?;
    file.write_all(document.as_bytes())?;
    Ok(())
}
