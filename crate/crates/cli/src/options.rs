//! Flag parsing and validation.
//!
//! Parsing is a pure function from an argument list to either a validated
//! option set, a help request, or a [`UsageError`] naming the offending
//! flag.

use std::error::Error;
use std::fmt;
use std::path::PathBuf;

use qrepsim_core::bell::ErrorProbability;
use qrepsim_core::engine::{NodeProfile, SuccessRule};
use qrepsim_core::experiment::Preset;

/// Which files a run writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
    Both,
}

impl OutputFormat {
    pub fn wants_csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn wants_svg(self) -> bool {
        matches!(self, OutputFormat::Svg | OutputFormat::Both)
    }
}

/// Which occupancy column the chart plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    End,
    Intermediate,
    Total,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::End => "end",
            Metric::Intermediate => "intermediate",
            Metric::Total => "total",
        }
    }
}

/// Hardware selection: a named preset or fully custom per-class rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PresetChoice {
    Named(Preset),
    Custom {
        end: NodeProfile,
        intermediate: NodeProfile,
    },
}

impl PresetChoice {
    pub fn label(&self) -> &'static str {
        match self {
            PresetChoice::Named(p) => p.label(),
            PresetChoice::Custom { .. } => "custom",
        }
    }

    pub fn profiles(&self) -> (NodeProfile, NodeProfile) {
        match *self {
            PresetChoice::Named(p) => (p.end_profile(), p.intermediate_profile()),
            PresetChoice::Custom { end, intermediate } => (end, intermediate),
        }
    }
}

/// Validated command-line options.
#[derive(Debug, Clone, PartialEq)]
pub struct CliOptions {
    pub preset: PresetChoice,
    pub l2_values: Vec<f64>,
    pub l3_values: Vec<Option<f64>>,
    pub l4_threshold: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub success_rule: SuccessRule,
    pub out_path: PathBuf,
    pub svg_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub metric: Metric,
}

impl CliOptions {
    /// Path the SVG goes to: `--svg-out` if given, the output path itself
    /// for pure SVG runs, otherwise the output path with an `.svg`
    /// extension.
    pub fn resolved_svg_path(&self) -> PathBuf {
        if let Some(path) = &self.svg_path {
            return path.clone();
        }
        if self.format == OutputFormat::Svg {
            return self.out_path.clone();
        }
        self.out_path.with_extension("svg")
    }
}

/// Parse outcome: a run request or a help request.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Run(Box<CliOptions>),
    Help,
}

/// A rejected command line, with a message naming the offending flag.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Error for UsageError {}

/// Usage text printed on `--help` and after usage errors.
pub const USAGE: &str = "\
usage: qrepsim [options]

Sweeps end-to-end Bell-pair generation over a linear repeater chain and
reports qubit-memory occupancy per purification policy.

options:
  --preset <a|b|c|d|custom>   hardware preset (default a); presets set the
                              (intermediate, end) error rates to
                              a=(1e-4,1e-4) b=(1e-4,1e-5) c=(1e-4,0) d=(1e-5,1e-5)
  --p-mem-end <p>             custom end-node memory error rate
  --p-op-end <p>              custom end-node operation error rate
  --p-mem-int <p>             custom intermediate memory error rate
  --p-op-int <p>              custom intermediate operation error rate
                              (all four are required with --preset custom)
  --l2 <t>                    fix the link-level threshold (default sweeps
                              0.90, 0.99, 0.999)
  --l3 <t|none>               fix the internetworking threshold; 'none'
                              selects the end-to-end policy (default sweeps
                              none, 0.90, 0.99, 0.999)
  --l4 <t>                    delivery threshold (default 0.99)
  --n-min <k>                 smallest node count (default 3)
  --n-max <k>                 largest node count (default 256)
  --rule <table|paper-formula>
                              success-probability rule dividing resource
                              counts (default table)
  --out <path>                output path (default sweep.csv)
  --svg-out <path>            chart path (default: --out with .svg)
  --format <csv|svg|both>     outputs to write (default csv)
  --metric <end|intermediate|total>
                              occupancy column to chart (default intermediate)
  -h, --help                  show this message
";

fn parse_number(flag: &str, value: &str) -> Result<f64, UsageError> {
    value
        .parse::<f64>()
        .map_err(|_| UsageError(format!("{flag}: '{value}' is not a number")))
}

fn parse_threshold(flag: &str, value: &str) -> Result<f64, UsageError> {
    let t = parse_number(flag, value)?;
    if !(t > 0.25 && t < 1.0) {
        return Err(UsageError(format!(
            "{flag}: threshold {t} is out of range (0.25, 1)"
        )));
    }
    Ok(t)
}

fn parse_rate(flag: &str, value: &str) -> Result<ErrorProbability, UsageError> {
    let p = parse_number(flag, value)?;
    ErrorProbability::new(p)
        .map_err(|_| UsageError(format!("{flag}: rate {p} is out of range [0, 0.75]")))
}

fn parse_count(flag: &str, value: &str) -> Result<usize, UsageError> {
    value
        .parse::<usize>()
        .map_err(|_| UsageError(format!("{flag}: '{value}' is not a node count")))
}

/// Parse an argument list (without the program name).
pub fn parse_options(args: &[String]) -> Result<Parsed, UsageError> {
    let mut preset_arg: Option<String> = None;
    let mut l2: Option<f64> = None;
    let mut l3: Option<Option<f64>> = None;
    let mut l4 = 0.99;
    let mut rates: [Option<ErrorProbability>; 4] = [None; 4];
    const RATE_FLAGS: [&str; 4] = ["--p-mem-end", "--p-op-end", "--p-mem-int", "--p-op-int"];
    let mut min_nodes = 3usize;
    let mut max_nodes = 256usize;
    let mut rule = SuccessRule::Table;
    let mut out_path = PathBuf::from("sweep.csv");
    let mut svg_path: Option<PathBuf> = None;
    let mut format = OutputFormat::Csv;
    let mut metric = Metric::Intermediate;

    let mut iter = args.iter();
    while let Some(flag) = iter.next() {
        if flag == "-h" || flag == "--help" {
            return Ok(Parsed::Help);
        }
        let mut value_of = |flag: &str| {
            iter.next()
                .cloned()
                .ok_or_else(|| UsageError(format!("{flag}: missing value")))
        };
        match flag.as_str() {
            "--preset" => preset_arg = Some(value_of(flag)?),
            "--l2" => l2 = Some(parse_threshold(flag, &value_of(flag)?)?),
            "--l3" => {
                let value = value_of(flag)?;
                l3 = if value == "none" {
                    Some(None)
                } else {
                    Some(Some(parse_threshold(flag, &value)?))
                };
            }
            "--l4" => l4 = parse_threshold(flag, &value_of(flag)?)?,
            "--n-min" => min_nodes = parse_count(flag, &value_of(flag)?)?,
            "--n-max" => max_nodes = parse_count(flag, &value_of(flag)?)?,
            "--rule" => {
                let value = value_of(flag)?;
                rule = match value.as_str() {
                    "table" => SuccessRule::Table,
                    "paper-formula" => SuccessRule::PaperFormula,
                    other => {
                        return Err(UsageError(format!(
                            "--rule: '{other}' is not one of table, paper-formula"
                        )))
                    }
                };
            }
            "--out" => out_path = PathBuf::from(value_of(flag)?),
            "--svg-out" => svg_path = Some(PathBuf::from(value_of(flag)?)),
            "--format" => {
                let value = value_of(flag)?;
                format = match value.as_str() {
                    "csv" => OutputFormat::Csv,
                    "svg" => OutputFormat::Svg,
                    "both" => OutputFormat::Both,
                    other => {
                        return Err(UsageError(format!(
                            "--format: '{other}' is not one of csv, svg, both"
                        )))
                    }
                };
            }
            "--metric" => {
                let value = value_of(flag)?;
                metric = match value.as_str() {
                    "end" => Metric::End,
                    "intermediate" => Metric::Intermediate,
                    "total" => Metric::Total,
                    other => {
                        return Err(UsageError(format!(
                            "--metric: '{other}' is not one of end, intermediate, total"
                        )))
                    }
                };
            }
            other if RATE_FLAGS.contains(&other) => {
                let slot = RATE_FLAGS.iter().position(|f| *f == other).unwrap();
                rates[slot] = Some(parse_rate(other, &value_of(other)?)?);
            }
            other => return Err(UsageError(format!("unknown flag '{other}'"))),
        }
    }

    let any_rate = rates.iter().any(Option::is_some);
    let preset = match preset_arg.as_deref() {
        None | Some("a") | Some("b") | Some("c") | Some("d") => {
            if any_rate {
                let flag = RATE_FLAGS[rates.iter().position(Option::is_some).unwrap()];
                return Err(UsageError(format!(
                    "{flag} conflicts with a named preset; use --preset custom"
                )));
            }
            let label = preset_arg.as_deref().unwrap_or("a");
            PresetChoice::Named(label.parse::<Preset>().expect("matched above"))
        }
        Some("custom") => {
            for (slot, flag) in RATE_FLAGS.iter().enumerate() {
                if rates[slot].is_none() {
                    return Err(UsageError(format!("--preset custom requires {flag}")));
                }
            }
            PresetChoice::Custom {
                end: NodeProfile::new(rates[0].unwrap(), rates[1].unwrap()),
                intermediate: NodeProfile::new(rates[2].unwrap(), rates[3].unwrap()),
            }
        }
        Some(other) => {
            return Err(UsageError(format!(
                "--preset: '{other}' is not one of a, b, c, d, custom"
            )))
        }
    };

    if min_nodes < 2 {
        return Err(UsageError(format!(
            "--n-min: {min_nodes} is below the 2-node minimum"
        )));
    }
    if max_nodes < min_nodes {
        return Err(UsageError(format!(
            "--n-max: {max_nodes} is below --n-min {min_nodes}"
        )));
    }

    Ok(Parsed::Run(Box::new(CliOptions {
        preset,
        l2_values: match l2 {
            Some(value) => vec![value],
            None => vec![0.90, 0.99, 0.999],
        },
        l3_values: match l3 {
            Some(value) => vec![value],
            None => vec![None, Some(0.90), Some(0.99), Some(0.999)],
        },
        l4_threshold: l4,
        min_nodes,
        max_nodes,
        success_rule: rule,
        out_path,
        svg_path,
        format,
        metric,
    })))
}
