//! Static SVG line charts of sweep results.
//!
//! One polyline per (l2, l3) setting, node count on the x axis and the
//! selected occupancy metric on a logarithmic y axis. A setting's line ends
//! at its last unbroken length — the visual convention for a broken curve.
//! The chart is rendered purely from the rows it is given; nothing is
//! recomputed, and identical rows produce byte-identical output.

use std::error::Error;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use qrepsim_core::experiment::ResultRow;

use crate::options::Metric;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 600.0;
const PLOT_LEFT: f64 = 80.0;
const PLOT_RIGHT: f64 = 660.0;
const PLOT_TOP: f64 = 50.0;
const PLOT_BOTTOM: f64 = 540.0;
const LEGEND_X: f64 = 690.0;

/// Line colors, cycled per setting.
const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

/// Chart emission failure.
#[derive(Debug)]
pub enum SvgError {
    /// No rows were supplied.
    NoRows,
    /// Rows mix presets; a chart covers exactly one.
    MixedPresets,
    /// Every curve is broken from the start; nothing is plottable.
    NothingToPlot,
    Io(io::Error),
}

impl fmt::Display for SvgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SvgError::NoRows => write!(f, "no rows to chart"),
            SvgError::MixedPresets => write!(f, "rows mix presets; chart one preset at a time"),
            SvgError::NothingToPlot => write!(f, "no unbroken points to chart"),
            SvgError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl Error for SvgError {}

impl From<io::Error> for SvgError {
    fn from(e: io::Error) -> Self {
        SvgError::Io(e)
    }
}

fn metric_value(row: &ResultRow, metric: Metric) -> f64 {
    match metric {
        Metric::End => row.end_time,
        Metric::Intermediate => row.intermediate_time,
        Metric::Total => row.total_time,
    }
}

fn threshold_label(value: Option<f64>) -> String {
    match value {
        Some(t) => format!("{t:.3}"),
        None => "None".to_string(),
    }
}

struct Series {
    label: String,
    /// (n_nodes, metric) for the unbroken prefix, positive values only.
    points: Vec<(usize, f64)>,
}

fn collect_series(rows: &[ResultRow], metric: Metric) -> Vec<Series> {
    let mut series: Vec<((f64, Option<f64>), Series)> = Vec::new();
    for row in rows {
        let key = row.setting();
        if !series.iter().any(|(k, _)| *k == key) {
            series.push((
                key,
                Series {
                    label: format!(
                        "l2:{:.3}, l3:{}, l4:{:.3}",
                        row.l2,
                        threshold_label(row.l3),
                        row.l4
                    ),
                    points: Vec::new(),
                },
            ));
        }
    }
    for (key, entry) in &mut series {
        let mut terminated = false;
        for row in rows.iter().filter(|r| r.setting() == *key) {
            if row.broken {
                terminated = true;
            }
            if !terminated {
                let value = metric_value(row, metric);
                if value > 0.0 {
                    entry.points.push((row.n_nodes, value));
                }
            }
        }
    }
    series.into_iter().map(|(_, s)| s).collect()
}

/// Render rows from one preset as an SVG document.
pub fn svg_string(rows: &[ResultRow], metric: Metric) -> Result<String, SvgError> {
    if rows.is_empty() {
        return Err(SvgError::NoRows);
    }
    if rows.iter().any(|r| r.preset != rows[0].preset) {
        return Err(SvgError::MixedPresets);
    }

    let series = collect_series(rows, metric);
    let plotted: Vec<&Series> = series.iter().filter(|s| !s.points.is_empty()).collect();
    if plotted.is_empty() {
        return Err(SvgError::NothingToPlot);
    }

    let x_min = rows.iter().map(|r| r.n_nodes).min().unwrap() as f64;
    let x_max = rows.iter().map(|r| r.n_nodes).max().unwrap() as f64;
    let x_span = (x_max - x_min).max(1.0);

    let mut y_log_min = f64::INFINITY;
    let mut y_log_max = f64::NEG_INFINITY;
    for s in &plotted {
        for &(_, value) in &s.points {
            y_log_min = y_log_min.min(value.log10());
            y_log_max = y_log_max.max(value.log10());
        }
    }
    // Pad to whole decades so gridlines land on powers of ten.
    let decade_low = y_log_min.floor() as i32;
    let mut decade_high = y_log_max.ceil() as i32;
    if decade_low == decade_high {
        decade_high += 1;
    }
    let y_span = f64::from(decade_high - decade_low);

    let x_of = |n: f64| PLOT_LEFT + (n - x_min) / x_span * (PLOT_RIGHT - PLOT_LEFT);
    let y_of = |value: f64| {
        let log = value.log10();
        PLOT_BOTTOM - (log - f64::from(decade_low)) / y_span * (PLOT_BOTTOM - PLOT_TOP)
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "  <text x=\"{PLOT_LEFT}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\">\
preset {}: {} memory occupancy vs. path length</text>\n",
        rows[0].preset,
        metric.label()
    ));

    // Decade gridlines and y labels.
    let mut decade_step = 1;
    while (decade_high - decade_low) / decade_step > 12 {
        decade_step += 1;
    }
    let mut decade = decade_low;
    while decade <= decade_high {
        let y = y_of(10f64.powi(decade));
        out.push_str(&format!(
            "  <line x1=\"{PLOT_LEFT}\" y1=\"{y:.2}\" x2=\"{PLOT_RIGHT}\" y2=\"{y:.2}\" \
stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
text-anchor=\"end\">1e{decade}</text>\n",
            PLOT_LEFT - 8.0,
            y + 4.0
        ));
        decade += decade_step;
    }

    // X ticks on round node counts.
    let tick_step = (x_span / 6.0).ceil().max(1.0);
    let mut tick = x_min;
    while tick <= x_max + 0.5 {
        let x = x_of(tick);
        out.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{PLOT_BOTTOM}\" x2=\"{x:.2}\" y2=\"{:.2}\" \
stroke=\"#999999\" stroke-width=\"1\"/>\n",
            PLOT_BOTTOM + 6.0
        ));
        out.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
text-anchor=\"middle\">{}</text>\n",
            PLOT_BOTTOM + 22.0,
            tick as usize
        ));
        tick += tick_step;
    }
    out.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
text-anchor=\"middle\">number of nodes</text>\n",
        (PLOT_LEFT + PLOT_RIGHT) / 2.0,
        PLOT_BOTTOM + 44.0
    ));
    out.push_str(&format!(
        "  <text x=\"22\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
transform=\"rotate(-90 22 {:.2})\" text-anchor=\"middle\">qubit occupancy \
(qubit·unit-times)</text>\n",
        (PLOT_TOP + PLOT_BOTTOM) / 2.0,
        (PLOT_TOP + PLOT_BOTTOM) / 2.0
    ));

    // Axes.
    out.push_str(&format!(
        "  <line x1=\"{PLOT_LEFT}\" y1=\"{PLOT_TOP}\" x2=\"{PLOT_LEFT}\" y2=\"{PLOT_BOTTOM}\" \
stroke=\"black\" stroke-width=\"1\"/>\n"
    ));
    out.push_str(&format!(
        "  <line x1=\"{PLOT_LEFT}\" y1=\"{PLOT_BOTTOM}\" x2=\"{PLOT_RIGHT}\" y2=\"{PLOT_BOTTOM}\" \
stroke=\"black\" stroke-width=\"1\"/>\n"
    ));

    // Curves: one polyline per setting, ending at the last unbroken length.
    for (index, s) in plotted.iter().enumerate() {
        let color = PALETTE[index % PALETTE.len()];
        let points: Vec<String> = s
            .points
            .iter()
            .map(|&(n, value)| format!("{:.2},{:.2}", x_of(n as f64), y_of(value)))
            .collect();
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
    }

    // Legend.
    for (index, s) in plotted.iter().enumerate() {
        let color = PALETTE[index % PALETTE.len()];
        let y = 60.0 + 22.0 * index as f64;
        out.push_str(&format!(
            "  <line x1=\"{LEGEND_X}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
stroke=\"{color}\" stroke-width=\"2\"/>\n",
            LEGEND_X + 26.0
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            LEGEND_X + 34.0,
            y + 4.0,
            s.label
        ));
    }

    out.push_str("</svg>\n");
    Ok(out)
}

/// Write the chart to `path`.
pub fn emit_svg(rows: &[ResultRow], metric: Metric, path: &Path) -> Result<(), SvgError> {
    let document = svg_string(rows, metric)?;
    let mut file = fs::File::create(path)?;
    file.write_all(document.as_bytes())?;
    Ok(())
}
