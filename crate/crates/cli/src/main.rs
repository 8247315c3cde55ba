use std::env;
use std::error::Error;
use std::process::ExitCode;

use qrepsim_cli::options::{parse_options, CliOptions, Parsed, USAGE};
use qrepsim_cli::svg::emit_svg;
use qrepsim_core::experiment::{run_sweep, run_sweep_with_profiles, write_csv, SettingGrid};

fn execute(options: &CliOptions) -> Result<(), Box<dyn Error>> {
    let grid = SettingGrid {
        l2_values: options.l2_values.clone(),
        l3_values: options.l3_values.clone(),
        l4_threshold: options.l4_threshold,
        min_nodes: options.min_nodes,
        max_nodes: options.max_nodes,
        success_rule: options.success_rule,
        ..SettingGrid::default()
    };

    let rows = match options.preset {
        qrepsim_cli::options::PresetChoice::Named(preset) => run_sweep(preset, &grid),
        qrepsim_cli::options::PresetChoice::Custom { end, intermediate } => {
            run_sweep_with_profiles("custom", intermediate, end, &grid)
        }
    };

    if options.format.wants_csv() {
        write_csv(&rows, &options.out_path)?;
        println!(
            "wrote {} rows to {}",
            rows.len(),
            options.out_path.display()
        );
    }
    if options.format.wants_svg() {
        let path = options.resolved_svg_path();
        emit_svg(&rows, options.metric, &path)?;
        println!("wrote {} chart to {}", options.metric.label(), path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = env::args().skip(1).collect();
    match parse_options(&args) {
        Ok(Parsed::Help) => {
            print!("{USAGE}");
            ExitCode::SUCCESS
        }
        Ok(Parsed::Run(options)) => match execute(&options) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!();
            eprint!("{USAGE}");
            ExitCode::from(2)
        }
    }
}
