use std::process::ExitCode;

use clap::Parser;

use pcsft::cli::{run, Args};

fn main() -> ExitCode {
    let cfg = match Args::parse().into_config() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("pcsft: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match run(&cfg) {
        Ok(report) => {
            let agg = &report.aggregate;
            eprintln!(
                "pcsft {}: {} passed, {} failed ({:.3}s)",
                cfg.kind.as_str(),
                agg.passed_count,
                agg.failed_count,
                report.wall_time_seconds
            );
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("pcsft: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
