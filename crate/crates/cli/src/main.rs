use std::process::ExitCode;

use clap::Parser;

use opmod::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            for line in &out.summary {
                println!("{line}");
            }
            for path in &out.written {
                println!("wrote {}", path.display());
            }
            if out.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &out.failures {
                    eprintln!("check failed: {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
