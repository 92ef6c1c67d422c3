use std::process::ExitCode;

use clap::Parser;
use cqed_cli::{execute, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CQED_FOM_LOG", "warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                log::info!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
