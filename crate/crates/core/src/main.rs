use clap::Parser;
use std::process::ExitCode;
use symbill::cli::{error_record, run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = symbill::Error::InvalidArgument(e.to_string().trim_end().to_string());
            let (code, record) = error_record(&err);
            eprintln!("{record}");
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, record) = error_record(&e);
            eprintln!("{record}");
            ExitCode::from(code as u8)
        }
    }
}
