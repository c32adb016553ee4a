use clap::Parser;

fn main() -> std::process::ExitCode {
    let cli = snsr_cli::Cli::parse();
    match snsr_cli::configure_threads().and_then(|_| snsr_cli::run(cli)) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
