use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let invocation = match zsep::cli::parse_args(std::env::args_os()) {
        Ok(inv) => inv,
        Err(e) => e.exit(),
    };
    let stdout = io::stdout();
    match zsep::cli::execute(&invocation, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
