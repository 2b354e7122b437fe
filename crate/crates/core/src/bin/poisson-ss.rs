use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    poisson_ss::cli::init_threads_from_env();
    let code = poisson_ss::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
