use std::io::{self, IsTerminal};
use std::process::ExitCode;

fn main() -> ExitCode {
    let color = std::env::var("LAZYLAB_COLOR").map_or(true, |v| v != "0") && io::stderr().is_terminal();
    let code = lazylab::cli::run(
        std::env::args_os(),
        &mut io::stdin().lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
        color,
    );
    ExitCode::from(code)
}
