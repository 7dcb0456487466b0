mod app;
mod input;
mod output;

use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout().lock();
    let code = app::run(&args, &mut stdout);
    let _ = stdout.flush();
    ExitCode::from(code)
}
