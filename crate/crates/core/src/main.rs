use std::io::{stderr, stdout, Write};
use std::process::ExitCode;

use clap::Parser;
use cxmech::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (stdout().lock(), stderr().lock());
    let status = run(&cli, &mut out, &mut err);
    let _ = out.flush();
    match status {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
