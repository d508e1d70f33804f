use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use z22osp::cli::{init_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let status = run(&cli, &mut out);
    let _ = out.flush();
    ExitCode::from(status as u8)
}
