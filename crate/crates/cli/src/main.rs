//! `cghw`: build square-free evaluation codes, compute their generalized
//! Hamming weights and check the identities between them.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
//! 3 a search budget was exceeded, 4 methods disagree.

mod args;
mod commands;
mod report;
mod suites;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sqfree_ghw::exec::with_jobs;

use args::{Cli, Command};
use commands::{cmd_code, cmd_ghw, cmd_table, Context};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Vec::new();
    let result = with_jobs(cli.jobs, || {
        let mut ctx = Context { format: cli.format, timings: cli.timings, out: &mut out };
        match &cli.command {
            Command::Code(a) => cmd_code(a, &mut ctx),
            Command::Ghw(a) => cmd_ghw(a, &mut ctx),
            Command::Verify(a) => suites::cmd_verify(a, &mut ctx),
            Command::Table(a) => cmd_table(a, &mut ctx),
        }
    });
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(&out).and_then(|_| stdout.flush());
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
