use clap::Parser;

use fractional_worlds::cli::{execute, RunConfig};

fn main() {
    // Malformed arguments are input errors (status 1); status 2 is reserved
    // for violated invariants.
    let config = RunConfig::try_parse().unwrap_or_else(|e| {
        let _ = e.print();
        std::process::exit(if e.use_stderr() { 1 } else { 0 });
    });
    std::process::exit(execute(&config));
}
