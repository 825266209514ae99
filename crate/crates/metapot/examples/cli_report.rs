//! Driving the command-line layer from code: a verification suite report.

use clap::Parser;
use metapot::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse_from(["metapot", "verify", "all", "--trials", "10", "--seed", "3"]);
    match execute(&cli) {
        Ok(report) => {
            for c in &report.checks {
                let status = if c.passed { "ok" } else { "FAIL" };
                if c.tolerance == 0.0 {
                    println!("{:45} {status}", c.name);
                } else {
                    println!("{:45} {:>10.3e}  tol {:.0e}  {status}", c.name, c.value, c.tolerance);
                }
            }
            println!("all passed: {}", report.passed());
        }
        Err(e) => eprintln!("{e:?}"),
    }
}
