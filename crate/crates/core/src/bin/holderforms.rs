use clap::Parser;
use holderforms::cli::{exit_code, report_lines, run, Cli};

fn main() {
    let cli = Cli::parse();
    let result = run(&cli);
    let lines = report_lines(&result);
    if result.is_err() {
        for l in &lines {
            eprintln!("{l}");
        }
    } else {
        for l in &lines {
            println!("{l}");
        }
    }
    std::process::exit(exit_code(&result));
}
