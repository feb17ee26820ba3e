//! Command-line verification harness.

pub fn run() {
    eprintln!("not yet wired up");
    std::process::exit(2);
}
