//! Runs the ten verification criteria and prints one line each.

fn main() -> jointbound::Result<()> {
    let seed = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(7);
    let results = jointbound::suite::run_all(seed, jointbound::suite::DEFAULT_TOLERANCE)?;
    for r in &results {
        println!("{}", r.summary_line());
    }
    if results.iter().all(|r| r.pass()) {
        Ok(())
    } else {
        std::process::exit(1)
    }
}
