//! Runs a batch scenario in-process and prints the CSV it would write.
//!
//! `cargo run --example run_scenario -- configs/trapped_nonlocality.toml`

use bell_dephasing::scenario::{load_config, run_sweep, OutputFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/configs/frozen_entanglement.toml"
        )
        .to_string()
    });
    let scenario = load_config(path.as_ref())?;
    for artifact in run_sweep(&scenario, OutputFormat::Csv)? {
        println!("== {}", artifact.file_name);
        print!("{}", artifact.contents);
    }
    Ok(())
}
