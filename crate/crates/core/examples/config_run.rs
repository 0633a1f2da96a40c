//! Driving a batch run from a JSON configuration, as the `fdrcurve` binary
//! does with `--config`.
//!
//! ```bash
//! cargo run --example config_run
//! ```

use fdrcurve::cli::{run, Command, RunConfig};

pub fn run_example() -> fdrcurve::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| fdrcurve::Error::Data(e.to_string()))?;
    let mut cfg: RunConfig = serde_json::from_str(
        r#"{
            "command": "select-constraints",
            "constraints": [{"theta": -0.27, "q": 0.2}, {"theta": 0, "q": 0.1}, {"theta": 0.26, "q": 0.05}],
            "family": "gaussian",
            "m": 3170,
            "method": "greedy"
        }"#,
    )?;
    cfg.out = Some(dir.path().to_path_buf());
    let outcome = run(&cfg)?;
    for path in &outcome.written {
        println!(
            "wrote {}",
            path.file_name().unwrap_or_default().to_string_lossy()
        );
    }
    println!(
        "{}",
        std::fs::read_to_string(dir.path().join("selection.json")).unwrap_or_default()
    );

    cfg.command = Some(Command::Qstar);
    cfg.method = None;
    cfg.grid = Some(fdrcurve::cli::GridSpec::Text("-0.5:0.5:5".into()));
    let outcome = run(&cfg)?;
    println!("config hash {}", outcome.manifest["config_hash"]);
    print!(
        "{}",
        std::fs::read_to_string(dir.path().join("curve.csv")).unwrap_or_default()
    );
    Ok(())
}

fn main() -> fdrcurve::Result<()> {
    run_example()
}
