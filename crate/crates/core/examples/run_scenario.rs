// Run a JSON scenario in memory; `cargo run --example run_scenario -- configs/fig3.json`.

use std::path::Path;

use photon_reshape::expcli::{execute, RunOptions, Scenario};
use photon_reshape::Result;

const DEMO: &str = r#"{
  "scenario": "fig2_jsi_sweep",
  "control": { "peak_power_w": 163.8416, "grid_points": 2048 },
  "spdc": { "grid_points": 128, "bandpass": { "width_nm": 30.0, "shape": "flat_top" } },
  "sweep": { "delta_t_ps": [-0.5, 0.0, 0.5] }
}"#;

pub fn run(path: Option<&str>) -> Result<()> {
    let sc = match path {
        Some(p) => Scenario::load(Path::new(p))?,
        None => Scenario::from_json(DEMO, Path::new("."))?,
    };
    let result = execute(&sc, &RunOptions::default())?;
    for a in &result.artifacts {
        println!("{:>10} bytes  {}", a.bytes.len(), a.name);
    }
    println!("{}", serde_json::to_string_pretty(&result.summary)?);
    Ok(())
}

fn main() -> Result<()> {
    run(std::env::args().nth(1).as_deref())
}
