//! Runs a small benchmark plan and prints the aggregated table.
//!
//! `cargo run --release --example bench_plan -- plans/rg33_formulations.json`

use multinash::bench::{run_plan, BenchPlan};
use multinash::SolverConfig;

const DEFAULT_PLAN: &str = r#"{
  "instances": [{ "family": "RG(3,3)", "seeds": 5 }, "CG(3,3,-0.2)#seed=1"],
  "formulations": ["MLP2", "MIMLP1", "MIMLP4CF"],
  "solver": "global",
  "timeout_s": 30
}"#;

fn main() -> multinash::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT_PLAN.to_string(),
    };
    let plan = BenchPlan::parse(&text)?;
    let base = SolverConfig { deterministic: true, ..SolverConfig::default() };
    let results = run_plan(&plan, &base, 4)?;
    print!("{}", results.table);
    println!("{} runs recorded", results.records.len());
    Ok(())
}
