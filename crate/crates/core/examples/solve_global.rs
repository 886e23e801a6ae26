//! Solves one game with spatial branch and bound under several formulations.
//!
//! `cargo run --release --example solve_global -- "RG(3,4)#seed=2"`

use multinash::generators::InstanceSpec;
use multinash::{build, global, FormulationId, SolverConfig};

fn main() -> multinash::Result<()> {
    let spec: InstanceSpec = std::env::args().nth(1).unwrap_or_else(|| "RG(3,3)#seed=5".into()).parse()?;
    let game = spec.generate()?;
    let config = SolverConfig::default().with_time_limit(30.0);
    for code in ["MLP2", "MIMLP1", "MIMLP3C", "MIMLP4CF"] {
        let id: FormulationId = code.parse()?;
        let program = build(id, &game)?;
        let report = global::solve(&program, &game, &config)?;
        println!(
            "{code:>9}: {} after {} nodes in {:.4} s, max regret {:.2e}",
            report.status, report.nodes_explored, report.wall_time, report.max_regret
        );
        if let Some(p) = &report.profile {
            for (i, d) in p.distributions().iter().enumerate() {
                let shown: Vec<String> = d.iter().map(|v| format!("{v:.4}")).collect();
                println!("           player {}: [{}]", i + 1, shown.join(", "));
            }
        }
    }
    Ok(())
}
