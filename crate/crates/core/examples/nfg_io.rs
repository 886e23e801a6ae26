//! Reads a Gambit-style `.nfg` file, solves it and writes it back out.
//!
//! `cargo run --example nfg_io -- path/to/game.nfg`

use multinash::interop::{read_nfg, write_game_json, write_nfg};
use multinash::{build, global, FormulationId, SolverConfig};

const PRISONERS: &str = r#"NFG 1 R "Prisoner's dilemma" { "Row" "Column" } { 2 2 }
"Payoffs listed with the first player varying fastest"
-1 -1 0 -3 -3 0 -2 -2
"#;

fn main() -> multinash::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => PRISONERS.to_string(),
    };
    let game = read_nfg(&text)?;
    println!("read '{}' with strategies {:?}", game.name.as_deref().unwrap_or("untitled"), game.strategy_counts());
    let program = build(FormulationId::plain(multinash::formulations::Base::Mlp2), &game)?;
    let report = global::solve(&program, &game, &SolverConfig::default())?;
    println!("{}: {:?}", report.status, report.profile.map(|p| p.distributions().to_vec()));
    println!("canonical nfg:\n{}", write_nfg(&game));
    println!("json:\n{}", write_game_json(&game));
    Ok(())
}
