//! Builds games from instance specs and prints their shape and payoff ranges.
//!
//! `cargo run --example generate_games -- "CG(3,4,-0.2)#seed=7"`

use multinash::generators::{named_game, InstanceSpec};

fn main() -> multinash::Result<()> {
    let specs: Vec<String> = std::env::args().skip(1).collect();
    let specs = if specs.is_empty() {
        vec!["RG(3,3)#seed=1".into(), "RG(2,[2,5])".into(), "CG(3,3,-0.2)#seed=4;range=0..10".into()]
    } else {
        specs
    };
    for text in &specs {
        let spec: InstanceSpec = text.parse()?;
        let game = spec.generate()?;
        println!("{spec}: strategies {:?}", game.strategy_counts());
        for i in 0..game.num_players() {
            let (lo, hi) = game.payoff_range(i);
            println!("  player {} payoffs in [{lo}, {hi}]", i + 1);
        }
        println!("  pure equilibria: {:?}", game.enumerate_pure_equilibria()?);
    }
    let rps = named_game("rock_paper_scissors")?;
    println!("rock_paper_scissors has {} pure equilibria", rps.enumerate_pure_equilibria()?.len());
    Ok(())
}
