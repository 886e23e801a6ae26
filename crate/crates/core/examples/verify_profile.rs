//! Certifies a candidate profile and shows what a small perturbation does to it.
//!
//! `cargo run --example verify_profile`

use multinash::generators::named_game;
use multinash::MixedProfile;

fn main() -> multinash::Result<()> {
    let game = named_game("matching_pennies")?;
    let eq = MixedProfile::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]])?;
    let shifted = MixedProfile::new(vec![vec![0.6, 0.4], vec![0.5, 0.5]])?;
    for (label, p) in [("equilibrium", &eq), ("shifted", &shifted)] {
        let report = game.regret_report(p)?;
        println!(
            "{label}: eps-Nash at 1e-6 = {}, max regret {:.3}",
            game.is_epsilon_nash(p, 1e-6)?,
            report.max_regret
        );
        for i in 0..game.num_players() {
            let regrets: Vec<String> = report.regrets[i].iter().map(|r| format!("{r:.3}")).collect();
            println!("  player {} gains {:.3} by deviating, regrets [{}]", i + 1, report.exploitability(i), regrets.join(", "));
        }
    }
    Ok(())
}
