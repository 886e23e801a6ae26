//! Runs the local solver from several seeds and compares the equilibria found.
//!
//! `cargo run --release --example local_multistart`

use multinash::generators::InstanceSpec;
use multinash::local::{merit, multistart};
use multinash::{MixedProfile, SolverConfig};

fn main() -> multinash::Result<()> {
    let game = InstanceSpec::random(4, 3, 11).generate()?;
    println!("merit at the uniform profile: {:.3}", merit(&game, &MixedProfile::uniform(&game))?);
    let mut found: Vec<MixedProfile> = Vec::new();
    for seed in 0..8 {
        let report = multistart(&game, &SolverConfig::default().with_seed(seed).with_time_limit(10.0))?;
        print!("seed {seed}: {} in {:.4} s", report.status, report.wall_time);
        let solved = report.is_solved();
        if let Some(p) = report.profile.filter(|_| solved) {
            match found.iter().position(|q| q.linf_distance(&p) < 1e-6) {
                Some(k) => print!(", same as equilibrium #{k}"),
                None => {
                    print!(", new equilibrium #{}", found.len());
                    found.push(p);
                }
            }
        }
        println!();
    }
    println!("{} distinct equilibria", found.len());
    Ok(())
}
