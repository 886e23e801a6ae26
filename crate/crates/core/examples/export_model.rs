//! Writes a formulation in the model text format and reads it back.
//!
//! `cargo run --example export_model -- MIMLP4CF`

use multinash::generators::named_game;
use multinash::interop::{export_model, parse_model};
use multinash::{build, FormulationId};

fn main() -> multinash::Result<()> {
    let id: FormulationId = std::env::args().nth(1).unwrap_or_else(|| "MLP2".into()).parse()?;
    let game = named_game("matching_pennies")?;
    let program = build(id, &game)?;
    let text = export_model(&program);
    print!("{text}");
    let back = parse_model(&text)?;
    assert_eq!(back, program);
    eprintln!(
        "{id}: {} variables, {} constraints, {} binaries; parsed back identically",
        program.num_variables(),
        program.constraints.len(),
        program.num_binaries()
    );
    Ok(())
}
