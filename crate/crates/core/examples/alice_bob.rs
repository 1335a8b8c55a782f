//! Alice prepares spins depending on her own branch; Bob infers which branch
//! he is in from the spins he measures.
//!
//! Run with `cargo run --example alice_bob`.

use fractional_worlds::inference::{
    alice_bob, first_down_certainty, observation_accounting, parse_observation, update_credence,
    ALICE_UP,
};

fn main() -> fractional_worlds::Result<()> {
    let hypotheses = alice_bob();
    for n in [1, 2, 5, 10, 20] {
        let observed = vec!["↑".to_string(); n];
        let credence = update_credence(&hypotheses, &observed)?;
        let accounting = observation_accounting(&hypotheses, &observed, ALICE_UP)?;
        println!(
            "{n:>2} × ↑: credence in A↑ {:.6}, misled worlds {:.3e}",
            credence.get(ALICE_UP).unwrap(),
            accounting.misled
        );
    }

    let report = first_down_certainty(&parse_observation("↑↑↓"))?;
    println!(
        "after ↑↑↓ Bob is certain of {}",
        report.certain_of.as_deref().unwrap_or("nothing")
    );
    Ok(())
}
