//! Radioactive decay as branching: after one half-life each atom has decayed
//! in half of its worlds, and almost all worlds see close to half decayed.
//!
//! Run with `cargo run --example half_life`.

use fractional_worlds::inference::half_life_report;

fn main() -> fractional_worlds::Result<()> {
    for atoms in [10, 100, 1_000, 100_000] {
        let r = half_life_report(0.5, atoms)?;
        println!(
            "{atoms:>7} atoms: σ = {:.5}, worlds within 3σ {:.6}, all decayed {:.3e}",
            r.sigma, r.within_3_sigma, r.all_decayed
        );
    }
    Ok(())
}
