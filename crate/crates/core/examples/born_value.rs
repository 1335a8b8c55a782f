//! The spin state `√3/2 |↑⟩ + 1/2 |↓⟩`: world fractions, analytic projection
//! factors and Monte Carlo estimates all land on 75% / 25%.
//!
//! Run with `cargo run --release --example born_value`.

use fractional_worlds::measure::{projection_factor_analytic, projection_factor_mc};
use fractional_worlds::worlds::world_fractions;
use fractional_worlds::{McConfig, OrthogonalPartition, RegionSpec, ScalarField, StateVector};

fn main() -> fractional_worlds::Result<()> {
    let spin = StateVector::from_reals(
        ScalarField::Complex,
        ["up", "down"],
        &[3f64.sqrt() / 2.0, 0.5],
    )?;
    let outcomes = OrthogonalPartition::finest(&spin);
    let fractions = world_fractions(&spin, &outcomes)?;
    let config = McConfig::new(1_000_000, 7);
    let region = RegionSpec::default();

    println!(
        "{:<6} {:>10} {:>10} {:>22}",
        "", "fraction", "analytic", "monte carlo"
    );
    for (label, fraction) in fractions.iter() {
        let analytic = projection_factor_analytic(&spin, &outcomes, label)?;
        let estimate = projection_factor_mc(&spin, &outcomes, label, &region, &config)?;
        println!(
            "{label:<6} {fraction:>10.6} {analytic:>10.6} {:>12.6} ± {:.6}",
            estimate.value, estimate.std_error
        );
    }
    Ok(())
}
