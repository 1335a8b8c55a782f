//! How well world fractions (EQM), probabilities (CQM) and naive branch
//! counting (NBC) account for three observed up-frequencies in 100 trials.
//!
//! Run with `cargo run --example model_comparison`.

use fractional_worlds::inference::model_compare;

fn main() -> fractional_worlds::Result<()> {
    let report = model_compare(&[0.0, 0.5, 0.75], 100, Some(0.05))?;
    for scenario in &report.scenarios {
        println!("observed frequency {:.2}:", scenario.observed_frequency);
        for s in &scenario.supports {
            println!("  {:<4} {:<15} {:.3e}", s.model, s.quantity, s.support);
        }
    }
    Ok(())
}
