//! Ten thousand repetitions of a 75% / 25% measurement: nearly all worlds see
//! an up-frequency within ±1.3% of 75%.
//!
//! Run with `cargo run --example repeated_spins`.

use fractional_worlds::worlds::{repeat_distribution, tail_fraction};

fn main() -> fractional_worlds::Result<()> {
    let dist = repeat_distribution(0.75, 10_000)?;
    let sigma = dist.sigma();
    println!(
        "N = {}, mean frequency {:.4}, σ = {sigma:.6}",
        dist.trials, dist.mean
    );
    for k in [1.0, 2.0, 3.0, 4.0] {
        println!(
            "  worlds within ±{k}σ (±{:.2}%): {:.6}",
            100.0 * k * sigma,
            dist.window_mass(dist.p, k * sigma)
        );
    }
    println!(
        "  maverick worlds beyond 3σ: {:.3e}",
        tail_fraction(&dist, 3.0)?
    );
    println!("  most common count: {}", dist.mode());
    Ok(())
}
