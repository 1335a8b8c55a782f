//! Branching worlds over four repeated measurements, first sequence by
//! sequence, then grouped by the number of up results.
//!
//! Run with `cargo run --example branch_tree`.

use fractional_worlds::worlds::{build_branch_tree, sequence_key, CoarseGrain};
use fractional_worlds::FractionTable;

fn main() -> fractional_worlds::Result<()> {
    let step = FractionTable::binary("↑", "↓", 0.75)?;
    let steps = vec![step; 4];

    let tree = build_branch_tree(&steps, None)?;
    for level in 1..=tree.depth() {
        let line: Vec<String> = tree
            .level(level)
            .map(|(seq, f)| format!("{}:{f:.4}", sequence_key(&seq)))
            .collect();
        println!("level {level}: {}", line.join(" "));
    }

    let grouped = build_branch_tree(&steps, Some(&CoarseGrain::count_of("↑")))?;
    println!("\nworlds by number of ↑ results:");
    for (count, fraction) in grouped.coarse().unwrap() {
        println!("  {count} ↑: {fraction:.6}");
    }
    Ok(())
}
