//! A measuring device entangles with a spin; each pointer reading labels one
//! branch, and the branch fractions are those of the spin alone.
//!
//! Run with `cargo run --example entanglement`.

use fractional_worlds::hilbert::{entangle_measure, product_label};
use fractional_worlds::worlds::world_fractions;
use fractional_worlds::{OrthogonalPartition, Scalar, ScalarField, StateVector};
use indexmap::IndexMap;

fn main() -> fractional_worlds::Result<()> {
    let field = ScalarField::Complex;
    let spin = StateVector::new(
        field,
        ["↑", "↓"],
        vec![
            Scalar::complex(0.0, 3f64.sqrt() / 2.0),
            Scalar::complex(0.5, 0.0),
        ],
    )?;
    let device = ["ready", "reads ↑", "reads ↓"];
    let pointers = IndexMap::from([
        (
            "↑".to_string(),
            StateVector::basis_vector(field, &device, "reads ↑")?,
        ),
        (
            "↓".to_string(),
            StateVector::basis_vector(field, &device, "reads ↓")?,
        ),
    ]);
    let joint = entangle_measure(&spin, &pointers)?;
    for (label, c) in joint.labels().iter().zip(joint.coeffs()) {
        if !c.is_zero() {
            println!("{label}: {c}");
        }
    }

    let branches = OrthogonalPartition::new([
        ("reads ↑", vec![product_label("↑", "reads ↑")]),
        ("reads ↓", vec![product_label("↓", "reads ↓")]),
        (
            "shows no reading",
            device
                .iter()
                .flat_map(|d| [product_label("↑", d), product_label("↓", d)])
                .filter(|l| {
                    l != &product_label("↑", "reads ↑") && l != &product_label("↓", "reads ↓")
                })
                .collect(),
        ),
    ])?;
    for (outcome, fraction) in world_fractions(&joint, &branches)?.iter() {
        println!("fraction of worlds where the device {outcome}: {fraction:.6}");
    }
    Ok(())
}
