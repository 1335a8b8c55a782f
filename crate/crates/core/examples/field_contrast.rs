//! Real and quaternionic scalars give different world fractions from the same
//! norms, and there the fraction of one branch depends on how the others are
//! split. Complex scalars are the exception.
//!
//! Run with `cargo run --example field_contrast`.

use fractional_worlds::worlds::{gleason_dependence_demo, world_fractions};
use fractional_worlds::{OrthogonalPartition, Scalar, ScalarField, StateVector};

fn main() -> fractional_worlds::Result<()> {
    let up = 3f64.sqrt() / 2.0;
    println!("state with ‖ψ↑‖² : ‖ψ↓‖² = 3 : 1");
    for field in ScalarField::ALL {
        // Unit phases that are genuinely non-real where the field allows it.
        let (p, q) = match field {
            ScalarField::Real => (Scalar::real(1.0), Scalar::real(-1.0)),
            ScalarField::Complex => (Scalar::complex(0.6, 0.8), Scalar::complex(0.0, 1.0)),
            ScalarField::Quaternion => (
                Scalar::quaternion(0.5, 0.5, 0.5, 0.5),
                Scalar::quaternion(0.0, 0.6, 0.0, 0.8),
            ),
        };
        let v = StateVector::new(field, ["up", "down"], vec![p.scale(up), q.scale(0.5)])?;
        let table = world_fractions(&v, &OrthogonalPartition::finest(&v))?;
        println!(
            "  {:<10} (ray dimension {}): up {:.6}, down {:.6}",
            field.name(),
            field.ray_dim(),
            table.get("up").unwrap(),
            table.get("down").unwrap()
        );
    }

    println!("\nfraction of ψ₁ before and after splitting ψ₂ into two halves");
    for field in ScalarField::ALL {
        let r = gleason_dependence_demo(field)?;
        println!(
            "  {:<10} {:.6} → {:.6} (shift {:+.6}){}",
            field.name(),
            r.coarse_fraction,
            r.fine_fraction,
            r.shift,
            if r.depends_on_refinement {
                "  depends on refinement"
            } else {
                ""
            }
        );
    }
    Ok(())
}
