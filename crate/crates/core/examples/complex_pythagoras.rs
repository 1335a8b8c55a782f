//! Over the complex numbers the projection factors of any orthogonal
//! decomposition add up to one, so the images of `U` tile its area.
//!
//! Run with `cargo run --release --example complex_pythagoras`.

use fractional_worlds::measure::pythagorean_check;
use fractional_worlds::{
    McConfig, OrthogonalPartition, RegionSpec, Scalar, ScalarField, StateVector,
};

fn main() -> fractional_worlds::Result<()> {
    let v = StateVector::new(
        ScalarField::Complex,
        ["a", "b", "c", "d"],
        vec![
            Scalar::complex(0.4, -0.3),
            Scalar::complex(0.1, 0.7),
            Scalar::complex(-0.5, 0.2),
            Scalar::complex(0.3, 0.3),
        ],
    )?;
    let partition =
        OrthogonalPartition::new([("x", vec!["a", "c"]), ("y", vec!["b"]), ("z", vec!["d"])])?;
    let report = pythagorean_check(
        &v,
        &partition,
        &RegionSpec::default(),
        &McConfig::new(400_000, 11),
    )?;

    for o in &report.outcomes {
        println!(
            "{}: analytic {:.6}, MC {:.6} ± {:.6}",
            o.outcome, o.analytic, o.mc_value, o.mc_std_error
        );
    }
    println!(
        "analytic sum {:.15} (deviation {:.1e})",
        report.analytic_sum, report.deviation
    );
    println!(
        "MC sum       {:.6} ± {:.6}",
        report.mc_sum, report.mc_combined_std_error
    );
    println!(
        "area of U {:.4}, summed image areas {:.4}",
        report.region_measure, report.image_measure_sum
    );
    Ok(())
}
