//! Born weights as relative amounts of branching worlds.
//!
//! A quantum state `Ψ` is taken to stand for a continuum of identical
//! universes, one for each nonzero multiple `cΨ`. Decomposing each of them
//! into orthogonal branches yields sets of worlds whose Lebesgue measures can
//! be compared; the fraction of worlds with outcome `i` is the projection
//! factor of the ray of `Ψ` onto the outcome subspace, which over ℂ equals the
//! Born weight `|⟨i|Ψ⟩|² / ‖Ψ‖²`.
//!
//! - [`field`]: real, complex and quaternion scalars and region samplers.
//! - [`hilbert`]: state vectors, partitions, projections, tensor products and
//!   the measurement interaction that creates branches.
//! - [`measure`]: projection factors, analytically and by Monte Carlo.
//! - [`worlds`]: world fractions, branch trees and repeated-trial statistics.
//! - [`inference`]: credences as fractions of worlds and model comparison.
//! - [`cli`]: the `fractional-worlds` command-line adapter.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod cli;
pub mod error;
pub mod field;
pub mod hilbert;
pub mod inference;
pub mod measure;
pub mod worlds;

pub use error::{Error, Result};
pub use field::{Scalar, ScalarField};
pub use hilbert::{OrthogonalPartition, StateVector};
pub use measure::{FactorEstimate, McConfig, RegionSpec};
pub use worlds::{FractionTable, FrequencyDistribution};
