//! Lebesgue measure on rays and projection factors `|P(U)| / |U|`.
//!
//! Two independent routes are provided. [`projection_factor_analytic`] uses
//! norm ratios. [`projection_factor_mc`] builds an orthonormal frame for the
//! image line, bounds the image of `U` in that frame, and estimates its
//! measure by hit-or-miss counting; the only closed form it relies on is the
//! measure of `U` itself.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{stream_rng, Scalar, ScalarField};
use crate::hilbert::{component_norms_sq, project, OrthogonalPartition, StateVector};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 20_190_415;

/// Worker count used for Monte Carlo runs unless overridden. Fixed rather than
/// tied to the machine so results are reproducible everywhere.
pub const DEFAULT_WORKERS: usize = 8;

/// Smallest sample count accepted by the Monte Carlo estimators.
pub const MIN_SAMPLES: usize = 1_000;

/// Analytic identities are asserted to this absolute tolerance.
pub const ANALYTIC_TOL: f64 = 1e-12;

/// Monte Carlo assertions allow this many standard errors.
pub const MC_SIGMAS: f64 = 4.0;

/// A measurable set `U` of scalars, in component coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum RegionSpec {
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Box { bounds: Vec<(f64, f64)> },
}

impl Default for RegionSpec {
    /// `1 ≤ |c| ≤ 2`, which stays away from the origin.
    fn default() -> Self {
        RegionSpec::Annulus {
            inner: 1.0,
            outer: 2.0,
        }
    }
}

impl RegionSpec {
    /// Axis-aligned box with the same bounds on every component.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        RegionSpec::Box {
            bounds: vec![(lo, hi); dim],
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let ok = |x: f64| x.is_finite();
        match self {
            RegionSpec::Ball { radius } => {
                if !(ok(*radius) && *radius > 0.0) {
                    return Err(Error::DegenerateRegion(format!("ball radius {radius}")));
                }
            }
            RegionSpec::Annulus { inner, outer } => {
                if !(ok(*inner) && ok(*outer) && 0.0 < *inner && inner < outer) {
                    return Err(Error::DegenerateRegion(format!(
                        "annulus needs 0 < inner < outer, got ({inner}, {outer})"
                    )));
                }
            }
            RegionSpec::Box { bounds } => {
                if bounds.len() != dim {
                    return Err(Error::DegenerateRegion(format!(
                        "box has {} bounds for {dim} components",
                        bounds.len()
                    )));
                }
                if let Some((lo, hi)) = bounds
                    .iter()
                    .find(|(lo, hi)| !(ok(*lo) && ok(*hi) && lo < hi))
                {
                    return Err(Error::DegenerateRegion(format!("box side [{lo}, {hi}]")));
                }
            }
        }
        Ok(())
    }

    /// Closed-form `dim`-dimensional Lebesgue measure.
    pub fn measure(&self, dim: usize) -> f64 {
        match self {
            RegionSpec::Ball { radius } => unit_ball_volume(dim) * radius.powi(dim as i32),
            RegionSpec::Annulus { inner, outer } => {
                unit_ball_volume(dim) * (outer.powi(dim as i32) - inner.powi(dim as i32))
            }
            RegionSpec::Box { bounds } => bounds.iter().map(|(lo, hi)| hi - lo).product(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let r2 = || x.iter().map(|c| c * c).sum::<f64>();
        match self {
            RegionSpec::Ball { radius } => r2() <= radius * radius,
            RegionSpec::Annulus { inner, outer } => {
                let r2 = r2();
                inner * inner <= r2 && r2 <= outer * outer
            }
            RegionSpec::Box { bounds } => {
                x.iter().zip(bounds).all(|(c, (lo, hi))| lo <= c && c <= hi)
            }
        }
    }

    pub fn bounding_box(&self, dim: usize) -> Vec<(f64, f64)> {
        match self {
            RegionSpec::Ball { radius: r } | RegionSpec::Annulus { outer: r, .. } => {
                vec![(-r, *r); dim]
            }
            RegionSpec::Box { bounds } => bounds.clone(),
        }
    }
}

fn unit_ball_volume(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        _ => {
            let half = dim as f64 / 2.0;
            PI.powf(half) / statrs::function::gamma::gamma(half + 1.0)
        }
    }
}

/// Dense square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidState(
                "matrix must be square and nonempty".into(),
            ));
        }
        Ok(RealMatrix {
            dim,
            data: rows.concat(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        RealMatrix { dim, data }
    }

    /// The real 2×2 matrix of `z ↦ c·z` on ℂ ≅ ℝ².
    pub fn complex_multiplication(c: &Scalar) -> Self {
        let [a, b] = [
            c.components()[0],
            c.components().get(1).copied().unwrap_or(0.0),
        ];
        RealMatrix {
            dim: 2,
            data: vec![a, -b, b, a],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (row, o) in self.data.chunks_exact(self.dim).zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .expect("nonempty range");
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for row in col + 1..n {
                let factor = a[row * n + col] / p;
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<RealMatrix> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut inv = RealMatrix::identity(n).data;
        for col in 0..n {
            let pivot =
                (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
            if a[pivot * n + col] == 0.0 {
                return None;
            }
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
            let p = a[col * n + col];
            for k in 0..n {
                a[col * n + k] /= p;
                inv[col * n + k] /= p;
            }
            for row in (0..n).filter(|&r| r != col) {
                let factor = a[row * n + col];
                if factor != 0.0 {
                    for k in 0..n {
                        a[row * n + k] -= factor * a[col * n + k];
                        inv[row * n + k] -= factor * inv[col * n + k];
                    }
                }
            }
        }
        Some(RealMatrix { dim: n, data: inv })
    }
}

/// Factor by which a linear map scales `dim`-dimensional Lebesgue measure,
/// `√det(MᵀM) = |det M|`.
pub fn linear_map_measure_scale(matrix: &RealMatrix) -> f64 {
    matrix.det().abs()
}

/// `√det(GᵀG)` for the columns `generators` (each of the same length): the
/// volume of the parallelepiped they span.
pub fn gram_measure_scale(generators: &[Vec<f64>]) -> Result<f64> {
    let gram: Vec<Vec<f64>> = generators
        .iter()
        .map(|a| {
            generators
                .iter()
                .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect();
    Ok(RealMatrix::from_rows(&gram)?.det().max(0.0).sqrt())
}

/// Real coordinates of `v·e_k` for each of the `ray_dim` units `e_k`.
///
/// These span the line `{v·c}` as a real subspace of `ℝ^(d·dim)`.
pub fn line_generators(v: &StateVector) -> Vec<Vec<f64>> {
    let field = v.field();
    let d = field.ray_dim();
    (0..d)
        .map(|k| {
            let mut unit = [0.0; 4];
            unit[k] = 1.0;
            let e = Scalar::from_components(field, &unit[..d]).expect("unit scalar");
            v.coeffs()
                .iter()
                .flat_map(|c| c.mul_same(&e).components().to_vec())
                .collect()
        })
        .collect()
}

/// `dim`-dimensional measure of `{c·v : c ∈ region}`.
pub fn measure_of_region(
    field: ScalarField,
    region: &RegionSpec,
    line_rep: &StateVector,
) -> Result<f64> {
    if line_rep.field() != field {
        return Err(Error::FieldMismatch {
            left: field,
            right: line_rep.field(),
        });
    }
    if line_rep.is_zero() {
        return Err(Error::ZeroVector);
    }
    region.validate(field.ray_dim())?;
    Ok(region.measure(field.ray_dim()) * field.pow_dim_from_sq(line_rep.norm_sq()))
}

/// Projection factor of the line through `v` onto the outcome subspace:
/// `(‖Pᵢv‖/‖v‖)^d` with `d` the ray dimension of the field.
pub fn projection_factor_analytic(
    v: &StateVector,
    partition: &OrthogonalPartition,
    outcome: &str,
) -> Result<f64> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let norms = component_norms_sq(v, partition)?;
    let (_, part) = norms
        .iter()
        .find(|(o, _)| o == outcome)
        .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))?;
    let total: f64 = norms.iter().map(|(_, n)| n).sum();
    Ok(v.field().pow_dim_from_sq(part / total))
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 100_000,
            seed: DEFAULT_SEED,
            workers: DEFAULT_WORKERS,
        }
    }
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        McConfig {
            samples,
            seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::out_of_range("samples", self.samples, ">= 1000"));
        }
        if self.workers == 0 {
            return Err(Error::out_of_range("workers", 0, ">= 1"));
        }
        Ok(())
    }
}

/// A Monte Carlo estimate of a projection factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl FactorEstimate {
    pub const EXACT_ZERO: FactorEstimate = FactorEstimate {
        value: 0.0,
        std_error: 0.0,
        n_samples: 0,
    };

    /// `|self − expected|` in units of the standard error.
    ///
    /// A zero-variance estimate (every sample hit, or an exact zero) is exact
    /// up to rounding, so it agrees when within [`ANALYTIC_TOL`].
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = (self.value - expected).abs();
        if self.std_error == 0.0 {
            if diff <= ANALYTIC_TOL * expected.abs().max(1.0) {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.std_error
        }
    }
}

/// Hit-or-miss estimator for the measure of `{w·c : c ∈ region}` inside the
/// image line's own orthonormal frame.
struct ImageCounter {
    region: RegionSpec,
    dim: usize,
    to_source: RealMatrix,
    image_box: Vec<(f64, f64)>,
}

impl ImageCounter {
    fn new(w: &StateVector, region: &RegionSpec) -> Result<Self> {
        let dim = w.field().ray_dim();
        let generators = line_generators(w);
        let frame = orthonormal_frame(&generators).ok_or(Error::ZeroVector)?;
        // coords(w·c) = M c with M[j][k] = ⟨frame_j, generator_k⟩
        let rows: Vec<Vec<f64>> = frame
            .iter()
            .map(|f| generators.iter().map(|g| dot(f, g)).collect())
            .collect();
        let to_image = RealMatrix::from_rows(&rows)?;
        let to_source = to_image.inverse().ok_or(Error::ZeroVector)?;

        let source_box = region.bounding_box(dim);
        let mut image_box = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
        let mut corner = vec![0.0; dim];
        let mut image = vec![0.0; dim];
        for mask in 0..1usize << dim {
            for (k, c) in corner.iter_mut().enumerate() {
                let (lo, hi) = source_box[k];
                *c = if mask >> k & 1 == 1 { hi } else { lo };
            }
            to_image.apply(&corner, &mut image);
            for ((lo, hi), y) in image_box.iter_mut().zip(&image) {
                *lo = lo.min(*y);
                *hi = hi.max(*y);
            }
        }
        Ok(ImageCounter {
            region: region.clone(),
            dim,
            to_source,
            image_box,
        })
    }

    fn box_measure(&self) -> f64 {
        self.image_box.iter().map(|(lo, hi)| hi - lo).product()
    }

    fn count_hits(&self, n: usize, seed: u64, stream: u64) -> u64 {
        let mut rng = stream_rng(seed, stream);
        let mut y = [0.0; 4];
        let mut c = [0.0; 4];
        let d = self.dim;
        let mut hits = 0;
        for _ in 0..n {
            for (slot, &(lo, hi)) in y[..d].iter_mut().zip(&self.image_box) {
                *slot = rng.gen_range(lo..hi);
            }
            self.to_source.apply(&y[..d], &mut c[..d]);
            if self.region.contains(&c[..d]) {
                hits += 1;
            }
        }
        hits
    }

    /// Splits `n` samples over `workers` streams starting at `stream_base`.
    fn parallel_hits(&self, n: usize, seed: u64, stream_base: u64, workers: usize) -> u64 {
        (0..workers)
            .into_par_iter()
            .map(|w| {
                let share = n / workers + usize::from(w < n % workers);
                self.count_hits(share, seed, stream_base + w as u64)
            })
            .sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Modified Gram-Schmidt; `None` if the vectors are linearly dependent.
fn orthonormal_frame(vectors: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut u = v.clone();
        for f in &frame {
            let p = dot(f, &u);
            u.iter_mut().zip(f).for_each(|(x, y)| *x -= p * y);
        }
        let n = dot(&u, &u).sqrt();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        u.iter_mut().for_each(|x| *x /= n);
        frame.push(u);
    }
    Some(frame)
}

fn estimate_factor(
    v: &StateVector,
    partition: &OrthogonalPartition,
    outcome: &str,
    region: &RegionSpec,
    config: &McConfig,
    stream_base: u64,
) -> Result<FactorEstimate> {
    config.validate()?;
    let source_measure = measure_of_region(v.field(), region, v)?;
    let image_rep = project(v, partition, outcome)?;
    if image_rep.is_zero() {
        return Ok(FactorEstimate::EXACT_ZERO);
    }
    let counter = ImageCounter::new(&image_rep, region)?;
    let hits = counter.parallel_hits(config.samples, config.seed, stream_base, config.workers);
    let n = config.samples as f64;
    let q = hits as f64 / n;
    let scale = counter.box_measure() / source_measure;
    Ok(FactorEstimate {
        value: scale * q,
        std_error: scale * (q * (1.0 - q) / n).sqrt(),
        n_samples: config.samples,
    })
}

/// Monte Carlo estimate of `|Pᵢ(U)| / |U|` for `U = {c·v : c ∈ region}`.
///
/// The result is bit-identical for a fixed `(seed, workers)` pair. An outcome
/// whose projection vanishes returns an exact zero without sampling.
pub fn projection_factor_mc(
    v: &StateVector,
    partition: &OrthogonalPartition,
    outcome: &str,
    region: &RegionSpec,
    config: &McConfig,
) -> Result<FactorEstimate> {
    estimate_factor(v, partition, outcome, region, config, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeFactor {
    pub outcome: String,
    pub analytic: f64,
    pub mc_value: f64,
    pub mc_std_error: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PythagoreanReport {
    pub outcomes: Vec<OutcomeFactor>,
    pub analytic_sum: f64,
    /// `analytic_sum − 1`.
    pub deviation: f64,
    pub mc_sum: f64,
    pub mc_combined_std_error: f64,
    /// `|U|` in the line through the state.
    pub region_measure: f64,
    /// Estimated `Σᵢ |Pᵢ(U)|`.
    pub image_measure_sum: f64,
    /// `|mc_sum − 1|` is within `MC_SIGMAS` combined standard errors.
    pub mc_consistent: bool,
}

impl PythagoreanReport {
    pub fn analytic_holds(&self) -> bool {
        self.deviation.abs() < ANALYTIC_TOL
    }
}

/// Checks `Σᵢ π_{ℂv,Wᵢ} = 1` analytically and by Monte Carlo.
///
/// Each outcome gets its own block of RNG streams, so the per-outcome
/// estimates are independent.
pub fn pythagorean_check(
    v: &StateVector,
    partition: &OrthogonalPartition,
    region: &RegionSpec,
    config: &McConfig,
) -> Result<PythagoreanReport> {
    if v.field() != ScalarField::Complex {
        return Err(Error::UnsupportedField {
            expected: "complex",
            actual: v.field(),
        });
    }
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    partition.check_basis(v)?;
    let region_measure = measure_of_region(v.field(), region, v)?;

    let mut outcomes = Vec::with_capacity(partition.len());
    for (idx, outcome) in partition.outcomes().enumerate() {
        let analytic = projection_factor_analytic(v, partition, outcome)?;
        let stream_base = (idx * config.workers) as u64;
        let est = estimate_factor(v, partition, outcome, region, config, stream_base)?;
        outcomes.push(OutcomeFactor {
            outcome: outcome.to_string(),
            analytic,
            mc_value: est.value,
            mc_std_error: est.std_error,
            n: est.n_samples,
        });
    }
    let analytic_sum: f64 = outcomes.iter().map(|o| o.analytic).sum();
    let mc_sum: f64 = outcomes.iter().map(|o| o.mc_value).sum();
    let mc_combined_std_error = outcomes
        .iter()
        .map(|o| o.mc_std_error.powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(PythagoreanReport {
        outcomes,
        analytic_sum,
        deviation: analytic_sum - 1.0,
        mc_sum,
        mc_combined_std_error,
        region_measure,
        image_measure_sum: mc_sum * region_measure,
        mc_consistent: (mc_sum - 1.0).abs() <= MC_SIGMAS * mc_combined_std_error,
    })
}
