//! World fractions, branch trees and repeated-measurement statistics.
//!
//! For a state `Ψ = Σᵢ ψᵢ` over a field whose rays have real dimension `d`,
//! the fraction of worlds with outcome `i` is `‖ψᵢ‖^d / Σⱼ ‖ψⱼ‖^d`. Over ℂ the
//! denominator is `‖Ψ‖²` and the fractions are the Born weights; over ℝ and ℍ
//! the denominator depends on how `Ψ` is decomposed.
//!
//! Repeating a two-outcome measurement `N` times spreads the worlds over
//! up-counts binomially, which [`repeat_distribution`] computes exactly.

use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Scalar, ScalarField};
use crate::hilbert::{component_norms_sq, OrthogonalPartition, StateVector};

/// Fraction tables must sum to one within this tolerance.
pub const FRACTION_SUM_TOL: f64 = 1e-12;

/// Largest number of trials accepted by [`repeat_distribution`].
pub const MAX_TRIALS: u64 = 1_000_000;

/// Exact rational masses are offered below this many trials.
pub const MAX_EXACT_TRIALS: u32 = 64;

/// Largest number of leaves [`build_branch_tree`] will materialize.
pub const MAX_TREE_NODES: usize = 1_000_000;

/// Slack, in units of counts, for deciding whether a lattice point lies on a
/// window boundary.
const LATTICE_SLACK: f64 = 1e-9;

/// Outcome label → fraction of worlds, each in `[0, 1]`, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IndexMap<String, f64>", into = "IndexMap<String, f64>")]
pub struct FractionTable {
    entries: IndexMap<String, f64>,
}

impl FractionTable {
    pub fn new<L: Into<String>>(entries: impl IntoIterator<Item = (L, f64)>) -> Result<Self> {
        let mut map = IndexMap::new();
        for (label, f) in entries {
            let label = label.into();
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidFractionTable(format!(
                    "fraction {f} for `{label}` is outside [0, 1]"
                )));
            }
            if map.insert(label.clone(), f).is_some() {
                return Err(Error::InvalidFractionTable(format!(
                    "duplicate outcome `{label}`"
                )));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidFractionTable("no outcomes".into()));
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > FRACTION_SUM_TOL {
            return Err(Error::InvalidFractionTable(format!(
                "fractions sum to {total}, not 1"
            )));
        }
        Ok(FractionTable { entries: map })
    }

    /// `{label_true: f, label_false: 1 − f}`.
    pub fn binary(first: &str, second: &str, f: f64) -> Result<Self> {
        Self::new([(first, f), (second, 1.0 - f)])
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.get(label).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &IndexMap<String, f64> {
        &self.entries
    }
}

impl TryFrom<IndexMap<String, f64>> for FractionTable {
    type Error = Error;

    fn try_from(entries: IndexMap<String, f64>) -> Result<Self> {
        FractionTable::new(entries)
    }
}

impl From<FractionTable> for IndexMap<String, f64> {
    fn from(t: FractionTable) -> Self {
        t.entries
    }
}

/// Fractions of worlds of each outcome type in the ray of `v`.
pub fn world_fractions(v: &StateVector, partition: &OrthogonalPartition) -> Result<FractionTable> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let field = v.field();
    let amounts: Vec<(String, f64)> = component_norms_sq(v, partition)?
        .into_iter()
        .map(|(o, n)| (o, field.pow_dim_from_sq(n)))
        .collect();
    let total: f64 = amounts.iter().map(|(_, a)| a).sum();
    FractionTable::new(amounts.into_iter().map(|(o, a)| (o, a / total)))
}

/// Outcome of refining a decomposition `ψ = ψ₁ + ψ₂` into `ψ₁ + ψ₃ + ψ₄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GleasonReport {
    pub field: ScalarField,
    /// Fraction of `ψ₁` worlds under the coarse partition `{ψ₁, ψ₂}`.
    pub coarse_fraction: f64,
    /// Fraction of `ψ₁` worlds under the refinement `{ψ₁, ψ₃, ψ₄}`.
    pub fine_fraction: f64,
    pub shift: f64,
    /// The fraction of `ψ₁` changed although `ψ₁` itself did not.
    pub depends_on_refinement: bool,
}

/// Shows whether the fraction of one branch depends on how the others are
/// decomposed.
///
/// Uses `ψ₁ = e₁` and `ψ₂ = (e₂·u + e₃·u')/√2` for unit scalars `u, u'`, so
/// both branches have unit norm and `ψ₂` splits into two orthogonal halves.
pub fn gleason_dependence_demo(field: ScalarField) -> Result<GleasonReport> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (u, u2) = match field {
        ScalarField::Real => (Scalar::real(h), Scalar::real(-h)),
        ScalarField::Complex => (Scalar::complex(0.0, h), Scalar::complex(h, 0.0)),
        ScalarField::Quaternion => (
            Scalar::quaternion(0.0, 0.0, h, 0.0),
            Scalar::quaternion(0.0, 0.0, 0.0, h),
        ),
    };
    let state = StateVector::new(field, ["e1", "e2", "e3"], vec![Scalar::one(field), u, u2])?;
    let coarse = OrthogonalPartition::new([("psi1", vec!["e1"]), ("psi2", vec!["e2", "e3"])])?;
    let fine = coarse.refine(
        "psi2",
        ("psi3", &["e2".to_string()]),
        ("psi4", &["e3".to_string()]),
    )?;

    let coarse_fraction = world_fractions(&state, &coarse)?.get("psi1").expect("psi1");
    let fine_fraction = world_fractions(&state, &fine)?.get("psi1").expect("psi1");
    let shift = fine_fraction - coarse_fraction;
    Ok(GleasonReport {
        field,
        coarse_fraction,
        fine_fraction,
        shift,
        depends_on_refinement: shift.abs() > FRACTION_SUM_TOL,
    })
}

/// World fractions over the up-count `n` after `N` repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyDistribution {
    pub trials: u64,
    /// Per-trial fraction of the counted outcome.
    pub p: f64,
    /// `masses[n]` is the fraction of worlds with exactly `n` counted outcomes.
    pub masses: Vec<f64>,
    /// Mean of the frequency `n/N`.
    pub mean: f64,
    /// Variance of the frequency `n/N`, `p(1 − p)/N`.
    pub variance: f64,
}

impl FrequencyDistribution {
    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn frequency(&self, n: usize) -> f64 {
        n as f64 / self.trials as f64
    }

    fn in_window(&self, n: usize, center: f64, half_width: f64) -> bool {
        let big_n = self.trials as f64;
        (n as f64 - big_n * center).abs() <= big_n * half_width + LATTICE_SLACK
    }

    /// Fraction of worlds whose frequency lies within `half_width` of `center`.
    pub fn window_mass(&self, center: f64, half_width: f64) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .filter(|&(n, _)| self.in_window(n, center, half_width))
            .map(|(_, m)| m)
            .sum()
    }

    /// Fraction of worlds whose frequency lies farther than `half_width` from
    /// `center`. Summed directly so that tiny tails keep their precision.
    pub fn outside_mass(&self, center: f64, half_width: f64) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .filter(|&(n, _)| !self.in_window(n, center, half_width))
            .map(|(_, m)| m)
            .sum()
    }

    pub fn mode(&self) -> usize {
        self.masses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(n, _)| n)
            .unwrap_or(0)
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if !(1..=MAX_TRIALS).contains(&trials) {
        return Err(Error::out_of_range("N", trials, "1..=1000000"));
    }
    Ok(())
}

fn check_fraction(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::out_of_range("f", f, "[0, 1]"));
    }
    Ok(())
}

/// Exact binomial world-fraction distribution for `N` repetitions of a
/// measurement that yields the counted outcome in a fraction `f` of worlds.
///
/// Masses are evaluated as `exp(ln C(N, n) + n ln f + (N − n) ln(1 − f))` and
/// then divided by their sum, which removes the common rounding drift of the
/// log-gamma terms at large `N`.
pub fn repeat_distribution(f: f64, trials: u64) -> Result<FrequencyDistribution> {
    check_fraction(f)?;
    check_trials(trials)?;
    let big_n = trials as usize;
    let mut masses = vec![0.0; big_n + 1];
    if f == 0.0 || f == 1.0 {
        masses[if f == 0.0 { 0 } else { big_n }] = 1.0;
    } else {
        let ln_f = f.ln();
        let ln_g = (-f).ln_1p();
        let logs: Vec<f64> = (0..=trials)
            .map(|n| {
                statrs::function::factorial::ln_binomial(trials, n)
                    + n as f64 * ln_f
                    + (trials - n) as f64 * ln_g
            })
            .collect();
        let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (m, l) in masses.iter_mut().zip(&logs) {
            *m = (l - peak).exp();
        }
        let total: f64 = masses.iter().sum();
        masses.iter_mut().for_each(|m| *m /= total);
    }
    Ok(FrequencyDistribution {
        trials,
        p: f,
        masses,
        mean: f,
        variance: f * (1.0 - f) / trials as f64,
    })
}

/// Exact binomial masses `C(N,n) pⁿ (1−p)^(N−n)` as rationals, for `N < 64`.
pub fn exact_binomial_masses(p: &BigRational, trials: u32) -> Result<Vec<BigRational>> {
    if trials == 0 || trials >= MAX_EXACT_TRIALS {
        return Err(Error::out_of_range("N", trials, "1..64"));
    }
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::out_of_range("p", p, "[0, 1]"));
    }
    let q = BigRational::one() - p;
    let mut binom = BigInt::one();
    let mut masses = Vec::with_capacity(trials as usize + 1);
    for n in 0..=trials {
        if n > 0 {
            binom = binom * BigInt::from(trials - n + 1) / BigInt::from(n);
        }
        let term = BigRational::from_integer(binom.clone())
            * pow_rational(p, n)
            * pow_rational(&q, trials - n);
        masses.push(term);
    }
    Ok(masses)
}

fn pow_rational(x: &BigRational, k: u32) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * x)
}

/// Fraction of "maverick" worlds whose frequency deviates from `p` by more
/// than `k_sigma` standard deviations.
pub fn tail_fraction(dist: &FrequencyDistribution, k_sigma: f64) -> Result<f64> {
    if k_sigma.is_nan() || k_sigma <= 0.0 {
        return Err(Error::out_of_range("k_sigma", k_sigma, "> 0"));
    }
    Ok(dist.outside_mass(dist.p, k_sigma * dist.sigma()))
}

/// Distribution under naive branch counting: every binary measurement yields
/// exactly two equally counted worlds.
pub fn nbc_distribution(outcome_count: usize, trials: u64) -> Result<FrequencyDistribution> {
    if outcome_count != 2 {
        return Err(Error::out_of_range("outcome_count", outcome_count, "2"));
    }
    repeat_distribution(0.5, trials)
}

/// Maps an outcome sequence to the key of its coarse-grained world.
pub type GroupKey = Box<dyn Fn(&[&str]) -> String + Send + Sync>;

/// Merges leaves of a branch tree into coarser worlds.
pub enum CoarseGrain {
    /// Key is the number of occurrences of the label in the sequence.
    CountOf(String),
    /// Relabels each step outcome; sequences with equal relabelled forms merge.
    Relabel(IndexMap<String, String>),
    Custom(GroupKey),
}

impl CoarseGrain {
    pub fn count_of(label: &str) -> Self {
        CoarseGrain::CountOf(label.to_string())
    }

    fn key(&self, sequence: &[&str]) -> String {
        match self {
            CoarseGrain::CountOf(label) => {
                sequence.iter().filter(|s| **s == label).count().to_string()
            }
            CoarseGrain::Relabel(map) => {
                let relabelled: Vec<&str> = sequence
                    .iter()
                    .map(|s| map.get(*s).map_or(*s, String::as_str))
                    .collect();
                sequence_key(&relabelled)
            }
            CoarseGrain::Custom(f) => f(sequence),
        }
    }
}

impl fmt::Debug for CoarseGrain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoarseGrain::CountOf(l) => f.debug_tuple("CountOf").field(l).finish(),
            CoarseGrain::Relabel(m) => f.debug_tuple("Relabel").field(m).finish(),
            CoarseGrain::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Display key of an outcome sequence: concatenated when every label is a
/// single character (`"↑↓↑"`), comma-separated otherwise.
pub fn sequence_key(sequence: &[&str]) -> String {
    if sequence.iter().all(|s| s.chars().count() == 1) {
        sequence.concat()
    } else {
        sequence.join(",")
    }
}

/// Tree of outcome sequences with the fraction of worlds on each branch.
///
/// Level `k` holds the `∏_{j<k} |table_j|` nodes after `k` steps in
/// lexicographic order of their sequences, first step most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTree {
    steps: Vec<FractionTable>,
    levels: Vec<Vec<f64>>,
    coarse: Option<IndexMap<String, f64>>,
}

/// Builds the branch tree of independent measurements with the given
/// per-step fractions, optionally merging leaves.
pub fn build_branch_tree(
    per_step_fractions: &[FractionTable],
    coarse_grain: Option<&CoarseGrain>,
) -> Result<BranchTree> {
    let leaves = per_step_fractions
        .iter()
        .try_fold(1u128, |acc, t| acc.checked_mul(t.len() as u128))
        .unwrap_or(u128::MAX);
    if leaves > MAX_TREE_NODES as u128 {
        return Err(Error::TreeTooLarge(leaves, MAX_TREE_NODES));
    }

    let mut levels = vec![vec![1.0]];
    for table in per_step_fractions {
        let parent = levels.last().expect("root level");
        let mut next = Vec::with_capacity(parent.len() * table.len());
        for &pf in parent {
            next.extend(table.iter().map(|(_, f)| pf * f));
        }
        levels.push(next);
    }

    let mut tree = BranchTree {
        steps: per_step_fractions.to_vec(),
        levels,
        coarse: None,
    };
    if let Some(grain) = coarse_grain {
        let mut merged: IndexMap<String, f64> = IndexMap::new();
        for (seq, f) in tree.leaves() {
            *merged.entry(grain.key(&seq)).or_insert(0.0) += f;
        }
        tree.coarse = Some(merged);
    }
    Ok(tree)
}

impl BranchTree {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[FractionTable] {
        &self.steps
    }

    /// Outcome sequence of node `index` at `level`.
    pub fn sequence(&self, level: usize, mut index: usize) -> Vec<&str> {
        let mut seq = vec![""; level];
        for k in (0..level).rev() {
            let table = &self.steps[k];
            let (label, _) = table
                .entries
                .get_index(index % table.len())
                .expect("index in range");
            seq[k] = label.as_str();
            index /= table.len();
        }
        seq
    }

    /// `(sequence, fraction)` for every node at `level`.
    pub fn level(&self, level: usize) -> impl Iterator<Item = (Vec<&str>, f64)> + '_ {
        self.levels[level]
            .iter()
            .enumerate()
            .map(move |(i, &f)| (self.sequence(level, i), f))
    }

    pub fn level_fractions(&self, level: usize) -> &[f64] {
        &self.levels[level]
    }

    pub fn leaves(&self) -> impl Iterator<Item = (Vec<&str>, f64)> + '_ {
        self.level(self.depth())
    }

    /// Fraction of worlds whose first steps follow `sequence`.
    pub fn fraction_of(&self, sequence: &[&str]) -> Option<f64> {
        if sequence.len() > self.depth() {
            return None;
        }
        let mut index = 0;
        for (table, label) in self.steps.iter().zip(sequence) {
            index = index * table.len() + table.entries.get_index_of(*label)?;
        }
        Some(self.levels[sequence.len()][index])
    }

    /// Sum of the fractions of the children of node `index` at `level`.
    pub fn children_sum(&self, level: usize, index: usize) -> f64 {
        let width = self.steps[level].len();
        self.levels[level + 1][index * width..(index + 1) * width]
            .iter()
            .sum()
    }

    /// Leaf fractions grouped by how often `label` occurs.
    pub fn count_marginal(&self, label: &str) -> Vec<f64> {
        let mut out = vec![0.0; self.depth() + 1];
        for (seq, f) in self.leaves() {
            out[seq.iter().filter(|s| **s == label).count()] += f;
        }
        out
    }

    pub fn coarse(&self) -> Option<&IndexMap<String, f64>> {
        self.coarse.as_ref()
    }

    pub fn to_export(&self) -> BranchTreeExport {
        let nodes = (1..=self.depth())
            .flat_map(|lvl| self.level(lvl))
            .map(|(seq, fraction)| BranchNodeExport {
                key: sequence_key(&seq),
                sequence: seq.iter().map(|s| s.to_string()).collect(),
                fraction,
            })
            .collect();
        BranchTreeExport {
            depth: self.depth(),
            nodes,
            coarse: self.coarse.clone(),
        }
    }
}

/// JSON form of a [`BranchTree`]: every non-root node with its fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchTreeExport {
    pub depth: usize,
    pub nodes: Vec<BranchNodeExport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse: Option<IndexMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchNodeExport {
    pub key: String,
    pub sequence: Vec<String>,
    pub fraction: f64,
}
