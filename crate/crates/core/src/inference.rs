//! Credence as a fraction of worlds.
//!
//! A hypothesis is a branch of an earlier measurement (carrying `prior` of
//! all worlds) together with the fractions its later measurements branch
//! into. After an observation, the credence in a hypothesis is the share of
//! the worlds consistent with the observation that lie in its branch.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::worlds::{nbc_distribution, repeat_distribution, FractionTable, FRACTION_SUM_TOL};

pub const UP: &str = "↑";
pub const DOWN: &str = "↓";
pub const ALICE_UP: &str = "A↑";
pub const ALICE_DOWN: &str = "A↓";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    /// Fraction of all worlds in this hypothesis' branch.
    pub prior: f64,
    /// World fractions of each outcome per trial, within this branch.
    pub fractions: FractionTable,
}

impl Hypothesis {
    pub fn new(name: &str, prior: f64, fractions: FractionTable) -> Self {
        Hypothesis {
            name: name.to_string(),
            prior,
            fractions,
        }
    }
}

/// Alice measures `|↑⟩ + |↓⟩`. In `A↑` she prepares spins `|↑⟩`, in `A↓`
/// spins `|↑⟩ + |↓⟩`, which Bob then measures.
pub fn alice_bob() -> Vec<Hypothesis> {
    alice_bob_with_prior(0.5)
}

pub fn alice_bob_with_prior(prior_up: f64) -> Vec<Hypothesis> {
    vec![
        Hypothesis::new(
            ALICE_UP,
            prior_up,
            FractionTable::binary(UP, DOWN, 1.0).expect("valid"),
        ),
        Hypothesis::new(
            ALICE_DOWN,
            1.0 - prior_up,
            FractionTable::binary(UP, DOWN, 0.5).expect("valid"),
        ),
    ]
}

/// Splits an observation into outcome labels.
///
/// Comma- or whitespace-separated input is split on the separators; anything
/// else is read one character per outcome. `u`/`up` and `d`/`down` (any case)
/// become `↑`/`↓`.
pub fn parse_observation(text: &str) -> Vec<String> {
    let tokens: Vec<String> = if text.contains(',') || text.trim().contains(char::is_whitespace) {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    } else {
        text.trim().chars().map(String::from).collect()
    };
    tokens
        .into_iter()
        .map(|t| match t.to_ascii_lowercase().as_str() {
            "u" | "up" => UP.to_string(),
            "d" | "down" => DOWN.to_string(),
            _ => t,
        })
        .collect()
}

fn validate(hypotheses: &[Hypothesis], observed: &[String]) -> Result<()> {
    if hypotheses.len() < 2 {
        return Err(Error::InvalidHypotheses(
            "need at least two hypotheses".into(),
        ));
    }
    let mut names = std::collections::HashSet::new();
    for h in hypotheses {
        if !names.insert(h.name.as_str()) {
            return Err(Error::InvalidHypotheses(format!(
                "duplicate hypothesis `{}`",
                h.name
            )));
        }
        if !(0.0..=1.0).contains(&h.prior) {
            return Err(Error::InvalidHypotheses(format!(
                "prior {} of `{}` is outside [0, 1]",
                h.prior, h.name
            )));
        }
        if let Some(o) = observed.iter().find(|o| h.fractions.get(o).is_none()) {
            return Err(Error::UnknownOutcome(o.clone()));
        }
    }
    let total: f64 = hypotheses.iter().map(|h| h.prior).sum();
    if (total - 1.0).abs() > FRACTION_SUM_TOL {
        return Err(Error::InvalidHypotheses(format!(
            "priors sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// Fraction of all worlds lying in `h` and producing `observed`.
fn joint_fraction(h: &Hypothesis, observed: &[String]) -> f64 {
    observed.iter().fold(h.prior, |acc, o| {
        acc * h.fractions.get(o).expect("validated")
    })
}

/// Hypothesis name → credence, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CredenceTable {
    entries: IndexMap<String, f64>,
}

impl CredenceTable {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn entries(&self) -> &IndexMap<String, f64> {
        &self.entries
    }

    /// The hypothesis holding every consistent world, if there is one.
    pub fn certain(&self) -> Option<&str> {
        self.entries
            .iter()
            .find(|(_, &v)| v == 1.0)
            .map(|(k, _)| k.as_str())
    }
}

/// Credence in each hypothesis after `observed`.
///
/// Updates one outcome at a time and renormalizes after each, so long
/// sequences do not underflow.
pub fn update_credence(hypotheses: &[Hypothesis], observed: &[String]) -> Result<CredenceTable> {
    validate(hypotheses, observed)?;
    let mut weights: Vec<f64> = hypotheses.iter().map(|h| h.prior).collect();
    for o in observed {
        for (w, h) in weights.iter_mut().zip(hypotheses) {
            *w *= h.fractions.get(o).expect("validated");
        }
        let total: f64 = weights.iter().sum();
        if total == 0.0 {
            return Err(Error::NoConsistentWorlds);
        }
        weights.iter_mut().for_each(|w| *w /= total);
    }
    if weights.iter().sum::<f64>() == 0.0 {
        return Err(Error::NoConsistentWorlds);
    }
    Ok(CredenceTable {
        entries: hypotheses
            .iter()
            .map(|h| h.name.clone())
            .zip(weights)
            .collect(),
    })
}

/// How all worlds split with respect to an observation and a decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationAccounting {
    /// Worlds that produce the observation and lie in the decided hypothesis.
    pub correct: f64,
    /// Worlds that produce the observation but lie elsewhere.
    pub misled: f64,
    /// Worlds where the observation did not occur.
    pub not_observing: f64,
}

pub fn observation_accounting(
    hypotheses: &[Hypothesis],
    observed: &[String],
    decided: &str,
) -> Result<ObservationAccounting> {
    validate(hypotheses, observed)?;
    if !hypotheses.iter().any(|h| h.name == decided) {
        return Err(Error::UnknownHypothesis(decided.to_string()));
    }
    let (mut correct, mut misled) = (0.0, 0.0);
    for h in hypotheses {
        let joint = joint_fraction(h, observed);
        if h.name == decided {
            correct += joint;
        } else {
            misled += joint;
        }
    }
    if correct + misled == 0.0 {
        return Err(Error::NoConsistentWorlds);
    }
    Ok(ObservationAccounting {
        correct,
        misled,
        not_observing: 1.0 - correct - misled,
    })
}

/// Fraction of all worlds that produce `observed` but lie outside `decided`.
pub fn misled_fraction(
    hypotheses: &[Hypothesis],
    observed: &[String],
    decided: &str,
) -> Result<f64> {
    observation_accounting(hypotheses, observed, decided).map(|a| a.misled)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertaintyReport {
    pub credence: CredenceTable,
    /// Set when every consistent world lies in one hypothesis.
    pub certain_of: Option<String>,
}

/// Bob's position in the Alice/Bob experiment: a single `↓` rules out `A↑`.
pub fn first_down_certainty(observed: &[String]) -> Result<CertaintyReport> {
    let credence = update_credence(&alice_bob(), observed)?;
    let certain_of = credence.certain().map(str::to_string);
    Ok(CertaintyReport {
        credence,
        certain_of,
    })
}

/// A rival account of repeated two-outcome measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    /// Worlds branch in fractions equal to the Born weight.
    WorldFractions { name: String, p: f64 },
    /// Single outcomes occur with the Born probability.
    Probabilities { name: String, p: f64 },
    /// Each measurement makes exactly one world per outcome.
    NaiveBranchCounting { name: String },
}

impl Model {
    pub fn name(&self) -> &str {
        match self {
            Model::WorldFractions { name, .. }
            | Model::Probabilities { name, .. }
            | Model::NaiveBranchCounting { name } => name,
        }
    }

    pub fn p(&self) -> f64 {
        match self {
            Model::WorldFractions { p, .. } | Model::Probabilities { p, .. } => *p,
            Model::NaiveBranchCounting { .. } => 0.5,
        }
    }

    /// What the model's support number measures.
    pub fn quantity(&self) -> &'static str {
        match self {
            Model::Probabilities { .. } => "probability",
            _ => "world fraction",
        }
    }

    fn distribution(&self, trials: u64) -> Result<crate::worlds::FrequencyDistribution> {
        match self {
            Model::NaiveBranchCounting { .. } => nbc_distribution(2, trials),
            _ => repeat_distribution(self.p(), trials),
        }
    }
}

/// Everettian fractions, Copenhagen probabilities and naive branch counting
/// for spins with up-weight `born_up`.
pub fn spin_models(born_up: f64) -> Vec<Model> {
    vec![
        Model::WorldFractions {
            name: "EQM".into(),
            p: born_up,
        },
        Model::Probabilities {
            name: "CQM".into(),
            p: born_up,
        },
        Model::NaiveBranchCounting { name: "NBC".into() },
    ]
}

/// Born up-weight of `√3/2 |↑⟩ + 1/2 |↓⟩`.
pub const SPIN_BORN_UP: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSupport {
    pub model: String,
    pub quantity: String,
    pub p: f64,
    pub window: f64,
    pub support: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioComparison {
    pub observed_frequency: f64,
    /// Most supported model first.
    pub supports: Vec<ModelSupport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub trials: u64,
    pub scenarios: Vec<ScenarioComparison>,
}

impl ComparisonReport {
    pub fn support(&self, scenario: usize, model: &str) -> Option<f64> {
        self.scenarios
            .get(scenario)?
            .supports
            .iter()
            .find(|s| s.model == model)
            .map(|s| s.support)
    }
}

/// For each observed up-frequency, the support each model gives to seeing a
/// frequency within `window` of it in `trials` measurements.
///
/// Without an explicit window each model uses twice its own frequency
/// standard deviation. Supports are reported, never turned into verdicts.
pub fn model_compare(
    scenarios: &[f64],
    trials: u64,
    window: Option<f64>,
) -> Result<ComparisonReport> {
    model_compare_with(&spin_models(SPIN_BORN_UP), scenarios, trials, window)
}

pub fn model_compare_with(
    models: &[Model],
    scenarios: &[f64],
    trials: u64,
    window: Option<f64>,
) -> Result<ComparisonReport> {
    if let Some(&bad) = scenarios.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::out_of_range("scenario frequency", bad, "[0, 1]"));
    }
    if let Some(w) = window {
        if w.is_nan() || w < 0.0 {
            return Err(Error::out_of_range("window", w, ">= 0"));
        }
    }
    let dists = models
        .iter()
        .map(|m| m.distribution(trials))
        .collect::<Result<Vec<_>>>()?;
    let scenarios = scenarios
        .iter()
        .map(|&freq| {
            let mut supports: Vec<ModelSupport> = models
                .iter()
                .zip(&dists)
                .map(|(m, d)| {
                    let w = window.unwrap_or(2.0 * d.sigma());
                    ModelSupport {
                        model: m.name().to_string(),
                        quantity: m.quantity().to_string(),
                        p: m.p(),
                        window: w,
                        support: d.window_mass(freq, w),
                    }
                })
                .collect();
            supports.sort_by(|a, b| b.support.total_cmp(&a.support));
            ScenarioComparison {
                observed_frequency: freq,
                supports,
            }
        })
        .collect();
    Ok(ComparisonReport { trials, scenarios })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfLifeReport {
    pub n_atoms: u64,
    /// Per-atom branching into decayed and intact worlds.
    pub per_atom: FractionTable,
    /// Standard deviation of the decayed fraction.
    pub sigma: f64,
    /// Fraction of worlds whose decayed fraction is within 3σ of the target.
    pub within_3_sigma: f64,
    /// Fraction of worlds in which every atom decayed.
    pub all_decayed: f64,
}

/// Independent atoms, each branching into decayed worlds in a fraction
/// `target` of its worlds.
pub fn half_life_report(target: f64, n_atoms: u64) -> Result<HalfLifeReport> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::out_of_range("target", target, "(0, 1)"));
    }
    let dist = repeat_distribution(target, n_atoms)?;
    let exponent = i32::try_from(n_atoms).unwrap_or(i32::MAX);
    Ok(HalfLifeReport {
        n_atoms,
        per_atom: FractionTable::binary("decayed", "intact", target)?,
        sigma: dist.sigma(),
        within_3_sigma: dist.window_mass(target, 3.0 * dist.sigma()),
        all_decayed: target.powi(exponent),
    })
}

/// Scenario file: `{"hypotheses": [...], "observed": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub hypotheses: Vec<Hypothesis>,
    pub observed: Vec<String>,
    /// Hypothesis whose misled fraction should be reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decided: Option<String>,
}

impl ScenarioFile {
    pub fn alice_bob(observed: Vec<String>) -> Self {
        ScenarioFile {
            hypotheses: alice_bob(),
            observed,
            decided: Some(ALICE_UP.into()),
        }
    }
}
