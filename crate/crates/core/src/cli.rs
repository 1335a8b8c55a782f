//! Command-line front end.
//!
//! Every command is a thin adapter over a library call: it parses inputs,
//! invokes the operation and renders the result as JSON or CSV. CSV floats
//! are written with 17 significant digits so that they round-trip exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Scalar, ScalarField};
use crate::hilbert::{OrthogonalPartition, StateFile, StateVector};
use crate::inference::{
    first_down_certainty, model_compare, observation_accounting, parse_observation,
    update_credence, ObservationAccounting, ScenarioFile,
};
use crate::measure::{
    projection_factor_analytic, projection_factor_mc, pythagorean_check, McConfig, RegionSpec,
    DEFAULT_SEED, DEFAULT_WORKERS,
};
use crate::worlds::{
    build_branch_tree, repeat_distribution, tail_fraction, world_fractions, CoarseGrain,
    FractionTable, FrequencyDistribution,
};

/// Analytic identities checked by the CLI before reporting.
const CLI_INVARIANT_TOL: f64 = 1e-9;

pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Born weights as relative amounts of branching worlds.
#[derive(Debug, Clone, Parser)]
#[command(name = "fractional-worlds", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// State (JSON) or scenario file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Monte Carlo samples per estimate (at least 1000).
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Frequency window for `compare` (default: 2σ of each model).
    #[arg(long, global = true)]
    pub window: Option<f64>,

    /// Report the fraction of worlds deviating by more than this many σ.
    #[arg(long, global = true)]
    pub ksigma: Option<f64>,

    /// Scalar field of an inline state.
    #[arg(long, global = true, value_parser = parse_field)]
    pub field: Option<ScalarField>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Projection factor of one outcome, analytic and Monte Carlo.
    Factor {
        #[command(flatten)]
        state: InlineState,
        #[arg(long)]
        outcome: String,
        /// `annulus:1,2`, `ball:1` or `box:lo,hi;lo,hi;...`
        #[arg(long, default_value = "annulus:1,2", value_parser = parse_region)]
        region: RegionSpec,
    },
    /// Sum of projection factors over a partition.
    Pythagoras {
        #[command(flatten)]
        state: InlineState,
        #[arg(long, default_value = "annulus:1,2", value_parser = parse_region)]
        region: RegionSpec,
    },
    /// Fraction of worlds of each outcome.
    Fractions {
        #[command(flatten)]
        state: InlineState,
    },
    /// World fractions over counts after N repetitions.
    Repeat {
        #[arg(long)]
        fraction: f64,
        #[arg(long)]
        trials: u64,
    },
    /// Branch tree of N repetitions of a two-outcome measurement, or of the
    /// per-step fraction tables in --input.
    Tree {
        #[arg(long, required_unless_present = "input")]
        fraction: Option<f64>,
        #[arg(long, required_unless_present = "input")]
        trials: Option<usize>,
        /// Merge leaves by the number of occurrences of this label.
        #[arg(long)]
        group_by_count: Option<String>,
    },
    /// Credences after an observation (Alice/Bob unless --input is given).
    Infer {
        /// Overrides the scenario's observation, e.g. `↑↑` or `u,u,d`.
        #[arg(long)]
        observed: Option<String>,
        /// Hypothesis whose misled fraction is reported.
        #[arg(long)]
        decided: Option<String>,
    },
    /// Support of EQM, CQM and NBC for observed up-frequencies.
    Compare {
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 0.75])]
        scenarios: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Decay of independent atoms as branching.
    Halflife {
        #[arg(long, default_value_t = 0.5)]
        target: f64,
        #[arg(long)]
        atoms: u64,
    },
}

/// A state given on the command line rather than in a file.
#[derive(Debug, Clone, Default, Args)]
pub struct InlineState {
    /// Basis labels, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub basis: Vec<String>,
    /// Coefficients separated by `;`, components by `,` (a single component is
    /// read as a real number).
    #[arg(long)]
    pub amplitudes: Option<String>,
    /// Outcome groups, `out=l1,l2;out2=l3`. Defaults to one per basis label.
    #[arg(long)]
    pub partition: Option<String>,
}

fn parse_field(s: &str) -> Result<ScalarField, String> {
    ScalarField::from_name(s)
        .ok_or_else(|| format!("unknown field `{s}` (real, complex, quaternion)"))
}

fn parse_numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect()
}

pub fn parse_region(s: &str) -> Result<RegionSpec, String> {
    let (shape, args) = s
        .split_once(':')
        .ok_or_else(|| format!("region `{s}` needs the form shape:args"))?;
    match shape {
        "ball" => match parse_numbers(args)?.as_slice() {
            [r] => Ok(RegionSpec::Ball { radius: *r }),
            _ => Err("ball takes one radius".into()),
        },
        "annulus" => match parse_numbers(args)?.as_slice() {
            [a, b] => Ok(RegionSpec::Annulus {
                inner: *a,
                outer: *b,
            }),
            _ => Err("annulus takes inner,outer".into()),
        },
        "box" => args
            .split(';')
            .map(|side| match parse_numbers(side)?.as_slice() {
                [lo, hi] => Ok((*lo, *hi)),
                _ => Err(format!("box side `{side}` needs lo,hi")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|bounds| RegionSpec::Box { bounds }),
        other => Err(format!("unknown region shape `{other}`")),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_state(
    config: &RunConfig,
    inline: &InlineState,
) -> Result<(StateVector, OrthogonalPartition), CliError> {
    if let Some(path) = &config.input {
        let file: StateFile = parse_json(path)?;
        let (state, partition) = file
            .to_state_and_partition()
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return Ok((state, partition));
    }
    let amplitudes = inline
        .amplitudes
        .as_deref()
        .ok_or_else(|| CliError::Input("no state: pass --input or --amplitudes".into()))?;
    let field = config.field.unwrap_or(ScalarField::Complex);
    let coeffs = amplitudes
        .split(';')
        .enumerate()
        .map(|(i, entry)| {
            let parts = parse_numbers(entry)
                .map_err(|e| CliError::Input(format!("amplitudes[{i}]: {e}")))?;
            let scalar = if parts.len() == 1 {
                Scalar::real(parts[0]).embed(field)
            } else {
                Scalar::from_components(field, &parts)
            };
            scalar.map_err(|e| CliError::Input(format!("amplitudes[{i}]: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let basis = if inline.basis.is_empty() {
        (0..coeffs.len()).map(|i| i.to_string()).collect()
    } else {
        inline.basis.clone()
    };
    let state = StateVector::new(field, basis, coeffs)
        .map_err(|e| CliError::Input(format!("basis: {e}")))?;
    let partition = match &inline.partition {
        None => OrthogonalPartition::finest(&state),
        Some(spec) => {
            let groups = spec
                .split(';')
                .map(|g| {
                    let (name, labels) = g.split_once('=').ok_or_else(|| {
                        CliError::Input(format!("partition: `{g}` needs outcome=labels"))
                    })?;
                    Ok((
                        name.trim().to_string(),
                        labels
                            .split(',')
                            .map(|l| l.trim().to_string())
                            .collect::<Vec<_>>(),
                    ))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let p = OrthogonalPartition::new(groups)
                .map_err(|e| CliError::Input(format!("partition: {e}")))?;
            p.check_basis(&state)
                .map_err(|e| CliError::Input(format!("partition: {e}")))?;
            p
        }
    };
    Ok((state, partition))
}

fn mc_config(config: &RunConfig) -> McConfig {
    McConfig {
        samples: config.samples,
        seed: config.seed,
        workers: DEFAULT_WORKERS,
    }
}

/// 17 significant digits, locale-free.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

/// One row of a distribution table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub n: u64,
    pub frequency: f64,
    pub fraction: f64,
}

pub fn distribution_rows(dist: &FrequencyDistribution) -> Vec<DistributionRow> {
    dist.masses
        .iter()
        .enumerate()
        .map(|(n, &fraction)| DistributionRow {
            n: n as u64,
            frequency: dist.frequency(n),
            fraction,
        })
        .collect()
}

/// Plot-ready rows `(n, n/N, fraction)` ordered by `n`.
pub fn emit_distribution_table(dist: &FrequencyDistribution, format: OutputFormat) -> String {
    let rows = distribution_rows(dist);
    match format {
        OutputFormat::Json => to_json(&rows),
        OutputFormat::Csv => csv_table(
            &["n", "frequency", "fraction"],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    format_float(r.frequency),
                    format_float(r.fraction),
                ]
            }),
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorRow {
    pub outcome: String,
    pub analytic: f64,
    pub mc_value: f64,
    pub mc_std_error: f64,
    pub n: usize,
}

fn factor_csv<'a>(rows: impl IntoIterator<Item = (&'a str, f64, f64, f64, usize)>) -> String {
    csv_table(
        &["outcome", "analytic", "mc_value", "mc_std_error", "n"],
        rows.into_iter().map(|(o, a, m, s, n)| {
            vec![
                o.to_string(),
                format_float(a),
                format_float(m),
                format_float(s),
                n.to_string(),
            ]
        }),
    )
}

fn fraction_csv<'a>(key: &str, rows: impl IntoIterator<Item = (&'a str, f64)>) -> String {
    csv_table(
        &[key, "fraction"],
        rows.into_iter()
            .map(|(k, f)| vec![k.to_string(), format_float(f)]),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatReport {
    pub trials: u64,
    pub p: f64,
    pub mean: f64,
    pub variance: f64,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ksigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    pub rows: Vec<DistributionRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferReport {
    pub observed: Vec<String>,
    pub credence: IndexMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certain_of: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decided: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accounting: Option<ObservationAccounting>,
}

/// Runs one command and returns the rendered report.
pub fn run(config: &RunConfig) -> Result<String, CliError> {
    let format = config.format;
    match &config.command {
        Command::Factor {
            state,
            outcome,
            region,
        } => {
            let (v, partition) = load_state(config, state)?;
            let analytic = projection_factor_analytic(&v, &partition, outcome)?;
            let est = projection_factor_mc(&v, &partition, outcome, region, &mc_config(config))?;
            let row = FactorRow {
                outcome: outcome.clone(),
                analytic,
                mc_value: est.value,
                mc_std_error: est.std_error,
                n: est.n_samples,
            };
            Ok(match format {
                OutputFormat::Json => to_json(&row),
                OutputFormat::Csv => factor_csv([(
                    outcome.as_str(),
                    analytic,
                    est.value,
                    est.std_error,
                    est.n_samples,
                )]),
            })
        }
        Command::Pythagoras { state, region } => {
            let (v, partition) = load_state(config, state)?;
            let report = pythagorean_check(&v, &partition, region, &mc_config(config))?;
            if report.deviation.abs() > CLI_INVARIANT_TOL {
                return Err(CliError::Invariant(format!(
                    "projection factors sum to {} (deviation {:e})",
                    report.analytic_sum, report.deviation
                )));
            }
            Ok(match format {
                OutputFormat::Json => to_json(&report),
                OutputFormat::Csv => factor_csv(report.outcomes.iter().map(|o| {
                    (
                        o.outcome.as_str(),
                        o.analytic,
                        o.mc_value,
                        o.mc_std_error,
                        o.n,
                    )
                })),
            })
        }
        Command::Fractions { state } => {
            let (v, partition) = load_state(config, state)?;
            let table = world_fractions(&v, &partition)?;
            let total: f64 = table.iter().map(|(_, f)| f).sum();
            if (total - 1.0).abs() > CLI_INVARIANT_TOL {
                return Err(CliError::Invariant(format!(
                    "world fractions sum to {total}"
                )));
            }
            Ok(match format {
                OutputFormat::Json => to_json(&table),
                OutputFormat::Csv => fraction_csv("outcome", table.iter()),
            })
        }
        Command::Repeat { fraction, trials } => {
            let dist = repeat_distribution(*fraction, *trials)?;
            let tail = config.ksigma.map(|k| tail_fraction(&dist, k)).transpose()?;
            Ok(match format {
                OutputFormat::Json => to_json(&RepeatReport {
                    trials: dist.trials,
                    p: dist.p,
                    mean: dist.mean,
                    variance: dist.variance,
                    sigma: dist.sigma(),
                    ksigma: config.ksigma,
                    tail_fraction: tail,
                    rows: distribution_rows(&dist),
                }),
                OutputFormat::Csv => emit_distribution_table(&dist, format),
            })
        }
        Command::Tree {
            fraction,
            trials,
            group_by_count,
        } => {
            let steps: Vec<FractionTable> = match &config.input {
                Some(path) => parse_json(path)?,
                None => match (fraction, trials) {
                    (Some(f), Some(n)) => vec![FractionTable::binary("↑", "↓", *f)?; *n],
                    _ => {
                        return Err(CliError::Input(
                            "tree needs --fraction and --trials, or --input".into(),
                        ))
                    }
                },
            };
            let grain = group_by_count.as_deref().map(CoarseGrain::count_of);
            let tree = build_branch_tree(&steps, grain.as_ref())?;
            Ok(match format {
                OutputFormat::Json => to_json(&tree.to_export()),
                OutputFormat::Csv => match tree.coarse() {
                    Some(coarse) => {
                        fraction_csv("group", coarse.iter().map(|(k, v)| (k.as_str(), *v)))
                    }
                    None => {
                        let leaves: Vec<(String, f64)> = tree
                            .leaves()
                            .map(|(s, f)| (crate::worlds::sequence_key(&s), f))
                            .collect();
                        fraction_csv("sequence", leaves.iter().map(|(k, f)| (k.as_str(), *f)))
                    }
                },
            })
        }
        Command::Infer { observed, decided } => {
            let mut scenario = match &config.input {
                Some(path) => parse_json::<ScenarioFile>(path)?,
                None => ScenarioFile::alice_bob(Vec::new()),
            };
            if let Some(obs) = observed {
                scenario.observed = parse_observation(obs);
            }
            if decided.is_some() {
                scenario.decided = decided.clone();
            }
            let credence = update_credence(&scenario.hypotheses, &scenario.observed)?;
            let certain_of = if config.input.is_none() {
                first_down_certainty(&scenario.observed)?.certain_of
            } else {
                credence.certain().map(str::to_string)
            };
            let accounting = scenario
                .decided
                .as_deref()
                .map(|d| observation_accounting(&scenario.hypotheses, &scenario.observed, d))
                .transpose()?;
            let report = InferReport {
                observed: scenario.observed.clone(),
                credence: credence.entries().clone(),
                certain_of,
                decided: scenario.decided.clone(),
                accounting,
            };
            Ok(match format {
                OutputFormat::Json => to_json(&report),
                OutputFormat::Csv => csv_table(
                    &["hypothesis", "credence"],
                    credence
                        .iter()
                        .map(|(h, c)| vec![h.to_string(), format_float(c)]),
                ),
            })
        }
        Command::Compare { scenarios, trials } => {
            let report = model_compare(scenarios, *trials, config.window)?;
            Ok(match format {
                OutputFormat::Json => to_json(&report),
                OutputFormat::Csv => csv_table(
                    &["scenario", "model", "quantity", "p", "window", "support"],
                    report.scenarios.iter().flat_map(|s| {
                        s.supports.iter().map(move |m| {
                            vec![
                                format_float(s.observed_frequency),
                                m.model.clone(),
                                m.quantity.clone(),
                                format_float(m.p),
                                format_float(m.window),
                                format_float(m.support),
                            ]
                        })
                    }),
                ),
            })
        }
        Command::Halflife { target, atoms } => {
            let report = crate::inference::half_life_report(*target, *atoms)?;
            Ok(match format {
                OutputFormat::Json => to_json(&report),
                OutputFormat::Csv => {
                    let mut rows = vec![
                        ("sigma", report.sigma),
                        ("within_3_sigma", report.within_3_sigma),
                        ("all_decayed", report.all_decayed),
                    ];
                    rows.extend(report.per_atom.iter());
                    csv_table(
                        &["quantity", "value"],
                        rows.into_iter()
                            .map(|(k, v)| vec![k.to_string(), format_float(v)]),
                    )
                }
            })
        }
    }
}

/// Runs `config`, writes the report, and returns the process exit status.
pub fn execute(config: &RunConfig) -> i32 {
    let result = run(config).and_then(|report| match &config.output {
        Some(path) => fs::write(path, &report)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(report.as_bytes()).and_then(|()| out.flush()) {
                // A closed pipe (`| head`) is the reader's choice, not an error.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Input(format!("stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
