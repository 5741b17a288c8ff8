//! `qmt` — analysis of decoherence functionals on finite history spaces:
//! validation, measures, consistent sets, null events, zero covers,
//! selection criteria, coevents and contrary inferences.

mod report;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qmt_core::consistency::enumerate_consistent_sets;
use qmt_core::preclusion::{detect_contrary_inferences, enumerate_null_events, find_zero_covers};
use qmt_core::selection::{
    audit_property3, check_pcs_coevent_compatibility, classify_all, coevent_valuation,
    enumerate_coevents, OcsSemantics,
};
use qmt_core::{DecoherenceMode, RunConfig, DEFAULT_EPSILON};

use report::*;
use schema::{load_functional, MatrixDoc, SCHEMA_VERSION};

/// Errors mapped to process exit codes: cap refusals exit 3, everything
/// else (I/O, schema, validation) exits 2.
#[derive(Debug)]
pub enum CliError {
    Cap(String),
    Input(String),
}

impl CliError {
    pub fn input(msg: String) -> Self {
        CliError::Input(msg)
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Cap(_) => 3,
            CliError::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Cap(m) | CliError::Input(m) => m,
        }
    }
}

impl From<qmt_core::Error> for CliError {
    fn from(e: qmt_core::Error) -> Self {
        match e {
            qmt_core::Error::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "qmt", version, about = "Quantum measure analysis on finite history spaces")]
struct Cli {
    /// Relative zero tolerance for float-backed models.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,

    /// Worker threads for enumerations; the output never depends on this.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Override the enumeration caps (partition and subset scans). Raising
    /// this acknowledges the exponential cost.
    #[arg(long, global = true)]
    max_n: Option<usize>,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Medium,
    Weak,
}

impl From<ModeArg> for DecoherenceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Medium => DecoherenceMode::Medium,
            ModeArg::Weak => DecoherenceMode::Weak,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Implication,
    Biconditional,
}

impl From<SemanticsArg> for OcsSemantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Implication => OcsSemantics::Implication,
            SemanticsArg::Biconditional => OcsSemantics::Biconditional,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check Hermiticity, normalization, strong and weak positivity.
    Validate { model: PathBuf },
    /// Quantum measure of an event given as a `+`-separated label list.
    Measure { model: PathBuf, event: String },
    /// Enumerate all consistent sets.
    ConsistentSets {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Medium)]
        mode: ModeArg,
    },
    /// Catalog the measure-zero events and the maximal-null antichain.
    Nulls { model: PathBuf },
    /// Enumerate inclusion-minimal zero covers.
    ZeroCovers {
        model: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_family: usize,
    },
    /// Full classification: consistent sets with preclusive and ordered
    /// flags, nulls, covers, coevents, contrary witnesses and audits.
    Classify {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = SemanticsArg::Implication)]
        ocs_semantics: SemanticsArg,
    },
    /// List coevents; with `--event`, also their truth valuations.
    Coevents {
        model: PathBuf,
        /// Event expression to evaluate against every coevent (repeatable).
        #[arg(long = "event")]
        events: Vec<String>,
    },
    /// Detect contrary inferences.
    Contrary { model: PathBuf },
    /// Compose two models into a product functional, written as a matrix
    /// model file.
    Compose {
        model1: PathBuf,
        model2: PathBuf,
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = RunConfig::with_workers(cli.workers);
    if let Some(cap) = cli.max_n {
        config.partition_cap = cap;
        config.subset_cap = cap;
        config.weak_positivity_cap = cap.min(config.weak_positivity_cap);
    }
    let epsilon = cli.epsilon;
    let out = cli.output.clone();

    match cli.command {
        Command::Validate { model } => {
            let d = load_functional(&model, epsilon)?;
            let report = d.validate(&config);
            emit(&out, &ValidateOut::build(&d, &report))
        }
        Command::Measure { model, event } => {
            let d = load_functional(&model, epsilon)?;
            let e = d.space().event_from_labels(&event)?;
            let mu = d.mu(e)?;
            emit(
                &out,
                &MeasureOut {
                    schema_version: SCHEMA_VERSION,
                    event: event_labels(d.space(), e),
                    mu: mu.render(),
                },
            )
        }
        Command::ConsistentSets { model, mode } => {
            let d = load_functional(&model, epsilon)?;
            let records = enumerate_consistent_sets(&d, mode.into(), &config)?;
            emit(
                &out,
                &ConsistentSetsOut {
                    schema_version: SCHEMA_VERSION,
                    mode: match mode {
                        ModeArg::Medium => "medium",
                        ModeArg::Weak => "weak",
                    },
                    count: records.len(),
                    sets: records.iter().map(|r| SetRow::build(d.space(), r)).collect(),
                },
            )
        }
        Command::Nulls { model } => {
            let d = load_functional(&model, epsilon)?;
            let catalog = enumerate_null_events(&d, &config)?;
            emit(
                &out,
                &NullsOut {
                    schema_version: SCHEMA_VERSION,
                    null_catalog: NullCatalogBlock::build(d.space(), &catalog),
                },
            )
        }
        Command::ZeroCovers { model, max_family } => {
            let d = load_functional(&model, epsilon)?;
            let catalog = enumerate_null_events(&d, &config)?;
            let covers = find_zero_covers(&catalog, max_family)?;
            emit(
                &out,
                &ZeroCoversOut {
                    schema_version: SCHEMA_VERSION,
                    zero_covers: ZeroCoversBlock::build(d.space(), max_family, &covers),
                },
            )
        }
        Command::Classify {
            model,
            ocs_semantics,
        } => {
            let d = load_functional(&model, epsilon)?;
            let report = d.validate(&config);
            let catalog = enumerate_null_events(&d, &config)?;
            let cover_cap = 6;
            let covers = find_zero_covers(&catalog, cover_cap)?;
            let table = classify_all(&d, DecoherenceMode::Medium, &config)?;
            let witnesses = detect_contrary_inferences(&d, &catalog, &config)?;
            let coevents = enumerate_coevents(&d, &catalog, &config)?;
            let compatibility = check_pcs_coevent_compatibility(&d, &table, &coevents)?;
            let p3_all = audit_property3(&d, &table, false)?;
            let p3_pcs = audit_property3(&d, &table, true)?;
            emit(
                &out,
                &ClassifyOut::build(
                    &d,
                    &report,
                    &catalog,
                    cover_cap,
                    &covers,
                    &table,
                    ocs_semantics.into(),
                    &witnesses,
                    &coevents,
                    &compatibility,
                    &p3_all,
                    &p3_pcs,
                ),
            )
        }
        Command::Coevents { model, events } => {
            let d = load_functional(&model, epsilon)?;
            let catalog = enumerate_null_events(&d, &config)?;
            let coevents = enumerate_coevents(&d, &catalog, &config)?;
            let valuations = if events.is_empty() {
                None
            } else {
                let mut rows = Vec::with_capacity(events.len());
                for expr in &events {
                    let e = d.space().event_from_labels(expr)?;
                    rows.push(ValuationRow {
                        event: event_labels(d.space(), e),
                        values: coevents.iter().map(|c| coevent_valuation(c, e)).collect(),
                    });
                }
                Some(rows)
            };
            emit(
                &out,
                &CoeventsOut {
                    schema_version: SCHEMA_VERSION,
                    count: coevents.len(),
                    coevents: coevents
                        .iter()
                        .map(|c| event_labels(d.space(), c.support))
                        .collect(),
                    valuations,
                },
            )
        }
        Command::Contrary { model } => {
            let d = load_functional(&model, epsilon)?;
            let catalog = enumerate_null_events(&d, &config)?;
            let witnesses = detect_contrary_inferences(&d, &catalog, &config)?;
            emit(
                &out,
                &ContraryOut {
                    schema_version: SCHEMA_VERSION,
                    count: witnesses.len(),
                    witnesses: witnesses
                        .iter()
                        .map(|w| WitnessOut::build(d.space(), w))
                        .collect(),
                },
            )
        }
        Command::Compose { model1, model2, out: target } => {
            let d1 = load_functional(&model1, epsilon)?;
            let d2 = load_functional(&model2, epsilon)?;
            let composed = d1.compose(&d2)?;
            let doc = MatrixDoc::from_functional(&composed);
            let text = to_pretty_json(&doc)?;
            std::fs::write(&target, text)
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", target.display())))?;
            #[derive(serde::Serialize)]
            struct ComposeOut {
                schema_version: u32,
                written: String,
                n: usize,
            }
            emit(
                &out,
                &ComposeOut {
                    schema_version: SCHEMA_VERSION,
                    written: target.display().to_string(),
                    n: composed.n(),
                },
            )
        }
    }
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::input(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn emit<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), CliError> {
    let text = to_pretty_json(value)?;
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
