//! Report documents emitted by the commands. Field order is fixed by the
//! struct declarations and events are rendered as sorted label lists, so a
//! given input and flag set always produces byte-identical output.

use serde::Serialize;

use qmt_core::consistency::ConsistentSetRecord;
use qmt_core::preclusion::{ContraryWitness, NullCatalog};
use qmt_core::selection::{
    ClassificationTable, Coevent, CompatibilityReport, CsClassification, OcsSemantics,
    Property3Violation,
};
use qmt_core::{
    Backend, DecoherenceFunctional, Event, HistorySpace, Partition, ValidationReport,
};

use crate::schema::SCHEMA_VERSION;

pub fn event_labels(space: &HistorySpace, e: Event) -> Vec<String> {
    space.event_labels(e).into_iter().map(String::from).collect()
}

pub fn partition_labels(space: &HistorySpace, p: &Partition) -> Vec<Vec<String>> {
    p.cells().iter().map(|c| event_labels(space, *c)).collect()
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Exact => "exact",
        Backend::Float => "float",
    }
}

#[derive(Serialize)]
pub struct ValidationBlock {
    pub hermitian: bool,
    pub normalized: bool,
    pub strongly_positive: bool,
    pub weakly_positive: Option<bool>,
    pub diagnostics: Vec<String>,
}

impl ValidationBlock {
    pub fn from_report(r: &ValidationReport) -> Self {
        ValidationBlock {
            hermitian: r.hermitian,
            normalized: r.normalized,
            strongly_positive: r.strongly_positive,
            weakly_positive: r.weakly_positive,
            diagnostics: r.diagnostics.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct ValidateOut {
    pub schema_version: u32,
    pub backend: &'static str,
    pub epsilon: f64,
    pub n: usize,
    pub labels: Vec<String>,
    pub validation: ValidationBlock,
}

impl ValidateOut {
    pub fn build(d: &DecoherenceFunctional, report: &ValidationReport) -> Self {
        ValidateOut {
            schema_version: SCHEMA_VERSION,
            backend: backend_name(d.backend()),
            epsilon: d.epsilon(),
            n: d.n(),
            labels: d.space().labels().to_vec(),
            validation: ValidationBlock::from_report(report),
        }
    }
}

#[derive(Serialize)]
pub struct MeasureOut {
    pub schema_version: u32,
    pub event: Vec<String>,
    pub mu: String,
}

#[derive(Serialize)]
pub struct SetRow {
    pub cells: Vec<Vec<String>>,
    pub measures: Vec<String>,
    pub consistent: bool,
}

impl SetRow {
    pub fn build(space: &HistorySpace, r: &ConsistentSetRecord) -> Self {
        SetRow {
            cells: partition_labels(space, &r.partition),
            measures: r.cell_measures.iter().map(|m| m.render()).collect(),
            consistent: r.is_consistent,
        }
    }
}

#[derive(Serialize)]
pub struct ConsistentSetsOut {
    pub schema_version: u32,
    pub mode: &'static str,
    pub count: usize,
    pub sets: Vec<SetRow>,
}

#[derive(Serialize)]
pub struct NullCatalogBlock {
    pub count: usize,
    pub nulls: Vec<Vec<String>>,
    pub maximal_nulls: Vec<Vec<String>>,
    pub borderline: Vec<Vec<String>>,
}

impl NullCatalogBlock {
    pub fn build(space: &HistorySpace, c: &NullCatalog) -> Self {
        let list = |events: &[Event]| {
            events
                .iter()
                .map(|e| event_labels(space, *e))
                .collect::<Vec<_>>()
        };
        NullCatalogBlock {
            count: c.nulls().len(),
            nulls: list(c.nulls()),
            maximal_nulls: list(c.maximal_nulls()),
            borderline: list(c.borderline()),
        }
    }
}

#[derive(Serialize)]
pub struct NullsOut {
    pub schema_version: u32,
    pub null_catalog: NullCatalogBlock,
}

#[derive(Serialize)]
pub struct ZeroCoversBlock {
    pub max_family_size: usize,
    pub count: usize,
    pub families: Vec<Vec<Vec<String>>>,
}

impl ZeroCoversBlock {
    pub fn build(space: &HistorySpace, max_family_size: usize, covers: &[Vec<Event>]) -> Self {
        ZeroCoversBlock {
            max_family_size,
            count: covers.len(),
            families: covers
                .iter()
                .map(|f| f.iter().map(|e| event_labels(space, *e)).collect())
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ZeroCoversOut {
    pub schema_version: u32,
    pub zero_covers: ZeroCoversBlock,
}

#[derive(Serialize)]
pub struct PcsWitnessOut {
    pub cell: Vec<String>,
    pub containing_null: Vec<String>,
}

#[derive(Serialize)]
pub struct OcsWitnessOut {
    pub cell: Vec<String>,
    pub history: Vec<String>,
}

#[derive(Serialize)]
pub struct ClassRow {
    pub cells: Vec<Vec<String>>,
    pub measures: Vec<String>,
    pub consistent: bool,
    pub pcs: bool,
    pub pcs_witness: Option<PcsWitnessOut>,
    pub ocs: bool,
    pub ocs_implication: bool,
    pub ocs_implication_witness: Option<OcsWitnessOut>,
    pub ocs_biconditional: bool,
    pub ocs_biconditional_witness: Option<OcsWitnessOut>,
}

impl ClassRow {
    pub fn build(space: &HistorySpace, row: &CsClassification, semantics: OcsSemantics) -> Self {
        let pcs_witness = row.pcs_witness.as_ref().map(|w| PcsWitnessOut {
            cell: event_labels(space, w.cell),
            containing_null: event_labels(space, w.containing_null),
        });
        let ocs_witness = |w: &Option<qmt_core::selection::OcsWitness>| {
            w.as_ref().map(|w| OcsWitnessOut {
                cell: event_labels(space, w.cell),
                history: event_labels(space, w.history),
            })
        };
        ClassRow {
            cells: partition_labels(space, &row.record.partition),
            measures: row.record.cell_measures.iter().map(|m| m.render()).collect(),
            consistent: row.record.is_consistent,
            pcs: row.pcs,
            pcs_witness,
            ocs: match semantics {
                OcsSemantics::Implication => row.ocs_implication,
                OcsSemantics::Biconditional => row.ocs_biconditional,
            },
            ocs_implication: row.ocs_implication,
            ocs_implication_witness: ocs_witness(&row.ocs_implication_witness),
            ocs_biconditional: row.ocs_biconditional,
            ocs_biconditional_witness: ocs_witness(&row.ocs_biconditional_witness),
        }
    }
}

#[derive(Serialize)]
pub struct WitnessOut {
    pub p: Vec<String>,
    pub q: Vec<String>,
    pub cs_p: Vec<Vec<String>>,
    pub cs_q: Vec<Vec<String>>,
}

impl WitnessOut {
    pub fn build(space: &HistorySpace, w: &ContraryWitness) -> Self {
        WitnessOut {
            p: event_labels(space, w.p),
            q: event_labels(space, w.q),
            cs_p: partition_labels(space, &w.cs_p),
            cs_q: partition_labels(space, &w.cs_q),
        }
    }
}

#[derive(Serialize)]
pub struct ContraryOut {
    pub schema_version: u32,
    pub count: usize,
    pub witnesses: Vec<WitnessOut>,
}

#[derive(Serialize)]
pub struct ValuationRow {
    pub event: Vec<String>,
    pub values: Vec<bool>,
}

#[derive(Serialize)]
pub struct CoeventsOut {
    pub schema_version: u32,
    pub count: usize,
    pub coevents: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuations: Option<Vec<ValuationRow>>,
}

#[derive(Serialize)]
pub struct CompatibilityBlock {
    pub checked_sets: usize,
    pub passed: bool,
    pub violations: Vec<Vec<String>>,
}

impl CompatibilityBlock {
    pub fn build(space: &HistorySpace, r: &CompatibilityReport) -> Self {
        CompatibilityBlock {
            checked_sets: r.checked_sets,
            passed: r.passes(),
            violations: r
                .violations
                .iter()
                .map(|(_, cell)| event_labels(space, *cell))
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct Property3ViolationOut {
    pub subset_cell: Vec<String>,
    pub superset_cell: Vec<String>,
    pub cs_with_subset: Vec<Vec<String>>,
    pub cs_with_superset: Vec<Vec<String>>,
}

pub fn property3_out(space: &HistorySpace, vs: &[Property3Violation]) -> Vec<Property3ViolationOut> {
    vs.iter()
        .map(|v| Property3ViolationOut {
            subset_cell: event_labels(space, v.subset_cell),
            superset_cell: event_labels(space, v.superset_cell),
            cs_with_subset: partition_labels(space, &v.cs_with_subset),
            cs_with_superset: partition_labels(space, &v.cs_with_superset),
        })
        .collect()
}

#[derive(Serialize)]
pub struct Property3Block {
    pub all_sets: Vec<Property3ViolationOut>,
    pub pcs_only: Vec<Property3ViolationOut>,
}

/// The full analysis document written by `classify`.
#[derive(Serialize)]
pub struct ClassifyOut {
    pub schema_version: u32,
    pub backend: &'static str,
    pub epsilon: f64,
    pub n: usize,
    pub labels: Vec<String>,
    pub ocs_semantics: &'static str,
    pub validation: ValidationBlock,
    pub null_catalog: NullCatalogBlock,
    pub zero_covers: ZeroCoversBlock,
    pub consistent_sets: Vec<ClassRow>,
    pub contrary_witnesses: Vec<WitnessOut>,
    pub coevents: Vec<Vec<String>>,
    pub coevent_compatibility: CompatibilityBlock,
    pub property3: Property3Block,
}

#[allow(clippy::too_many_arguments)]
impl ClassifyOut {
    pub fn build(
        d: &DecoherenceFunctional,
        report: &ValidationReport,
        catalog: &NullCatalog,
        cover_cap: usize,
        covers: &[Vec<Event>],
        table: &ClassificationTable,
        semantics: OcsSemantics,
        witnesses: &[ContraryWitness],
        coevents: &[Coevent],
        compatibility: &CompatibilityReport,
        property3_all: &[Property3Violation],
        property3_pcs: &[Property3Violation],
    ) -> Self {
        let space = d.space();
        ClassifyOut {
            schema_version: SCHEMA_VERSION,
            backend: backend_name(d.backend()),
            epsilon: d.epsilon(),
            n: d.n(),
            labels: space.labels().to_vec(),
            ocs_semantics: match semantics {
                OcsSemantics::Implication => "implication",
                OcsSemantics::Biconditional => "biconditional",
            },
            validation: ValidationBlock::from_report(report),
            null_catalog: NullCatalogBlock::build(space, catalog),
            zero_covers: ZeroCoversBlock::build(space, cover_cap, covers),
            consistent_sets: table
                .rows
                .iter()
                .map(|r| ClassRow::build(space, r, semantics))
                .collect(),
            contrary_witnesses: witnesses
                .iter()
                .map(|w| WitnessOut::build(space, w))
                .collect(),
            coevents: coevents
                .iter()
                .map(|c| event_labels(space, c.support))
                .collect(),
            coevent_compatibility: CompatibilityBlock::build(space, compatibility),
            property3: Property3Block {
                all_sets: property3_out(space, property3_all),
                pcs_only: property3_out(space, property3_pcs),
            },
        }
    }
}
