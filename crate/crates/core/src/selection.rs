//! Set-selection criteria over the enumerated consistent sets: preclusive
//! consistent sets, ordered consistent sets, coevents and the related
//! cross-context audits.

use crate::config::{parallel_map_chunks, parallel_ranges, RunConfig};
use crate::consistency::{
    enumerate_consistent_sets, is_consistent, ConsistentSetRecord, Partition,
};
use crate::error::{Error, Result};
use crate::functional::{DecoherenceFunctional, DecoherenceMode};
use crate::preclusion::{enumerate_null_events, NullCatalog};
use crate::scalar::Scalar;
use crate::space::Event;

/// A minimal preclusive event: contained in no null, with no proper
/// non-empty preclusive subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coevent {
    pub support: Event,
}

/// Which reading of the ordered-consistency conditions is enforced.
///
/// `Implication` demands that inclusion between a cell and a consistent
/// history forces the matching measure inequality. `Biconditional` reads
/// the definition literally, additionally forcing inclusion whenever the
/// measures are comparable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OcsSemantics {
    Implication,
    Biconditional,
}

/// Why a consistent set failed the preclusive criterion.
#[derive(Clone, Debug)]
pub struct PcsWitness {
    pub cell: Event,
    pub containing_null: Event,
}

/// Why a consistent set failed the ordered criterion.
#[derive(Clone, Debug)]
pub struct OcsWitness {
    pub cell: Event,
    pub history: Event,
}

/// One classified consistent set.
#[derive(Clone, Debug)]
pub struct CsClassification {
    pub record: ConsistentSetRecord,
    pub pcs: bool,
    pub pcs_witness: Option<PcsWitness>,
    pub ocs_implication: bool,
    pub ocs_implication_witness: Option<OcsWitness>,
    pub ocs_biconditional: bool,
    pub ocs_biconditional_witness: Option<OcsWitness>,
}

/// Every consistent set with its selection flags, in enumeration order.
#[derive(Clone, Debug)]
pub struct ClassificationTable {
    pub rows: Vec<CsClassification>,
}

/// Preclusive consistent set: no cell of non-zero measure may sit inside a
/// null event. Cells of measure zero are exempt.
pub fn is_pcs(
    d: &DecoherenceFunctional,
    p: &Partition,
    catalog: &NullCatalog,
    mode: DecoherenceMode,
) -> Result<(bool, Option<PcsWitness>)> {
    if !is_consistent(d, p, mode)? {
        return Err(Error::InconsistentPartition);
    }
    pcs_flags(d, p, catalog)
}

fn pcs_flags(
    d: &DecoherenceFunctional,
    p: &Partition,
    catalog: &NullCatalog,
) -> Result<(bool, Option<PcsWitness>)> {
    for cell in p.cells() {
        if d.mu_is_zero(*cell)? {
            continue;
        }
        if let Some(z) = catalog.maximal_nulls().iter().find(|z| cell.is_subset_of(**z)) {
            return Ok((
                false,
                Some(PcsWitness {
                    cell: *cell,
                    containing_null: *z,
                }),
            ));
        }
    }
    Ok((true, None))
}

/// Ordered consistent set: every cell's measure must sit in the chosen
/// relation to the measure of every consistent history comparable to it.
pub fn is_ocs(
    d: &DecoherenceFunctional,
    p: &Partition,
    consistent_histories: &[Event],
    semantics: OcsSemantics,
    mode: DecoherenceMode,
) -> Result<(bool, Option<OcsWitness>)> {
    if !is_consistent(d, p, mode)? {
        return Err(Error::InconsistentPartition);
    }
    let ch_measures = measures_of(d, consistent_histories)?;
    ocs_flags(d, p, consistent_histories, &ch_measures, semantics)
}

fn measures_of(d: &DecoherenceFunctional, events: &[Event]) -> Result<Vec<Scalar>> {
    events.iter().map(|e| d.mu(*e)).collect()
}

fn ocs_flags(
    d: &DecoherenceFunctional,
    p: &Partition,
    ch: &[Event],
    ch_measures: &[Scalar],
    semantics: OcsSemantics,
) -> Result<(bool, Option<OcsWitness>)> {
    use std::cmp::Ordering;
    for cell in p.cells() {
        let mu_cell = d.mu(*cell)?;
        for (h, mu_h) in ch.iter().zip(ch_measures.iter()) {
            let cmp = d.measure_cmp(mu_h, &mu_cell)?;
            let superset = cell.is_subset_of(*h);
            let subset = h.is_subset_of(*cell);
            let violated = match semantics {
                OcsSemantics::Implication => {
                    (superset && cmp == Ordering::Less) || (subset && cmp == Ordering::Greater)
                }
                OcsSemantics::Biconditional => {
                    (superset && cmp == Ordering::Less)
                        || (subset && cmp == Ordering::Greater)
                        || (cmp != Ordering::Less && !superset)
                        || (cmp != Ordering::Greater && !subset)
                }
            };
            if violated {
                return Ok((
                    false,
                    Some(OcsWitness {
                        cell: *cell,
                        history: *h,
                    }),
                ));
            }
        }
    }
    Ok((true, None))
}

/// Enumerates the consistent sets and classifies each one under the
/// preclusive criterion and both ordered-consistency readings.
pub fn classify_all(
    d: &DecoherenceFunctional,
    mode: DecoherenceMode,
    config: &RunConfig,
) -> Result<ClassificationTable> {
    let records = enumerate_consistent_sets(d, mode, config)?;
    let catalog = enumerate_null_events(d, config)?;
    let ch = d.consistent_history_scan(mode, config)?;
    let ch_measures = measures_of(d, &ch)?;

    let rows: Vec<Result<CsClassification>> =
        parallel_map_chunks(config.workers, records, |chunk| {
            chunk
                .iter()
                .map(|record| {
                    let (pcs, pcs_witness) = pcs_flags(d, &record.partition, &catalog)?;
                    let (ocs_implication, ocs_implication_witness) = ocs_flags(
                        d,
                        &record.partition,
                        &ch,
                        &ch_measures,
                        OcsSemantics::Implication,
                    )?;
                    let (ocs_biconditional, ocs_biconditional_witness) = ocs_flags(
                        d,
                        &record.partition,
                        &ch,
                        &ch_measures,
                        OcsSemantics::Biconditional,
                    )?;
                    Ok(CsClassification {
                        record: record.clone(),
                        pcs,
                        pcs_witness,
                        ocs_implication,
                        ocs_implication_witness,
                        ocs_biconditional,
                        ocs_biconditional_witness,
                    })
                })
                .collect()
        });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ClassificationTable { rows })
}

/// All coevents: preclusive events none of whose proper non-empty subsets
/// are preclusive. Preclusivity is upward closed, so minimality only needs
/// the one-element-removed subsets.
pub fn enumerate_coevents(
    d: &DecoherenceFunctional,
    catalog: &NullCatalog,
    config: &RunConfig,
) -> Result<Vec<Coevent>> {
    let n = d.n();
    if n > config.subset_cap {
        return Err(Error::CapExceeded {
            task: "coevent enumeration",
            n,
            cap: config.subset_cap,
            estimate: 1u128 << n,
        });
    }
    let maximal = catalog.maximal_nulls();
    let preclusive = |bits: u64| {
        let e = Event::from_bits(bits);
        !maximal.iter().any(|z| e.is_subset_of(*z))
    };
    let mut found: Vec<Event> = parallel_ranges(config.workers, 1u64 << n, |range| {
        let mut out = Vec::new();
        for bits in range {
            if bits == 0 || !preclusive(bits) {
                continue;
            }
            let minimal = Event::from_bits(bits).iter().all(|i| {
                let sub = bits & !(1u64 << i);
                sub == 0 || !preclusive(sub)
            });
            if minimal {
                out.push(Event::from_bits(bits));
            }
        }
        out
    });
    found.sort_by_key(|e| e.rank_key());
    Ok(found.into_iter().map(|support| Coevent { support }).collect())
}

/// A realized coevent makes a history true exactly when its support lies
/// inside that history.
pub fn coevent_valuation(coevent: &Coevent, history: Event) -> bool {
    coevent.support.is_subset_of(history)
}

/// Result of checking that every non-zero cell of every preclusive
/// consistent set contains a coevent.
#[derive(Clone, Debug)]
pub struct CompatibilityReport {
    pub checked_sets: usize,
    pub violations: Vec<(Partition, Event)>,
}

impl CompatibilityReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies compatibility of the preclusive consistent sets with the
/// coevent ontology; a correct classification yields no violations.
pub fn check_pcs_coevent_compatibility(
    d: &DecoherenceFunctional,
    table: &ClassificationTable,
    coevents: &[Coevent],
) -> Result<CompatibilityReport> {
    let mut checked_sets = 0;
    let mut violations = Vec::new();
    for row in &table.rows {
        if !row.pcs {
            continue;
        }
        checked_sets += 1;
        for cell in row.record.partition.cells() {
            if d.mu_is_zero(*cell)? {
                continue;
            }
            if !coevents.iter().any(|c| c.support.is_subset_of(*cell)) {
                violations.push((row.record.partition.clone(), *cell));
            }
        }
    }
    Ok(CompatibilityReport {
        checked_sets,
        violations,
    })
}

/// A probability-one cell whose superset in another consistent set fails
/// to carry probability one.
#[derive(Clone, Debug)]
pub struct Property3Violation {
    pub subset_cell: Event,
    pub superset_cell: Event,
    pub cs_with_subset: Partition,
    pub cs_with_superset: Partition,
}

/// Scans ordered pairs of consistent sets for probability-one cells whose
/// supersets elsewhere drop below probability one; with `restrict_to_pcs`
/// only preclusive consistent sets participate.
pub fn audit_property3(
    d: &DecoherenceFunctional,
    table: &ClassificationTable,
    restrict_to_pcs: bool,
) -> Result<Vec<Property3Violation>> {
    use std::cmp::Ordering;
    let one = Scalar::one(d.backend());
    let rows: Vec<&CsClassification> = table
        .rows
        .iter()
        .filter(|r| !restrict_to_pcs || r.pcs)
        .collect();
    let mut out = Vec::new();
    for r1 in &rows {
        for (cell, measure) in r1
            .record
            .partition
            .cells()
            .iter()
            .zip(r1.record.cell_measures.iter())
        {
            if d.measure_cmp(measure, &one)? != Ordering::Equal {
                continue;
            }
            for r2 in &rows {
                for (sup, sup_measure) in r2
                    .record
                    .partition
                    .cells()
                    .iter()
                    .zip(r2.record.cell_measures.iter())
                {
                    if cell.is_subset_of(*sup)
                        && d.measure_cmp(sup_measure, &one)? == Ordering::Less
                    {
                        out.push(Property3Violation {
                            subset_cell: *cell,
                            superset_cell: *sup,
                            cs_with_subset: r1.record.partition.clone(),
                            cs_with_superset: r2.record.partition.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::DEFAULT_EPSILON;

    fn three_slit() -> DecoherenceFunctional {
        DecoherenceFunctional::from_amplitudes(&models::make_three_slit(), DEFAULT_EPSILON)
            .unwrap()
    }

    fn hopper() -> DecoherenceFunctional {
        let model = models::make_hopper(&models::HopperSpec::two_site_default()).unwrap();
        DecoherenceFunctional::from_amplitudes(&model, DEFAULT_EPSILON).unwrap()
    }

    fn cfg() -> RunConfig {
        RunConfig::default()
    }

    #[test]
    fn three_slit_pcs_flags() {
        let d = three_slit();
        let catalog = enumerate_null_events(&d, &cfg()).unwrap();
        let e = |bits: u64| Event::from_bits(bits);
        let c1 = Partition::new(3, vec![e(0b011), e(0b100)]).unwrap();
        let (flag, witness) = is_pcs(&d, &c1, &catalog, DecoherenceMode::Medium).unwrap();
        assert!(!flag);
        let w = witness.unwrap();
        assert_eq!(w.cell.bits(), 0b100); // {h_CP}
        assert_eq!(w.containing_null.bits(), 0b110); // {h_BP,h_CP}

        let c3 = Partition::trivial(3);
        let (flag, witness) = is_pcs(&d, &c3, &catalog, DecoherenceMode::Medium).unwrap();
        assert!(flag);
        assert!(witness.is_none());

        // inconsistent partitions are rejected outright
        let bad = Partition::new(3, vec![e(0b010), e(0b101)]).unwrap();
        assert!(matches!(
            is_pcs(&d, &bad, &catalog, DecoherenceMode::Medium),
            Err(Error::InconsistentPartition)
        ));
    }

    #[test]
    fn appendix_b_ocs_flags() {
        let d = models::make_appendix_b();
        let ch = d
            .consistent_history_scan(DecoherenceMode::Medium, &cfg())
            .unwrap();
        let e = |bits: u64| Event::from_bits(bits);
        let c1 = Partition::new(3, vec![e(0b001), e(0b110)]).unwrap();
        let (flag, witness) =
            is_ocs(&d, &c1, &ch, OcsSemantics::Implication, DecoherenceMode::Medium).unwrap();
        assert!(!flag);
        let w = witness.unwrap();
        assert_eq!(w.cell.bits(), 0b001); // {h1}, measure 1/3
        assert_eq!(w.history.bits(), 0b011); // {h1,h2}, measure 1/4

        let trivial = Partition::trivial(3);
        let (flag, _) =
            is_ocs(&d, &trivial, &ch, OcsSemantics::Implication, DecoherenceMode::Medium)
                .unwrap();
        assert!(flag);
    }

    #[test]
    fn trivial_partition_is_ocs_for_classical_functionals() {
        let space = crate::space::HistorySpace::with_default_labels(3).unwrap();
        let third = crate::scalar::ExactScalar::from_ratio(1, 3);
        let zero = crate::scalar::ExactScalar::zero();
        let rows: Vec<Vec<Scalar>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| Scalar::Exact(if i == j { third.clone() } else { zero.clone() }))
                    .collect()
            })
            .collect();
        let d = DecoherenceFunctional::from_matrix(space, rows, DEFAULT_EPSILON, false).unwrap();
        let ch = d
            .consistent_history_scan(DecoherenceMode::Medium, &cfg())
            .unwrap();
        assert_eq!(ch.len(), 8);
        let (flag, _) = is_ocs(
            &d,
            &Partition::trivial(3),
            &ch,
            OcsSemantics::Implication,
            DecoherenceMode::Medium,
        )
        .unwrap();
        assert!(flag);
    }

    #[test]
    fn classify_three_slit_table() {
        let d = three_slit();
        let table = classify_all(&d, DecoherenceMode::Medium, &cfg()).unwrap();
        assert_eq!(table.rows.len(), 3);
        let pcs: Vec<bool> = table.rows.iter().map(|r| r.pcs).collect();
        // RGS order: trivial first, then C1, then C2
        assert_eq!(pcs, vec![true, false, false]);
    }

    #[test]
    fn classify_appendix_b_table() {
        let d = models::make_appendix_b();
        let table = classify_all(&d, DecoherenceMode::Medium, &cfg()).unwrap();
        assert_eq!(table.rows.len(), 3);
        for row in &table.rows {
            assert!(row.pcs);
            let trivial = row.record.partition.num_cells() == 1;
            assert_eq!(row.ocs_implication, trivial);
        }
    }

    #[test]
    fn coevents_of_the_examples() {
        let d = three_slit();
        let catalog = enumerate_null_events(&d, &cfg()).unwrap();
        let coevents = enumerate_coevents(&d, &catalog, &cfg()).unwrap();
        assert_eq!(coevents.len(), 1);
        assert_eq!(coevents[0].support.bits(), 0b101); // {h_AP,h_CP}

        let h = hopper();
        let hc = enumerate_null_events(&h, &cfg()).unwrap();
        let hcoe = enumerate_coevents(&h, &hc, &cfg()).unwrap();
        let bits: Vec<u64> = hcoe.iter().map(|c| c.support.bits()).collect();
        let pair = |a: usize, b: usize| (1u64 << a) | (1 << b);
        assert_eq!(
            bits,
            vec![
                pair(1, 2),
                pair(1, 3),
                pair(2, 3),
                pair(4, 6),
                pair(4, 7),
                pair(6, 7)
            ]
        );

        // classical diagonal: all singletons
        let space = crate::space::HistorySpace::with_default_labels(4).unwrap();
        let quarter = crate::scalar::ExactScalar::from_ratio(1, 4);
        let zero = crate::scalar::ExactScalar::zero();
        let rows: Vec<Vec<Scalar>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| Scalar::Exact(if i == j { quarter.clone() } else { zero.clone() }))
                    .collect()
            })
            .collect();
        let dc = DecoherenceFunctional::from_matrix(space, rows, DEFAULT_EPSILON, false).unwrap();
        let cc = enumerate_null_events(&dc, &cfg()).unwrap();
        let coe = enumerate_coevents(&dc, &cc, &cfg()).unwrap();
        assert_eq!(coe.len(), 4);
        assert!(coe.iter().all(|c| c.support.len() == 1));
    }

    #[test]
    fn coevent_valuations() {
        let d = three_slit();
        let catalog = enumerate_null_events(&d, &cfg()).unwrap();
        let coevent = enumerate_coevents(&d, &catalog, &cfg()).unwrap()[0];
        assert!(coevent_valuation(&coevent, Event::from_bits(0b111)));
        assert!(!coevent_valuation(&coevent, Event::from_bits(0b001)));

        let h = hopper();
        let hc = enumerate_null_events(&h, &cfg()).unwrap();
        let c23 = enumerate_coevents(&h, &hc, &cfg()).unwrap()[0];
        assert!(coevent_valuation(&c23, Event::from_bits(0b0000_1111)));
    }

    #[test]
    fn coevent_definition_checks_exhaustively() {
        for d in [three_slit(), hopper()] {
            let catalog = enumerate_null_events(&d, &cfg()).unwrap();
            let coevents = enumerate_coevents(&d, &catalog, &cfg()).unwrap();
            for c in &coevents {
                assert!(crate::preclusion::is_preclusive(&catalog, c.support).unwrap());
                // every proper non-empty subset is non-preclusive
                let bits = c.support.bits();
                let mut sub = (bits - 1) & bits;
                loop {
                    if sub != 0 {
                        let e = Event::from_bits(sub);
                        assert!(!crate::preclusion::is_preclusive(&catalog, e).unwrap());
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & bits;
                }
            }
            // antichain under inclusion
            for a in &coevents {
                for b in &coevents {
                    if a.support != b.support {
                        assert!(!a.support.is_subset_of(b.support));
                    }
                }
            }
        }
    }

    #[test]
    fn compatibility_reports_pass_on_examples() {
        for d in [three_slit(), hopper()] {
            let table = classify_all(&d, DecoherenceMode::Medium, &cfg()).unwrap();
            let catalog = enumerate_null_events(&d, &cfg()).unwrap();
            let coevents = enumerate_coevents(&d, &catalog, &cfg()).unwrap();
            let report = check_pcs_coevent_compatibility(&d, &table, &coevents).unwrap();
            assert!(report.passes());
            assert!(report.checked_sets > 0);
        }
    }

    #[test]
    fn property3_audit_on_three_slit() {
        let d = three_slit();
        let table = classify_all(&d, DecoherenceMode::Medium, &cfg()).unwrap();
        let violations = audit_property3(&d, &table, false).unwrap();
        // {h_CP} in C1 sits inside {h_BP,h_CP} (measure 0) in C2, and
        // {h_AP} in C2 sits inside {h_AP,h_BP} (measure 0) in C1
        assert_eq!(violations.len(), 2);
        assert!(violations
            .iter()
            .any(|v| v.subset_cell.bits() == 0b100 && v.superset_cell.bits() == 0b110));
        assert!(violations
            .iter()
            .any(|v| v.subset_cell.bits() == 0b001 && v.superset_cell.bits() == 0b011));

        assert!(audit_property3(&d, &table, true).unwrap().is_empty());

        let h = hopper();
        let ht = classify_all(&h, DecoherenceMode::Medium, &cfg()).unwrap();
        assert!(audit_property3(&h, &ht, false).unwrap().is_empty());
    }
}
