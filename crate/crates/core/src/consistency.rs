//! Partitions of the history space, the decoherence condition, and
//! enumeration of consistent sets and consistent histories.

use crate::config::{bell_number, parallel_map_chunks, RunConfig};
use crate::error::{Error, Result};
use crate::functional::{DecoherenceFunctional, DecoherenceMode};
use crate::scalar::Scalar;
use crate::space::Event;

/// A disjoint cover of the history space by non-empty events, kept in
/// canonical form: cells ordered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    cells: Vec<Event>,
}

impl Partition {
    pub fn new(n: usize, mut cells: Vec<Event>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidPartition("no cells".into()));
        }
        let omega = Event::full(n);
        let mut seen = Event::EMPTY;
        for c in &cells {
            if c.is_empty() {
                return Err(Error::InvalidPartition("empty cell".into()));
            }
            if !c.is_subset_of(omega) {
                return Err(Error::InvalidPartition(format!(
                    "cell outside the {n}-history space"
                )));
            }
            if !seen.is_disjoint_from(*c) {
                return Err(Error::InvalidPartition("cells overlap".into()));
            }
            seen = seen.union(*c);
        }
        if seen != omega {
            return Err(Error::InvalidPartition("cells do not cover the space".into()));
        }
        cells.sort_by_key(|c| c.min_member());
        Ok(Partition { n, cells })
    }

    /// The one-cell partition `{Omega}`.
    pub fn trivial(n: usize) -> Self {
        Partition {
            n,
            cells: vec![Event::full(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[Event] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Restricted-growth string: for each history, the index of its cell in
    /// first-appearance order. Canonical cell order makes this well defined.
    pub fn rgs(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.n];
        for (k, cell) in self.cells.iter().enumerate() {
            for i in cell.iter() {
                out[i] = k as u8;
            }
        }
        out
    }

    /// Coarse-graining that merges cells `i` and `j`.
    pub fn merge_cells(&self, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= self.cells.len() || j >= self.cells.len() {
            return Err(Error::InvalidArgument("bad cell indices for merge".into()));
        }
        let mut cells = Vec::with_capacity(self.cells.len() - 1);
        for (k, c) in self.cells.iter().enumerate() {
            if k == i {
                cells.push(c.union(self.cells[j]));
            } else if k != j {
                cells.push(*c);
            }
        }
        Partition::new(self.n, cells)
    }
}

/// An enumerated consistent set with its per-cell measures.
#[derive(Clone, Debug)]
pub struct ConsistentSetRecord {
    pub partition: Partition,
    pub cell_measures: Vec<Scalar>,
    pub is_consistent: bool,
}

/// The decoherence condition: every pair of distinct cells evaluates to
/// zero (medium: the full complex value; weak: its real part).
pub fn is_consistent(
    d: &DecoherenceFunctional,
    p: &Partition,
    mode: DecoherenceMode,
) -> Result<bool> {
    if p.n() != d.n() {
        return Err(Error::SpaceMismatch { n: d.n() });
    }
    let cells = p.cells();
    for (k, a) in cells.iter().enumerate() {
        for b in &cells[k + 1..] {
            if !d.evaluate_is_zero(*a, *b, mode)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An event is a consistent history when it decoheres with its complement;
/// the empty event and the whole space count (their complement pair is
/// degenerate).
pub fn is_consistent_history(
    d: &DecoherenceFunctional,
    h: Event,
    mode: DecoherenceMode,
) -> Result<bool> {
    d.evaluate_is_zero(h, h.complement(d.n()), mode)
}

/// All consistent sets, in restricted-growth-string order. The trivial
/// partition is included; the output is identical for every worker count.
///
/// Enumeration grows partitions one completed cell at a time (the next cell
/// always contains the smallest unassigned history) and prunes a branch as
/// soon as a new cell fails the decoherence condition against an existing
/// cell.
pub fn enumerate_consistent_sets(
    d: &DecoherenceFunctional,
    mode: DecoherenceMode,
    config: &RunConfig,
) -> Result<Vec<ConsistentSetRecord>> {
    let n = d.n();
    if n > config.partition_cap {
        return Err(Error::CapExceeded {
            task: "consistent-set enumeration",
            n,
            cap: config.partition_cap,
            estimate: bell_number(n),
        });
    }

    // roots: every candidate first cell (contains history 0)
    let rest = Event::full(n).minus(Event::singleton(0));
    let mut roots = Vec::with_capacity(1usize << (n - 1));
    let rest_bits = rest.bits();
    let mut s = rest_bits;
    loop {
        roots.push(Event::from_bits(s | 1));
        if s == 0 {
            break;
        }
        s = (s - 1) & rest_bits;
    }

    let mut partitions: Vec<Vec<Event>> = parallel_map_chunks(config.workers, roots, |chunk| {
        let mut out = Vec::new();
        for &first in chunk {
            let mut blocks = vec![first];
            extend_partition(d, mode, &mut blocks, Event::full(n).minus(first), &mut out);
        }
        out
    });

    partitions.sort_by_key(|cells| rgs_of_cells(n, cells));

    partitions
        .into_iter()
        .map(|cells| {
            let partition = Partition::new(n, cells)?;
            let cell_measures = partition
                .cells()
                .iter()
                .map(|c| d.mu(*c))
                .collect::<Result<Vec<_>>>()?;
            Ok(ConsistentSetRecord {
                partition,
                cell_measures,
                is_consistent: true,
            })
        })
        .collect()
}

fn rgs_of_cells(n: usize, cells: &[Event]) -> Vec<u8> {
    // cells arrive ordered by min member
    let mut out = vec![0u8; n];
    for (k, cell) in cells.iter().enumerate() {
        for i in cell.iter() {
            out[i] = k as u8;
        }
    }
    out
}

fn extend_partition(
    d: &DecoherenceFunctional,
    mode: DecoherenceMode,
    blocks: &mut Vec<Event>,
    remaining: Event,
    out: &mut Vec<Vec<Event>>,
) {
    let anchor = match remaining.min_member() {
        None => {
            out.push(blocks.clone());
            return;
        }
        Some(a) => a,
    };
    let rest_bits = remaining.bits() & !(1u64 << anchor);
    let mut s = rest_bits;
    loop {
        let block = Event::from_bits(s | (1u64 << anchor));
        let ok = blocks.iter().all(|b| {
            d.evaluate_is_zero(block, *b, mode)
                .expect("enumeration events lie within the space")
        });
        if ok {
            blocks.push(block);
            extend_partition(d, mode, blocks, remaining.minus(block), out);
            blocks.pop();
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & rest_bits;
    }
}

/// All consistent histories in canonical subset order (cardinality, then
/// bit pattern); includes the empty event and the whole space.
pub fn enumerate_consistent_histories(
    d: &DecoherenceFunctional,
    mode: DecoherenceMode,
    config: &RunConfig,
) -> Result<Vec<Event>> {
    d.consistent_history_scan(mode, config)
}

/// Per-cell measures of a consistent partition; rejects inconsistent input.
pub fn probabilities(
    d: &DecoherenceFunctional,
    p: &Partition,
    mode: DecoherenceMode,
) -> Result<Vec<(Event, Scalar)>> {
    if !is_consistent(d, p, mode)? {
        return Err(Error::InconsistentPartition);
    }
    p.cells()
        .iter()
        .map(|c| Ok((*c, d.mu(*c)?)))
        .collect()
}

/// True when every cell of `coarse` is a union of cells of `fine`.
pub fn is_coarse_graining(coarse: &Partition, fine: &Partition) -> Result<bool> {
    if coarse.n() != fine.n() {
        return Err(Error::SpaceMismatch { n: coarse.n() });
    }
    Ok(fine
        .cells()
        .iter()
        .all(|fc| coarse.cells().iter().any(|cc| fc.is_subset_of(*cc))))
}
