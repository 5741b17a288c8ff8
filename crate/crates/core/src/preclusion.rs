//! Null events, the maximal-null antichain, zero covers and contrary
//! inferences.

use crate::config::RunConfig;
use crate::consistency::Partition;
use crate::error::{Error, Result};
use crate::functional::{DecoherenceFunctional, DecoherenceMode};
use crate::space::Event;

/// All measure-zero events of a functional, with the antichain of
/// inclusion-maximal ones. Preclusivity queries only consult the antichain:
/// an event sits inside some null exactly when it sits inside a maximal one.
#[derive(Clone, Debug)]
pub struct NullCatalog {
    n: usize,
    nulls: Vec<Event>,
    maximal_nulls: Vec<Event>,
    borderline: Vec<Event>,
}

impl NullCatalog {
    pub fn n(&self) -> usize {
        self.n
    }

    /// All non-empty events with zero measure, in canonical order.
    pub fn nulls(&self) -> &[Event] {
        &self.nulls
    }

    /// The antichain of inclusion-maximal nulls.
    pub fn maximal_nulls(&self) -> &[Event] {
        &self.maximal_nulls
    }

    /// Float-backend events whose measure fell in `(eps, 10*eps)`; exposed
    /// so tolerance artifacts are visible instead of silent.
    pub fn borderline(&self) -> &[Event] {
        &self.borderline
    }

    pub fn is_null(&self, e: Event) -> bool {
        self.nulls.binary_search_by_key(&e.rank_key(), |x| x.rank_key()).is_ok()
    }
}

/// Scans every non-empty event and catalogs the measure-zero ones.
pub fn enumerate_null_events(
    d: &DecoherenceFunctional,
    config: &RunConfig,
) -> Result<NullCatalog> {
    let (nulls, borderline) = d.null_scan(config)?;
    let maximal_nulls: Vec<Event> = nulls
        .iter()
        .filter(|z| !nulls.iter().any(|w| **z != *w && z.is_subset_of(*w)))
        .copied()
        .collect();
    Ok(NullCatalog {
        n: d.n(),
        nulls,
        maximal_nulls,
        borderline,
    })
}

/// A non-empty event is preclusive when it is contained in no null event.
pub fn is_preclusive(catalog: &NullCatalog, a: Event) -> Result<bool> {
    if a.is_empty() {
        return Err(Error::EmptyEvent);
    }
    Ok(!catalog
        .maximal_nulls
        .iter()
        .any(|z| a.is_subset_of(*z)))
}

/// All inclusion-minimal families of nulls (at most `max_family_size` of
/// them) whose union is the whole space, in canonical order.
pub fn find_zero_covers(
    catalog: &NullCatalog,
    max_family_size: usize,
) -> Result<Vec<Vec<Event>>> {
    if max_family_size < 2 {
        return Err(Error::InvalidArgument(
            "zero-cover family size must be at least 2".into(),
        ));
    }
    let omega = Event::full(catalog.n);
    let nulls = &catalog.nulls;

    // union of nulls[i..], for pruning branches that can no longer cover
    let mut suffix = vec![Event::EMPTY; nulls.len() + 1];
    for i in (0..nulls.len()).rev() {
        suffix[i] = suffix[i + 1].union(nulls[i]);
    }

    let mut covers = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    search_covers(
        nulls,
        &suffix,
        omega,
        0,
        Event::EMPTY,
        max_family_size,
        &mut chosen,
        &mut covers,
    );
    covers.sort_by(|a, b| {
        (a.len(), a.iter().map(|e| e.rank_key()).collect::<Vec<_>>())
            .cmp(&(b.len(), b.iter().map(|e| e.rank_key()).collect::<Vec<_>>()))
    });
    Ok(covers)
}

#[allow(clippy::too_many_arguments)]
fn search_covers(
    nulls: &[Event],
    suffix: &[Event],
    omega: Event,
    from: usize,
    union: Event,
    budget: usize,
    chosen: &mut Vec<usize>,
    covers: &mut Vec<Vec<Event>>,
) {
    if union == omega {
        // inclusion-minimal: every member keeps a private element
        let minimal = chosen.iter().all(|&k| {
            let rest = chosen
                .iter()
                .filter(|&&j| j != k)
                .fold(Event::EMPTY, |acc, &j| acc.union(nulls[j]));
            rest != omega
        });
        if minimal {
            covers.push(chosen.iter().map(|&k| nulls[k]).collect());
        }
        return;
    }
    if budget == 0 || from >= nulls.len() {
        return;
    }
    if union.union(suffix[from]) != omega {
        return;
    }
    for k in from..nulls.len() {
        // skip members that add nothing: they could never keep a private element
        if nulls[k].is_subset_of(union) {
            continue;
        }
        chosen.push(k);
        search_covers(
            nulls,
            suffix,
            omega,
            k + 1,
            union.union(nulls[k]),
            budget - 1,
            chosen,
            covers,
        );
        chosen.pop();
    }
}

/// Checks an arbitrary family against the zero-cover definition (all
/// members null, union the whole space), without any minimality demand.
pub fn is_zero_cover(catalog: &NullCatalog, family: &[Event]) -> bool {
    !family.is_empty()
        && family.iter().all(|e| catalog.is_null(*e))
        && family
            .iter()
            .fold(Event::EMPTY, |acc, e| acc.union(*e))
            == Event::full(catalog.n)
}

/// Two probability-one propositions held in different consistent sets,
/// disjoint but not exhaustive.
#[derive(Clone, Debug)]
pub struct ContraryWitness {
    pub p: Event,
    pub q: Event,
    pub cs_p: Partition,
    pub cs_q: Partition,
}

impl ContraryWitness {
    /// Checks every defining property of the witness against a functional.
    pub fn verify(&self, d: &DecoherenceFunctional, mode: DecoherenceMode) -> Result<bool> {
        let n = d.n();
        let ok = self.p.is_disjoint_from(self.q)
            && self.p.union(self.q) != Event::full(n)
            && d.mu_is_one(self.p)?
            && d.mu_is_one(self.q)?
            && self.cs_p.cells().contains(&self.p)
            && self.cs_q.cells().contains(&self.q)
            && crate::consistency::is_consistent(d, &self.cs_p, mode)?
            && crate::consistency::is_consistent(d, &self.cs_q, mode)?;
        Ok(ok)
    }
}

/// Witnesses built from two-element zero covers: `{Z1, Z2}` covering the
/// space yields probability-one complements held in the complement-pair
/// consistent sets.
pub fn contrary_from_zero_covers(
    d: &DecoherenceFunctional,
    catalog: &NullCatalog,
) -> Result<Vec<ContraryWitness>> {
    let n = d.n();
    let covers = find_zero_covers(catalog, 2)?;
    let mut out = Vec::new();
    for family in covers.iter().filter(|f| f.len() == 2) {
        let (z1, z2) = (family[0], family[1]);
        let p = z1.complement(n);
        let q = z2.complement(n);
        out.push(ContraryWitness {
            p,
            q,
            cs_p: Partition::new(n, vec![z1, p])?,
            cs_q: Partition::new(n, vec![z2, q])?,
        });
    }
    Ok(out)
}

/// Direct search: all pairs of measure-one consistent histories that are
/// disjoint and non-exhaustive.
pub fn contrary_direct_search(
    d: &DecoherenceFunctional,
    config: &RunConfig,
) -> Result<Vec<ContraryWitness>> {
    let n = d.n();
    let omega = Event::full(n);
    let ch = d.consistent_history_scan(DecoherenceMode::Medium, config)?;
    let mut ones = Vec::new();
    for h in ch {
        if !h.is_empty() && h != omega && d.mu_is_one(h)? {
            ones.push(h);
        }
    }
    let mut out = Vec::new();
    for (k, &p) in ones.iter().enumerate() {
        for &q in &ones[k + 1..] {
            if p.is_disjoint_from(q) && p.union(q) != omega {
                out.push(ContraryWitness {
                    p,
                    q,
                    cs_p: Partition::new(n, vec![p, p.complement(n)])?,
                    cs_q: Partition::new(n, vec![q, q.complement(n)])?,
                });
            }
        }
    }
    Ok(out)
}

/// Contrary-inference detection: the zero-cover construction supplies the
/// witnesses, and the direct search over measure-one consistent histories
/// confirms none is missed. Returns the deduplicated union.
pub fn detect_contrary_inferences(
    d: &DecoherenceFunctional,
    catalog: &NullCatalog,
    config: &RunConfig,
) -> Result<Vec<ContraryWitness>> {
    let via_covers = contrary_from_zero_covers(d, catalog)?;
    let direct = contrary_direct_search(d, config)?;

    let key = |w: &ContraryWitness| {
        let (a, b) = (w.p.rank_key(), w.q.rank_key());
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    };
    let mut seen: Vec<_> = via_covers.iter().map(key).collect();
    let mut out = via_covers;
    for w in direct {
        if !seen.contains(&key(&w)) {
            seen.push(key(&w));
            out.push(w);
        }
    }
    Ok(out)
}

/// Disjoint events whose union falls short of the whole space.
pub fn is_contrary(a: Event, b: Event, n: usize) -> bool {
    a.is_disjoint_from(b) && a.union(b) != Event::full(n)
}

/// Disjoint events whose union is the whole space.
pub fn is_contradictory(a: Event, b: Event, n: usize) -> bool {
    a.is_disjoint_from(b) && a.union(b) == Event::full(n)
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
    fn three_slit_nulls_and_cover() {
        let d = three_slit();
        let catalog = enumerate_null_events(&d, &cfg()).unwrap();
        let bits: Vec<u64> = catalog.nulls().iter().map(|e| e.bits()).collect();
        assert_eq!(bits, vec![0b011, 0b110]);
        assert_eq!(catalog.maximal_nulls().len(), 2);
        assert!(catalog.borderline().is_empty());

        let covers = find_zero_covers(&catalog, 2).unwrap();
        assert_eq!(covers.len(), 1);
        let family: Vec<u64> = covers[0].iter().map(|e| e.bits()).collect();
        assert_eq!(family, vec![0b011, 0b110]);
    }

    #[test]
    fn preclusivity_scans_the_antichain() {
        let d = hopper();
        let catalog = enumerate_null_events(&d, &cfg()).unwrap();
        // {h2,h3}
        assert!(is_preclusive(&catalog, Event::from_bits(0b0000_0110)).unwrap());
        // {h2} sits inside the null {h1,h2}
        assert!(!is_preclusive(&catalog, Event::from_bits(0b0000_0010)).unwrap());
        assert!(matches!(
            is_preclusive(&catalog, Event::EMPTY),
            Err(Error::EmptyEvent)
        ));
        // three-slit {h_AP,h_CP}
        let ds = three_slit();
        let cs = enumerate_null_events(&ds, &cfg()).unwrap();
        assert!(is_preclusive(&cs, Event::from_bits(0b101)).unwrap());
    }

    #[test]
    fn hopper_nulls_match_the_fifteen() {
        let d = hopper();
        let catalog = enumerate_null_events(&d, &cfg()).unwrap();
        let bits: Vec<u64> = catalog.nulls().iter().map(|e| e.bits()).collect();
        let pair = |a: usize, b: usize| (1u64 << a) | (1 << b);
        let quad = |a: usize, b: usize, c: usize, e: usize| {
            (1u64 << a) | (1 << b) | (1 << c) | (1 << e)
        };
        let mut expected = vec![
            pair(0, 1),
            pair(0, 2),
            pair(0, 3),
            pair(4, 5),
            pair(5, 6),
            pair(5, 7),
        ];
        for k in 1..=3 {
            for m in [4usize, 6, 7] {
                expected.push(quad(0, k, 5, m));
            }
        }
        expected.sort_by_key(|b| (b.count_ones(), *b));
        assert_eq!(bits, expected);
        // maximal antichain is exactly the nine four-element nulls
        assert_eq!(catalog.maximal_nulls().len(), 9);
        assert!(catalog
            .maximal_nulls()
            .iter()
            .all(|e| e.len() == 4));
    }

    #[test]
    fn hopper_zero_covers() {
        let d = hopper();
        let catalog = enumerate_null_events(&d, &cfg()).unwrap();
        assert!(find_zero_covers(&catalog, 2).unwrap().is_empty());
        let covers = find_zero_covers(&catalog, 6).unwrap();
        // the six-pair family is among the minimal covers
        let pair = |a: usize, b: usize| Event::from_bits((1u64 << a) | (1 << b));
        let six = vec![
            pair(0, 1),
            pair(0, 2),
            pair(0, 3),
            pair(4, 5),
            pair(5, 6),
            pair(5, 7),
        ];
        assert!(covers.iter().any(|f| *f == six));
        assert!(is_zero_cover(&catalog, &six));
        // every reported family is a genuine cover and every member null
        assert!(covers.iter().all(|f| is_zero_cover(&catalog, f)));
        assert!(find_zero_covers(&catalog, 1).is_err());
    }

    #[test]
    fn contrary_witnesses() {
        let slit = three_slit();
        let catalog = enumerate_null_events(&slit, &cfg()).unwrap();
        let witnesses = detect_contrary_inferences(&slit, &catalog, &cfg()).unwrap();
        assert_eq!(witnesses.len(), 1);
        let w = &witnesses[0];
        assert_eq!(w.p.bits(), 0b100); // {h_CP}
        assert_eq!(w.q.bits(), 0b001); // {h_AP}
        assert!(w.verify(&slit, DecoherenceMode::Medium).unwrap());

        let hop = hopper();
        let hc = enumerate_null_events(&hop, &cfg()).unwrap();
        assert!(detect_contrary_inferences(&hop, &hc, &cfg()).unwrap().is_empty());

        let ab = models::make_appendix_b();
        let ac = enumerate_null_events(&ab, &cfg()).unwrap();
        assert!(ac.nulls().is_empty());
        assert!(detect_contrary_inferences(&ab, &ac, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn both_contrary_routes_agree_on_paper_examples() {
        for d in [three_slit(), hopper(), models::make_appendix_b()] {
            let catalog = enumerate_null_events(&d, &cfg()).unwrap();
            let a = contrary_from_zero_covers(&d, &catalog).unwrap();
            let b = contrary_direct_search(&d, &cfg()).unwrap();
            let norm = |ws: &[ContraryWitness]| {
                let mut keys: Vec<_> = ws
                    .iter()
                    .map(|w| {
                        let (x, y) = (w.p.bits(), w.q.bits());
                        (x.min(y), x.max(y))
                    })
                    .collect();
                keys.sort_unstable();
                keys
            };
            assert_eq!(norm(&a), norm(&b));
        }
    }

    #[test]
    fn contrary_and_contradictory_predicates() {
        let a = Event::from_bits(0b001);
        let c = Event::from_bits(0b100);
        assert!(is_contrary(a, c, 3));
        assert!(!is_contradictory(a, c, 3));
        let comp = a.complement(3);
        assert!(is_contradictory(a, comp, 3));
        assert!(!is_contrary(a, comp, 3));
        let ab = Event::from_bits(0b011);
        assert!(!is_contrary(a, ab, 3));
        assert!(!is_contradictory(a, ab, 3));
    }
}
