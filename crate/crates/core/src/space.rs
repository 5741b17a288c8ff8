use crate::error::{Error, Result};

/// Hard ceiling on the number of fine-grained histories; events are bitsets
/// over the space.
pub const MAX_HISTORIES: usize = 32;

/// The finite space of fine-grained histories, identified by unique labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HistorySpace {
    labels: Vec<String>,
}

impl HistorySpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidSpace("at least one history is required".into()));
        }
        if labels.len() > MAX_HISTORIES {
            return Err(Error::InvalidSpace(format!(
                "{} histories exceed the representable maximum {MAX_HISTORIES}",
                labels.len()
            )));
        }
        for (k, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::InvalidSpace(format!("history {k} has an empty label")));
            }
            if labels[..k].contains(l) {
                return Err(Error::InvalidSpace(format!("duplicate label `{l}`")));
            }
        }
        Ok(HistorySpace { labels })
    }

    /// Space with labels `h1..hn`.
    pub fn with_default_labels(n: usize) -> Result<Self> {
        HistorySpace::new((1..=n).map(|k| format!("h{k}")).collect())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn omega(&self) -> Event {
        Event::full(self.n())
    }

    pub fn contains_event(&self, e: Event) -> bool {
        e.bits() >> self.n() == 0
    }

    pub fn check_event(&self, e: Event) -> Result<()> {
        if self.contains_event(e) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch { n: self.n() })
        }
    }

    pub fn event_from_indices(&self, indices: &[usize]) -> Result<Event> {
        let mut e = Event::EMPTY;
        for &i in indices {
            if i >= self.n() {
                return Err(Error::SpaceMismatch { n: self.n() });
            }
            e = e.with(i);
        }
        Ok(e)
    }

    /// Parses a `+`-separated label list such as `h1+h2+h7`; the empty string
    /// is the empty event.
    pub fn event_from_labels(&self, expr: &str) -> Result<Event> {
        let mut e = Event::EMPTY;
        for part in expr.split('+') {
            let name = part.trim();
            if name.is_empty() {
                continue;
            }
            match self.index_of(name) {
                Some(i) => e = e.with(i),
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown history label `{name}`"
                    )))
                }
            }
        }
        Ok(e)
    }

    pub fn event_labels(&self, e: Event) -> Vec<&str> {
        e.iter().map(|i| self.label(i)).collect()
    }

    /// `{h1,h2}`-style rendering.
    pub fn format_event(&self, e: Event) -> String {
        format!("{{{}}}", self.event_labels(e).join(","))
    }
}

/// A coarse-grained history: a subset of the fine-grained history space,
/// stored as a bitset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event(u64);

impl Event {
    pub const EMPTY: Event = Event(0);

    pub fn from_bits(bits: u64) -> Event {
        Event(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(index: usize) -> Event {
        Event(1 << index)
    }

    pub fn full(n: usize) -> Event {
        debug_assert!(n <= MAX_HISTORIES);
        if n == 0 {
            Event(0)
        } else {
            Event(u64::MAX >> (64 - n))
        }
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn with(self, index: usize) -> Event {
        Event(self.0 | 1 << index)
    }

    pub fn union(self, other: Event) -> Event {
        Event(self.0 | other.0)
    }

    pub fn intersect(self, other: Event) -> Event {
        Event(self.0 & other.0)
    }

    pub fn minus(self, other: Event) -> Event {
        Event(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Event {
        Event::full(n).minus(self)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: Event) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint_from(self, other: Event) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest member index; `None` for the empty event.
    pub fn min_member(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Ascending member indices.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Canonical listing key: by cardinality, then by bit pattern.
    pub fn rank_key(self) -> (u32, u64) {
        (self.0.count_ones(), self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_rejects_bad_labels() {
        assert!(HistorySpace::new(vec![]).is_err());
        assert!(HistorySpace::new(vec!["a".into(), "a".into()]).is_err());
        assert!(HistorySpace::new(vec!["a".into(), String::new()]).is_err());
        assert!(HistorySpace::with_default_labels(33).is_err());
    }

    #[test]
    fn event_algebra() {
        let a = Event::from_bits(0b0110);
        let b = Event::from_bits(0b0011);
        assert_eq!(a.union(b).bits(), 0b0111);
        assert_eq!(a.intersect(b).bits(), 0b0010);
        assert_eq!(a.minus(b).bits(), 0b0100);
        assert_eq!(a.complement(4).bits(), 0b1001);
        assert!(Event::from_bits(0b0010).is_subset_of(a));
        assert!(!a.is_subset_of(b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(Event::full(3).bits(), 0b111);
        assert_eq!(a.min_member(), Some(1));
        assert_eq!(Event::EMPTY.min_member(), None);
    }

    #[test]
    fn label_expressions() {
        let s = HistorySpace::with_default_labels(8).unwrap();
        let e = s.event_from_labels("h1+h2+h7").unwrap();
        assert_eq!(e.bits(), 0b0100_0011);
        assert_eq!(s.format_event(e), "{h1,h2,h7}");
        assert!(s.event_from_labels("h1+bogus").is_err());
        assert_eq!(s.event_from_labels("").unwrap(), Event::EMPTY);
    }
}
