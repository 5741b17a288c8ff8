use std::ops::Range;

/// Default relative tolerance for the float backend's zero tests.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Caps and worker counts shared by the enumeration operations.
///
/// Caps guard against accidentally launching exponential scans; they are
/// explicit knobs, not promises that larger values are cheap.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Worker threads used by subset scans and partition enumeration.
    pub workers: usize,
    /// Largest history space for which partitions are enumerated.
    pub partition_cap: usize,
    /// Largest history space for which all-subset scans run.
    pub subset_cap: usize,
    /// Largest history space for which weak positivity is brute-forced.
    pub weak_positivity_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            workers: 1,
            partition_cap: 12,
            subset_cap: 24,
            weak_positivity_cap: 20,
        }
    }
}

impl RunConfig {
    pub fn with_workers(workers: usize) -> Self {
        RunConfig {
            workers: workers.max(1),
            ..RunConfig::default()
        }
    }
}

/// Bell number B(n), the number of partitions of an n-element set.
pub fn bell_number(n: usize) -> u128 {
    // Bell triangle; n <= 32 stays far below u128 range.
    let mut row: Vec<u128> = vec![1];
    for _ in 1..=n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let y = *next.last().unwrap() + x;
            next.push(y);
        }
        row = next;
    }
    row[0]
}

/// Splits `0..total` into contiguous chunks, runs `work` on each (possibly on
/// separate threads) and concatenates the results in chunk order, so the
/// output is identical for every worker count.
pub(crate) fn parallel_ranges<T, F>(workers: usize, total: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> Vec<T> + Sync,
{
    if total == 0 {
        return Vec::new();
    }
    let workers = workers.max(1).min(total as usize);
    if workers == 1 {
        return work(0..total);
    }
    let chunk = total.div_ceil(workers as u64);
    let ranges: Vec<Range<u64>> = (0..workers as u64)
        .map(|w| (w * chunk)..((w + 1) * chunk).min(total))
        .filter(|r| r.start < r.end)
        .collect();
    let mut pieces: Vec<Vec<T>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|r| scope.spawn(|| work(r)))
            .collect();
        for h in handles {
            pieces.push(h.join().expect("scan worker panicked"));
        }
    });
    pieces.into_iter().flatten().collect()
}

/// Splits a work list into contiguous chunks per worker and concatenates the
/// per-chunk outputs in order.
pub(crate) fn parallel_map_chunks<I, T, F>(workers: usize, items: Vec<I>, work: F) -> Vec<T>
where
    I: Send + Sync,
    T: Send,
    F: Fn(&[I]) -> Vec<T> + Sync,
{
    if items.is_empty() {
        return Vec::new();
    }
    let workers = workers.max(1).min(items.len());
    if workers == 1 {
        return work(&items);
    }
    let chunk = items.len().div_ceil(workers);
    let mut pieces: Vec<Vec<T>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| scope.spawn(|| work(c))).collect();
        for h in handles {
            pieces.push(h.join().expect("enumeration worker panicked"));
        }
    });
    pieces.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers_match_known_values() {
        assert_eq!(bell_number(0), 1);
        assert_eq!(bell_number(1), 1);
        assert_eq!(bell_number(3), 5);
        assert_eq!(bell_number(8), 4140);
        assert_eq!(bell_number(12), 4_213_597);
    }

    #[test]
    fn parallel_ranges_is_worker_count_independent() {
        let work = |r: Range<u64>| r.map(|x| x * x).collect::<Vec<_>>();
        let serial = parallel_ranges(1, 1000, work);
        for w in [2, 3, 8] {
            assert_eq!(parallel_ranges(w, 1000, work), serial);
        }
    }
}
