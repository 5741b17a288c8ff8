//! Incremental all-subset scans.
//!
//! Subsets are visited in binary-reflected Gray-code order so the running
//! measure and cross-term accumulators are updated in O(n) per subset, and
//! the index range splits into contiguous per-worker chunks whose merged
//! output is independent of the worker count.

use std::ops::Range;

use crate::config::parallel_map_chunks;
use crate::scalar::RingScalar;

/// Subsets per independently initialized walk block. Fixed block boundaries
/// make the float accumulation bit-identical for every worker count: workers
/// only distribute whole blocks, never split one.
const BLOCK_BITS: u32 = 12;

/// Walks `gray(idx)` for `idx` in `range`, maintaining for the current
/// subset `g`:
///   - `mu`   = sum of entries over g x g,
///   - `racc` = sum over i in g of the full row totals,
/// so the cross term D(g, complement) is `racc - mu`.
fn gray_walk<R: RingScalar>(
    entries: &[R],
    n: usize,
    row_totals: &[R],
    range: Range<u64>,
    mut visit: impl FnMut(u64, &R, &R),
) {
    if range.is_empty() {
        return;
    }
    let start = range.start;
    let mut bits = start ^ (start >> 1);

    // column/row sums of the matrix restricted to members of `bits`
    let mut colsum: Vec<R> = (0..n)
        .map(|k| {
            let mut s = R::ring_zero();
            for i in 0..n {
                if bits >> i & 1 == 1 {
                    s.ring_add_assign(&entries[i * n + k]);
                }
            }
            s
        })
        .collect();
    let mut rowsum: Vec<R> = (0..n)
        .map(|k| {
            let mut s = R::ring_zero();
            for j in 0..n {
                if bits >> j & 1 == 1 {
                    s.ring_add_assign(&entries[k * n + j]);
                }
            }
            s
        })
        .collect();
    let mut mu = R::ring_zero();
    let mut racc = R::ring_zero();
    for i in 0..n {
        if bits >> i & 1 == 1 {
            mu.ring_add_assign(&rowsum[i]);
            racc.ring_add_assign(&row_totals[i]);
        }
    }

    for idx in range.clone() {
        visit(bits, &mu, &racc);
        let next = idx + 1;
        if next == range.end {
            break;
        }
        let t = next.trailing_zeros() as usize;
        if bits >> t & 1 == 0 {
            let mut delta = entries[t * n + t].clone();
            delta.ring_add_assign(&colsum[t]);
            delta.ring_add_assign(&rowsum[t]);
            mu.ring_add_assign(&delta);
            for k in 0..n {
                colsum[k].ring_add_assign(&entries[t * n + k]);
                rowsum[k].ring_add_assign(&entries[k * n + t]);
            }
            racc.ring_add_assign(&row_totals[t]);
            bits |= 1 << t;
        } else {
            for k in 0..n {
                colsum[k].ring_sub_assign(&entries[t * n + k]);
                rowsum[k].ring_sub_assign(&entries[k * n + t]);
            }
            let mut delta = entries[t * n + t].clone();
            delta.ring_add_assign(&colsum[t]);
            delta.ring_add_assign(&rowsum[t]);
            mu.ring_sub_assign(&delta);
            racc.ring_sub_assign(&row_totals[t]);
            bits &= !(1 << t);
        }
    }
}

/// Runs `f` on every subset of an n-element space and collects its hits.
/// Output order follows the scan index, so callers sort canonically.
pub(crate) fn collect_over_subsets<R, T>(
    entries: &[R],
    n: usize,
    workers: usize,
    f: impl Fn(u64, &R, &R) -> Option<T> + Sync,
) -> Vec<T>
where
    R: RingScalar,
    T: Send,
{
    let row_totals: Vec<R> = (0..n)
        .map(|i| {
            let mut s = R::ring_zero();
            for k in 0..n {
                s.ring_add_assign(&entries[i * n + k]);
            }
            s
        })
        .collect();
    let total = 1u64 << n;
    let block = 1u64 << BLOCK_BITS;
    let blocks: Vec<Range<u64>> = (0..total.div_ceil(block))
        .map(|b| (b * block)..((b + 1) * block).min(total))
        .collect();
    parallel_map_chunks(workers, blocks, |chunk| {
        let mut out = Vec::new();
        for range in chunk {
            gray_walk(entries, n, &row_totals, range.clone(), |bits, mu, racc| {
                if let Some(t) = f(bits, mu, racc) {
                    out.push(t);
                }
            });
        }
        out
    })
}
