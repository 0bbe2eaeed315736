/// Bisection for an adjacent pair `(i, i + 1)` in `[lo, hi]` on which a
/// predicate changes value.
///
/// `lo_holds` is the known value at `lo`; the value at `hi` is taken to be
/// its negation. Neither endpoint is probed, and at most
/// `⌈log2(hi - lo)⌉` interior points are. The predicate need not be
/// monotone: whichever change point the bisection converges on is returned,
/// with the value at `i` equal to `lo_holds`.
pub fn find_flip<F>(lo: usize, hi: usize, lo_holds: bool, mut probe: F) -> (usize, usize)
where
    F: FnMut(usize) -> bool,
{
    assert!(lo < hi, "empty search range [{lo}, {hi}]");
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if probe(mid) == lo_holds {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// `⌈log2 x⌉` for `x ≥ 1`, and 0 for `x ≤ 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}
