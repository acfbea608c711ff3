//! Empirical quantile conventions shared by the boosting, forest, and
//! conformal modules.
//!
//! One convention is used everywhere: the inverse empirical CDF with lower
//! interpolation. For a sample of size `n` and level `p`, the quantile is the
//! `ceil(p * n)`-th order statistic (1-based). The weighted variant walks the
//! value-sorted cumulative weights and returns the first value whose
//! cumulative weight reaches `p` (weights assumed normalized to sum to 1).

/// Snap tolerance applied before `ceil` so that products like `0.2 * 5`,
/// which land a few ulps above an integer, resolve to that integer.
const CEIL_SNAP: f64 = 1e-9;

/// Tolerance on cumulative weights in the weighted variant, absorbing
/// accumulation error in sums that should reach exactly `p`.
pub const WEIGHT_SNAP: f64 = 1e-12;

/// `ceil(p * n)` as a 1-based order-statistic index, clamped to `[1, n]`.
pub fn lower_interp_index(p: f64, n: usize) -> usize {
    debug_assert!(n > 0);
    let raw = (p * n as f64 - CEIL_SNAP).ceil() as isize;
    raw.clamp(1, n as isize) as usize
}

/// Quantile of an already-sorted slice, lower interpolation.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    sorted[lower_interp_index(p, sorted.len()) - 1]
}

/// Quantile of an unsorted slice, lower interpolation. Copies and sorts.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, p)
}

/// Weighted quantile with lower interpolation: the first value, in ascending
/// value order, whose cumulative weight reaches `p` (within [`WEIGHT_SNAP`]).
/// `pairs` must be sorted ascending by value; weights must sum to ~1.
/// Falls back to the last value when accumulation never reaches `p`.
pub fn weighted_quantile_sorted(pairs: &[(f64, f64)], p: f64) -> f64 {
    assert!(!pairs.is_empty(), "weighted quantile of empty sample");
    let target = p - WEIGHT_SNAP;
    let mut cum = 0.0;
    for &(value, weight) in pairs {
        cum += weight;
        if cum >= target {
            return value;
        }
    }
    pairs[pairs.len() - 1].0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_on_exact_products() {
        // 0.2 * 5 and 0.6 * 5 both land on integers in exact arithmetic.
        assert_eq!(lower_interp_index(0.2, 5), 1);
        assert_eq!(lower_interp_index(0.6, 5), 3);
        assert_eq!(lower_interp_index(0.5, 2), 1);
        assert_eq!(lower_interp_index(1.0, 7), 7);
    }

    #[test]
    fn index_on_fractional_products() {
        assert_eq!(lower_interp_index(0.3, 10), 3);
        assert_eq!(lower_interp_index(0.31, 10), 4);
        assert_eq!(lower_interp_index(0.0, 4), 1);
    }

    #[test]
    fn quantile_matches_order_statistics() {
        let v = [-1.0, 0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile(&v, 0.60), 1.0);
        let w = [10.0, 0.0];
        assert_eq!(quantile(&w, 0.5), 0.0);
    }

    #[test]
    fn weighted_walks_cdf() {
        let pairs = [(-3.0, 0.25), (-1.0, 0.25), (0.0, 0.25), (2.0, 0.25)];
        assert_eq!(weighted_quantile_sorted(&pairs, 0.5), -1.0);
        assert_eq!(weighted_quantile_sorted(&pairs, 0.999), 2.0);
        assert_eq!(weighted_quantile_sorted(&pairs, 0.1), -3.0);
    }

    #[test]
    fn weighted_monotone_in_p() {
        let pairs = [(-2.0, 0.1), (0.0, 0.4), (1.0, 0.3), (5.0, 0.2)];
        let mut prev = f64::NEG_INFINITY;
        for i in 1..100 {
            let q = weighted_quantile_sorted(&pairs, i as f64 / 100.0);
            assert!(q >= prev);
            prev = q;
        }
    }
}
