//! Cohort-specific partition trees and the order-statistic count
//! reconstruction that turns a reported (lower, median, upper, n) quadruple
//! into multinomial cell counts.
//!
//! Levels 1 and 2 of each tree are anchored at the reported median and CI
//! bounds; deeper levels cut each cell at the conditional median of the
//! centering measure, so they carry prior information only.

use crate::centering::Centering;
use crate::data::CohortSummary;
use crate::error::{Error, Result};

/// Order-statistic indices (k, j) such that the interval between the k-th
/// and j-th order statistics has at least the requested coverage for the
/// median, with at most α/2 tail mass on each side under Binomial(n, ½).
///
/// k is the largest integer with P(Z < k) ≤ α/2; j is the smallest with
/// P(Z ≥ j) ≤ α/2. Symmetry gives j = n − k + 1.
pub fn binomial_ci_indices(n: u32, level: f64) -> Result<(u32, u32)> {
    if !(level > 0.5 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level must lie in (0.5, 1), got {level}"
        )));
    }
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "order-statistic bounds need n ≥ 4, got {n}"
        )));
    }
    if n > 10_000 {
        return Err(Error::InvalidParameter(format!(
            "sample size {n} exceeds the supported range"
        )));
    }
    let half_alpha = 0.5 * (1.0 - level);
    let pmf = binomial_half_pmf(n);

    // largest k ≥ 1 with P(Z ≤ k−1) ≤ α/2
    let mut k = 0u32;
    let mut cum = 0.0;
    for t in 0..n {
        cum += pmf[t as usize];
        if cum <= half_alpha {
            k = t + 1;
        } else {
            break;
        }
    }
    // smallest j ≤ n with P(Z ≥ j) ≤ α/2
    let mut j = n + 1;
    let mut tail = 0.0;
    for t in (1..=n).rev() {
        tail += pmf[t as usize];
        if tail <= half_alpha {
            j = t;
        } else {
            break;
        }
    }
    if k == 0 || j > n {
        return Err(Error::IntervalUnidentifiable { n, level, half_alpha });
    }
    debug_assert_eq!(j, n - k + 1);
    Ok((k, j))
}

fn binomial_half_pmf(n: u32) -> Vec<f64> {
    let mut pmf = vec![0.0; n as usize + 1];
    pmf[0] = 0.5f64.powi(n as i32);
    for t in 0..n as usize {
        pmf[t + 1] = pmf[t] * (n as f64 - t as f64) / (t as f64 + 1.0);
    }
    pmf
}

/// Cell counts implied by a quadruple on the first two tree levels.
///
/// The counts are index arithmetic on order statistics, so they do not
/// depend on the reported bound values; when the upper bound is
/// unreported the (median, upper) cell keeps its count against the
/// imputed cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelCounts {
    pub n: u32,
    /// Count in (0, median) = ⌊n/2⌋.
    pub n0: u32,
    /// Count in (median, ∞).
    pub n1: u32,
    /// Count in (0, lower) = k.
    pub n00: u32,
    /// Count in (lower, median).
    pub n01: u32,
    /// Count in (median, upper) = j − n₀, clipped at 0.
    pub n10: u32,
    /// Count in (upper, ∞).
    pub n11: u32,
}

/// Reconstruct cell counts from a cohort's quadruple.
pub fn derive_counts(cohort: &CohortSummary) -> Result<LevelCounts> {
    cohort.validate()?;
    let n = cohort.n;
    let (k, j) = binomial_ci_indices(n, cohort.conf_level)?;
    let n0 = n / 2;
    let n1 = n - n0;
    let n00 = k;
    let n01 = n0 - k; // k ≤ ⌊n/2⌋ because P(Z ≤ ⌊n/2⌋−1) tends to ½ > α/2
    let n10 = j.saturating_sub(n0);
    let n11 = n1 - n10; // j ≤ n so n10 ≤ n1
    Ok(LevelCounts { n, n0, n1, n00, n01, n10, n11 })
}

/// Binary partition tree of (0, ∞) for one cohort, stored as the sorted
/// interior boundaries of the deepest level. Cell t at depth M is
/// (b[t−1], b[t]) with b[−1] = 0 and b[2^M − 1] = ∞.
#[derive(Debug, Clone)]
pub struct PartitionTree {
    depth: usize,
    boundaries: Vec<f64>,
    counts: LevelCounts,
    /// True when the level-2 upper cut was imputed because upper = ∞.
    imputed_upper: bool,
}

/// Build the tree for a cohort: level 1 cuts at the reported median, level 2
/// at the CI bounds (the upper one imputed from `f0` when unreported), and
/// levels 3..depth at conditional medians of `f0`.
pub fn build_tree(cohort: &CohortSummary, f0: &Centering, depth: usize) -> Result<PartitionTree> {
    if depth < 2 {
        return Err(Error::InvalidParameter(format!("tree depth must be ≥ 2, got {depth}")));
    }
    if depth > 24 {
        return Err(Error::InvalidParameter(format!("tree depth {depth} is unreasonably large")));
    }
    let counts = derive_counts(cohort)?;
    let n_cells = 1usize << depth;
    let mut b = vec![0.0; n_cells - 1];
    let mid = n_cells / 2 - 1;
    b[mid] = cohort.median;
    let q1 = n_cells / 4 - 1;
    let q3 = 3 * n_cells / 4 - 1;
    let imputed_upper = !cohort.upper.is_finite();
    let upper = if imputed_upper {
        f0.conditional_median(cohort.median, f64::INFINITY)
    } else {
        cohort.upper
    };
    b[q1] = cohort.lower;
    b[q3] = upper;
    fill_conditional_medians(&mut b, 0, q1, 0.0, cohort.lower, f0);
    fill_conditional_medians(&mut b, q1 + 1, mid, cohort.lower, cohort.median, f0);
    fill_conditional_medians(&mut b, mid + 1, q3, cohort.median, upper, f0);
    fill_conditional_medians(&mut b, q3 + 1, n_cells - 1, upper, f64::INFINITY, f0);
    for w in b.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidQuadruple {
                cohort: cohort.cohort_id.clone(),
                reason: format!("tree boundaries not strictly increasing near {}", w[0]),
            });
        }
    }
    Ok(PartitionTree { depth, boundaries: b, counts, imputed_upper })
}

/// Fill interior boundary slots [lo, hi) for the cell (a, c) by recursive
/// conditional-median bisection.
fn fill_conditional_medians(
    b: &mut [f64],
    lo: usize,
    hi: usize,
    a: f64,
    c: f64,
    f0: &Centering,
) {
    if lo >= hi {
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let q = f0.conditional_median(a, c);
    b[mid] = q;
    fill_conditional_medians(b, lo, mid, a, q, f0);
    fill_conditional_medians(b, mid + 1, hi, q, c, f0);
}

impl PartitionTree {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_cells(&self) -> usize {
        1 << self.depth
    }

    pub fn counts(&self) -> &LevelCounts {
        &self.counts
    }

    pub fn imputed_upper(&self) -> bool {
        self.imputed_upper
    }

    /// Interior boundaries at the deepest level, strictly increasing.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// (left, right) edge of cell t; left of cell 0 is 0, right of the last
    /// cell is ∞.
    pub fn cell_bounds(&self, t: usize) -> (f64, f64) {
        let left = if t == 0 { 0.0 } else { self.boundaries[t - 1] };
        let right = if t + 1 == self.n_cells() { f64::INFINITY } else { self.boundaries[t] };
        (left, right)
    }

    /// Boundary values of the four level-2 cells: (lower, median, upper).
    pub fn quartile_cuts(&self) -> (f64, f64, f64) {
        let n_cells = self.n_cells();
        (
            self.boundaries[n_cells / 4 - 1],
            self.boundaries[n_cells / 2 - 1],
            self.boundaries[3 * n_cells / 4 - 1],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Marker;
    use statrs::distribution::{Binomial, DiscreteCDF};
    use std::f64::consts::LN_2;

    fn cohort(lower: f64, median: f64, upper: f64, n: u32) -> CohortSummary {
        CohortSummary {
            cohort_id: "c".into(),
            study_id: "s".into(),
            marker: Marker::None,
            lower,
            median,
            upper,
            n,
            conf_level: 0.95,
            covariates: vec![],
        }
    }

    /// Exhaustive search over all (k, j) cut pairs: the widest-coverage pair
    /// subject to at most α/2 mass in each tail.
    fn oracle_indices(n: u32, level: f64) -> Option<(u32, u32)> {
        let alpha = 1.0 - level;
        let bin = Binomial::new(0.5, n as u64).unwrap();
        let mut best: Option<(u32, u32)> = None;
        for k in 1..=n {
            // P(Z < k) = P(Z ≤ k−1)
            if bin.cdf(k as u64 - 1) > alpha / 2.0 {
                continue;
            }
            for j in k + 1..=n {
                let upper_tail = 1.0 - bin.cdf(j as u64 - 1);
                if upper_tail > alpha / 2.0 {
                    continue;
                }
                best = match best {
                    // narrowest admissible interval: largest k, then smallest j
                    Some((bk, bj)) => {
                        if k > bk || (k == bk && j < bj) {
                            Some((k, j))
                        } else {
                            Some((bk, bj))
                        }
                    }
                    None => Some((k, j)),
                };
            }
        }
        best
    }

    #[test]
    fn frozen_index_examples() {
        assert_eq!(binomial_ci_indices(50, 0.95).unwrap(), (18, 33));
        assert_eq!(binomial_ci_indices(10, 0.95).unwrap(), (2, 9));
        assert!(matches!(
            binomial_ci_indices(4, 0.95),
            Err(Error::IntervalUnidentifiable { .. })
        ));
    }

    #[test]
    fn indices_match_exhaustive_oracle() {
        for level in [0.90, 0.95] {
            for n in 10..=200 {
                let got = binomial_ci_indices(n, level).ok();
                let want = oracle_indices(n, level);
                assert_eq!(got, want, "n={n} level={level}");
            }
        }
    }

    #[test]
    fn index_symmetry() {
        for n in [10u32, 37, 50, 128, 499] {
            let (k, j) = binomial_ci_indices(n, 0.95).unwrap();
            assert_eq!(j, n - k + 1);
        }
    }

    #[test]
    fn count_identities_hold() {
        let c = cohort(2.0, 4.0, 9.0, 50);
        let lc = derive_counts(&c).unwrap();
        assert_eq!((lc.n0, lc.n00, lc.n01), (25, 18, 7));
        assert_eq!((lc.n10, lc.n11), (8, 17));
        assert_eq!(lc.n0 + lc.n1, lc.n);
        assert_eq!(lc.n00 + lc.n01, lc.n0);
        assert_eq!(lc.n10 + lc.n11, lc.n1);
    }

    #[test]
    fn counts_resum_over_random_sizes() {
        // order-statistic identities across the supported n range
        let mut n = 10u32;
        for step in 0..1000u32 {
            n = 10 + (n.wrapping_mul(1664525).wrapping_add(step)) % 491;
            let c = cohort(2.0, 4.0, 9.0, n);
            let lc = match derive_counts(&c) {
                Ok(lc) => lc,
                Err(_) => continue,
            };
            assert_eq!(lc.n0 + lc.n1, lc.n, "n={n}");
            assert_eq!(lc.n00 + lc.n01, lc.n0, "n={n}");
            assert_eq!(lc.n10 + lc.n11, lc.n1, "n={n}");
            assert_eq!(lc.n0, n / 2);
        }
    }

    #[test]
    fn unreported_upper_bound_keeps_index_counts() {
        // counts are order-statistic indices, independent of bound values
        let inf = derive_counts(&cohort(2.0, 4.0, f64::INFINITY, 50)).unwrap();
        let fin = derive_counts(&cohort(2.0, 4.0, 9.0, 50)).unwrap();
        assert_eq!(inf, fin);
        assert_eq!((inf.n10, inf.n11), (8, 17));
    }

    #[test]
    fn monotone_in_n_within_parity() {
        // k and j are nondecreasing in n; j − n₀ is nondecreasing along each
        // parity class of n (it is not monotone across parity: n=11 gives 5,
        // n=12 gives 4 at the 95% level)
        for level in [0.90, 0.95] {
            let mut prev_k = 0;
            let mut prev_j = 0;
            let mut prev_d = [0u32; 2];
            for n in 10..=500u32 {
                let (k, j) = binomial_ci_indices(n, level).unwrap();
                assert!(k >= prev_k, "k not monotone at n={n}");
                assert!(j >= prev_j, "j not monotone at n={n}");
                let d = j - n / 2;
                let par = (n % 2) as usize;
                if n > 11 {
                    assert!(d >= prev_d[par], "j−n₀ not parity-monotone at n={n}");
                }
                prev_k = k;
                prev_j = j;
                prev_d[par] = d;
            }
        }
        let (_, j11) = binomial_ci_indices(11, 0.95).unwrap();
        let (_, j12) = binomial_ci_indices(12, 0.95).unwrap();
        assert_eq!(j11 - 11 / 2, 5);
        assert_eq!(j12 - 12 / 2, 4);
    }

    #[test]
    fn quadruple_tree_at_depth_two() {
        let f0 = Centering::exponential(LN_2).unwrap();
        let tree = build_tree(&cohort(2.0, 4.0, 9.0, 50), &f0, 2).unwrap();
        assert_eq!(tree.boundaries(), &[2.0, 4.0, 9.0]);
        assert_eq!(tree.cell_bounds(0), (0.0, 2.0));
        assert_eq!(tree.cell_bounds(3), (9.0, f64::INFINITY));
    }

    #[test]
    fn deep_levels_cut_at_conditional_medians() {
        let f0 = Centering::exponential(LN_2).unwrap();
        let tree = build_tree(&cohort(2.0, 4.0, 9.0, 50), &f0, 4).unwrap();
        let b = tree.boundaries();
        assert_eq!(b.len(), 15);
        // level-3 cut inside (4, 9)
        let q = f0.conditional_median(4.0, 9.0);
        assert!((b[9] - q).abs() < 1e-12);
        // strictly increasing
        for w in b.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(tree.quartile_cuts(), (2.0, 4.0, 9.0));
    }

    #[test]
    fn infinite_upper_is_imputed_at_the_conditional_median() {
        let f0 = Centering::exponential(LN_2).unwrap();
        let tree = build_tree(&cohort(2.0, 4.0, f64::INFINITY, 50), &f0, 2).unwrap();
        assert!(tree.imputed_upper());
        let want = f0.conditional_median(4.0, f64::INFINITY);
        assert!((tree.boundaries()[2] - want).abs() < 1e-12);
    }

    #[test]
    fn bad_quadruples_error() {
        let f0 = Centering::exponential(LN_2).unwrap();
        assert!(build_tree(&cohort(4.0, 2.0, 9.0, 50), &f0, 3).is_err());
        assert!(build_tree(&cohort(2.0, 4.0, 9.0, 50), &f0, 1).is_err());
    }
}
