//! Turn a reported (lower, median, upper, n) quadruple into interval counts.
//!
//! A distribution-free confidence interval for a median is a pair of
//! order statistics (t_(k), t_(j)) chosen from the Binomial(n, 1/2)
//! distribution of the number of observations below the true median.
//! Reading that construction backwards, a reported quadruple implies
//! how many of the n observations fell into each partition cell, and
//! those counts are what the sampler conditions on.
//!
//! Run with `cargo run -p bnpma --example interval_counts`.

use bnpma::data::{CohortSummary, Marker};
use bnpma::partition::{binomial_ci_indices, derive_counts};

fn main() -> bnpma::Result<()> {
    println!("order statistic indices for a 95% median interval");
    println!("{:>6} {:>6} {:>6}", "n", "k", "j");
    for n in [10, 25, 50, 100, 250, 500] {
        let (k, j) = binomial_ci_indices(n, 0.95)?;
        println!("{n:>6} {k:>6} {j:>6}");
    }

    let cohort = CohortSummary {
        study_id: "s1".into(),
        cohort_id: "s1_pos".into(),
        marker: Marker::Positive,
        lower: 3.1,
        median: 5.6,
        upper: 9.8,
        n: 50,
        conf_level: 0.95,
        covariates: vec![],
    };
    let c = derive_counts(&cohort)?;
    println!("\ncounts implied by a quadruple with n = {}", cohort.n);
    println!("  level 1: {:>3} at or below the median, {:>3} above", c.n0, c.n1);
    println!("  level 2: {:>3} | {:>3} inside the lower half", c.n00, c.n01);
    println!("           {:>3} | {:>3} inside the upper half", c.n10, c.n11);
    assert_eq!(c.n00 + c.n01, c.n0);
    assert_eq!(c.n10 + c.n11, c.n1);
    assert_eq!(c.n0 + c.n1, cohort.n);
    println!("  identities hold: children sum to parents, parents to n");
    Ok(())
}
