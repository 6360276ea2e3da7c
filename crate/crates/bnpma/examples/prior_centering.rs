//! Verify by Monte Carlo that the prior is centered on the chosen measure.
//!
//! Each cohort gets its own partition anchored at its reported numbers,
//! yet the marginal prior expectation of every random distribution is
//! the common centering measure: the calibrated per-cohort intercepts
//! absorb the nonlinearity of the logistic link. Here we draw the three
//! node mixtures from their priors repeatedly and compare the average
//! probability of each level-1/2 set against its centering target.
//!
//! Run with `cargo run -p bnpma --example prior_centering`.

use bnpma::centering::{Centering, CenteringFamily};
use bnpma::data::{CohortSummary, Dataset, Marker};
use bnpma::model::{Hyper, ModelState, Split};
use bnpma::rng::stream;

fn main() -> bnpma::Result<()> {
    let quads = [
        (2.1, 4.0, 7.5, 40),
        (3.3, 5.2, 8.8, 60),
        (1.2, 2.4, 4.1, 25),
        (5.0, 9.1, 16.0, 80),
        (2.8, 6.3, f64::INFINITY, 50),
    ];
    let cohorts: Vec<CohortSummary> = quads
        .iter()
        .enumerate()
        .map(|(i, &(lower, median, upper, n))| CohortSummary {
            study_id: format!("s{i}"),
            cohort_id: format!("s{i}_c"),
            marker: Marker::None,
            lower,
            median,
            upper,
            n,
            conf_level: 0.95,
            covariates: vec![1.5 + i as f64, (i % 2) as f64],
        })
        .collect();
    let medians: Vec<f64> = cohorts.iter().map(|c| c.median).collect();
    let dataset = Dataset::new(cohorts, vec!["x1".into(), "x2".into()])?;
    let f0 = Centering::from_pooled_medians(&medians, CenteringFamily::LogNormal)?;

    let mut rng = stream(11, 1);
    let mut state = ModelState::init(dataset, f0, Hyper::default(), &mut rng)?;

    let reps = 2_000usize;
    let n = state.dataset.n_cohorts();
    // level-1/2 set probabilities per cohort: B0, B1, B00, B01, B10, B11
    let mut acc = vec![[0.0f64; 6]; n];
    for _ in 0..reps {
        state.redraw_prior(&mut rng);
        for (i, a) in acc.iter_mut().enumerate() {
            let y1 = state.branch_prob(Split::Median, i);
            let y00 = state.branch_prob(Split::Lower, i);
            let y10 = state.branch_prob(Split::Upper, i);
            a[0] += y1;
            a[1] += 1.0 - y1;
            a[2] += y1 * y00;
            a[3] += y1 * (1.0 - y00);
            a[4] += (1.0 - y1) * y10;
            a[5] += (1.0 - y1) * (1.0 - y10);
        }
    }

    println!("mean prior set probability vs centering target over {reps} draws\n");
    println!(
        "{:<8} {:>4} {:>9} {:>9} {:>7}",
        "cohort", "set", "mean", "target", "gap"
    );
    let mut worst = 0.0f64;
    for i in 0..n {
        let (lo, mid, hi) = state.trees[i].quartile_cuts();
        let f0 = &state.f0;
        let targets = [
            f0.cdf(mid),
            1.0 - f0.cdf(mid),
            f0.cdf(lo),
            f0.cdf(mid) - f0.cdf(lo),
            f0.cdf(hi) - f0.cdf(mid),
            1.0 - f0.cdf(hi),
        ];
        for (set, (&sum, target)) in ["B0", "B1", "B00", "B01", "B10", "B11"]
            .iter()
            .zip(acc[i].iter().zip(targets))
        {
            let mean = sum / reps as f64;
            let gap = (mean - target).abs();
            worst = worst.max(gap);
            println!(
                "{:<8} {set:>4} {mean:>9.5} {target:>9.5} {gap:>7.5}",
                state.dataset.cohorts[i].cohort_id
            );
        }
    }
    println!("\nlargest gap: {worst:.5}");
    Ok(())
}
