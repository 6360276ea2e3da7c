//! Summarize a fitted chain: marker effects, predictive curve, ESS.
//!
//! Run with `cargo run --release -p bnpma --example posterior_summaries`.

use bnpma::centering::{Centering, CenteringFamily};
use bnpma::data::{Dataset, Marker};
use bnpma::gibbs::{run_chain, Schedule};
use bnpma::model::{Hyper, ModelState};
use bnpma::posterior::{effect_summaries, effective_sample_size, predictive_density};
use bnpma::rng::{stream, STREAM_INIT};
use bnpma::sim::{generate, SimConfig};

fn main() -> bnpma::Result<()> {
    let seed = 5;
    let sim = SimConfig {
        studies: 5,
        n_per_cohort: 40,
        seed,
        ..SimConfig::default()
    };
    let out = generate(&sim)?;
    let medians: Vec<f64> = out.cohorts.iter().map(|c| c.median).collect();
    let f0 = Centering::from_pooled_medians(&medians, CenteringFamily::LogNormal)?;
    let dataset = Dataset::new(out.cohorts, out.covariate_names)?;

    let mut state = ModelState::init(dataset, f0, Hyper::default(), &mut stream(seed, STREAM_INIT))?;
    let sched = Schedule {
        n_iter: 1_200,
        burn_in: 600,
        thin: 2,
    };
    let chain = run_chain(&mut state, &sched, seed, 1)?;

    // within-study marker effect D = log(M+ / M-)
    let effects = effect_summaries(&chain.draws, &state.dataset)?;
    println!("per-study log median ratios (positive vs negative):");
    for e in &effects.studies {
        println!(
            "  {:<8} mean {:>7.3}  95% CrI [{:>7.3}, {:>7.3}]  P(D>0) {:.2}",
            e.study_id, e.mean, e.lower95, e.upper95, e.prob_positive
        );
    }
    println!("average exceedance probability: {:.3}", effects.p_bar);
    if !effects.excluded.is_empty() {
        println!("excluded (no unique pair): {:?}", effects.excluded);
    }

    // pooled predictive for the marker-positive cohorts
    let positives: Vec<usize> = state
        .dataset
        .cohorts
        .iter()
        .enumerate()
        .filter(|(_, c)| c.marker == Marker::Positive)
        .map(|(i, _)| i)
        .collect();
    let curve = predictive_density(&chain.draws, &state.trees, &state.f0, &positives, 200)?;
    let mass: f64 = {
        let dt = curve.t[1] - curve.t[0];
        curve.density.iter().sum::<f64>() * dt
    };
    println!("\npredictive curve over {} bins integrates to {mass:.6}", curve.t.len());
    for q in [0.75, 0.5, 0.25] {
        let at = curve.survival.iter().position(|&s| s <= q).unwrap();
        println!("  survival drops below {q:.2} near t = {:.2}", curve.t[at]);
    }

    // chain quality for one cohort's median trace
    let trace: Vec<f64> = chain.draws.iter().map(|d| d.medians[0]).collect();
    println!(
        "\nESS of the first cohort's median trace: {:.0} of {} draws",
        effective_sample_size(&trace),
        trace.len()
    );
    Ok(())
}
