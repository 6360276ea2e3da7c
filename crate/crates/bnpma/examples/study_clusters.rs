//! Recover a point estimate of the study partition from chain labels.
//!
//! Every emitted draw carries the cluster label of each study at the
//! median split. Pairwise co-clustering frequencies summarize them;
//! the point estimate is the visited partition minimizing squared
//! distance to that co-clustering matrix.
//!
//! Run with `cargo run --release -p bnpma --example study_clusters`.

use bnpma::centering::{Centering, CenteringFamily};
use bnpma::data::Dataset;
use bnpma::gibbs::{run_chain, Schedule};
use bnpma::model::{Hyper, ModelState};
use bnpma::posterior::partition_point_estimate;
use bnpma::rng::{stream, STREAM_INIT};
use bnpma::sim::{generate, SimConfig};

fn main() -> bnpma::Result<()> {
    let seed = 3;
    let sim = SimConfig {
        studies: 6,
        n_per_cohort: 60,
        seed,
        ..SimConfig::default()
    };
    let out = generate(&sim)?;
    let medians: Vec<f64> = out.cohorts.iter().map(|c| c.median).collect();
    let f0 = Centering::from_pooled_medians(&medians, CenteringFamily::LogNormal)?;
    let dataset = Dataset::new(out.cohorts, out.covariate_names)?;
    let study_ids = dataset.studies.clone();

    let mut state = ModelState::init(dataset, f0, Hyper::default(), &mut stream(seed, STREAM_INIT))?;
    let sched = Schedule {
        n_iter: 1_200,
        burn_in: 600,
        thin: 2,
    };
    let chain = run_chain(&mut state, &sched, seed, 1)?;

    let s = study_ids.len();
    let mut co = vec![vec![0.0f64; s]; s];
    for d in &chain.draws {
        for a in 0..s {
            for b in 0..s {
                if d.labels[a] == d.labels[b] {
                    co[a][b] += 1.0;
                }
            }
        }
    }
    println!("co-clustering frequencies over {} draws:", chain.draws.len());
    print!("{:<6}", "");
    for id in &study_ids {
        print!("{id:>6}");
    }
    println!();
    for a in 0..s {
        print!("{:<6}", study_ids[a]);
        for b in 0..s {
            print!("{:>6.2}", co[a][b] / chain.draws.len() as f64);
        }
        println!();
    }

    let labels = partition_point_estimate(&chain.draws);
    println!("\nleast-squares partition point estimate:");
    for (id, l) in study_ids.iter().zip(&labels) {
        println!("  {id} -> cluster {}", l + 1);
    }
    Ok(())
}
