//! Draw Polya-Gamma variables and check them against analytic moments.
//!
//! PG(b, c) latents make the logistic-binomial likelihood conditionally
//! Gaussian, which is what lets the sampler use ordinary linear-model
//! conjugacy. The exact PG(1, c) sampler here is the alternating-series
//! method; `PgSampler` optionally switches to a moment-matched gamma
//! approximation for large shape counts.
//!
//! Run with `cargo run -p bnpma --example polya_gamma_moments`.

use bnpma::polya_gamma::{self, PgSampler};
use bnpma::rng::stream;

fn main() {
    let mut rng = stream(7, 1);
    let pg = PgSampler::exact();
    let reps = 50_000usize;

    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12}",
        "c", "mean", "analytic", "var", "analytic"
    );
    for c in [0.0, 0.5, 1.0, 2.5, 5.0] {
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..reps {
            let w = pg.draw(1, c, &mut rng);
            sum += w;
            sum2 += w * w;
        }
        let mean = sum / reps as f64;
        let var = sum2 / reps as f64 - mean * mean;
        println!(
            "{c:>5.1} {mean:>12.6} {:>12.6} {var:>12.6} {:>12.6}",
            polya_gamma::mean(1.0, c),
            polya_gamma::variance(1.0, c)
        );
    }

    // tilting shrinks the draws: a PG(1, c) variable concentrates near
    // tanh(c/2)/(2c) as |c| grows
    let mut rng = stream(7, 2);
    let big: f64 = (0..reps).map(|_| pg.draw(1, 50.0, &mut rng)).sum::<f64>() / reps as f64;
    println!("\nmean at c = 50: {big:.6} (analytic {:.6})", polya_gamma::mean(1.0, 50.0));
}
