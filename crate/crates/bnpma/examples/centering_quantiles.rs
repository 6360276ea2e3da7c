//! Fit a centering measure to pooled study medians and query it.
//!
//! The centering measure anchors the prior: every cohort's partition
//! tree is refined at its conditional medians, and the prior mean of
//! each random distribution equals it exactly. This example fits both
//! supported families to the same pooled medians and prints quantile
//! round trips plus the conditional medians used to split cells.
//!
//! Run with `cargo run -p bnpma --example centering_quantiles`.

use bnpma::centering::{Centering, CenteringFamily};

fn main() -> bnpma::Result<()> {
    let pooled = [2.9, 4.1, 5.3, 6.8, 7.7, 9.0, 11.4, 14.2];

    for family in [CenteringFamily::Exponential, CenteringFamily::LogNormal] {
        let f0 = Centering::from_pooled_medians(&pooled, family)?;
        println!("{f0:?}");
        println!("  median           {:10.5}", f0.median());
        for p in [0.05, 0.25, 0.5, 0.75, 0.975] {
            let t = f0.quantile(p);
            println!(
                "  quantile({p:5.3}) = {t:10.5}   cdf back {:8.6}",
                f0.cdf(t)
            );
        }
        // the recursive partition splits each cell at the conditional median
        let m = f0.median();
        let lo_half = f0.conditional_median(0.0, m);
        let hi_half = f0.conditional_median(m, f64::INFINITY);
        println!("  conditional medians of the two halves: {lo_half:.5} and {hi_half:.5}");
        println!(
            "  their cell masses: {:.6} {:.6} {:.6} {:.6}",
            f0.cell_mass(0.0, lo_half),
            f0.cell_mass(lo_half, m),
            f0.cell_mass(m, hi_half),
            f0.cell_mass(hi_half, f64::INFINITY),
        );
        // survival stays meaningful far beyond where the cdf saturates
        let deep = f0.quantile_tail(1e-12);
        println!(
            "  t with one-in-a-trillion tail: {deep:.3} (survival {:.3e})",
            f0.survival(deep)
        );
        println!();
    }
    Ok(())
}
