//! Drive the whole file pipeline through the library, no CLI involved.
//!
//! `simulate` writes a canonical summary CSV plus the hidden truth,
//! `analyze` produces every report file, and `score` joins the chain
//! output back against the truth. The same functions back the `bnpma`
//! binary, so this is also a tour of the output contract.
//!
//! Run with `cargo run --release -p bnpma --example file_pipeline`.

use bnpma::config::AppConfig;
use bnpma::gibbs::Schedule;
use bnpma::runner;
use bnpma::sim::SimConfig;
use std::fs;

fn main() -> bnpma::Result<()> {
    let dir = std::env::temp_dir().join("bnpma_file_pipeline");
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir)?;

    let cfg = AppConfig {
        seed: Some(9),
        schedule: Schedule {
            n_iter: 400,
            burn_in: 200,
            thin: 2,
        },
        sim: SimConfig {
            studies: 4,
            n_per_cohort: 40,
            ..SimConfig::default()
        },
        ..AppConfig::default()
    };

    runner::simulate(&cfg, &dir)?;
    let data = dir.join("sim_data.csv");
    runner::analyze(&data, &cfg, &dir, None)?;
    let report = runner::score(&data, &dir)?;

    println!("pipeline artifacts in {}:", dir.display());
    let mut names: Vec<_> = fs::read_dir(&dir)?
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    for name in names {
        let len = fs::metadata(dir.join(&name))?.len();
        println!("  {name:<28} {len:>7} bytes");
    }
    println!(
        "\nrecovery: correlation {:.3}, relative error {:.3}",
        report.log_pearson, report.mare
    );
    Ok(())
}
