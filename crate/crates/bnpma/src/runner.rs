//! Command orchestration: analyze (ingest, fit, post-process, write),
//! simulate (generate and write), and score (compare chain output to
//! simulation truth). All file writes happen here, on the main thread.

use crate::centering::Centering;
use crate::config::{AppConfig, CenteringChoice};
use crate::data::{Dataset, Marker};
use crate::error::{Error, Result};
use crate::gibbs::run_chain;
use crate::ingest::{ingest, write_canonical, IngestReport};
use crate::model::ModelState;
use crate::posterior::{
    covariate_effect, effect_summaries, effective_sample_size, partition_point_estimate,
    predictive_density, EffectSummaries,
};
use crate::report;
use crate::rng::{stream, STREAM_INIT};
use crate::sim::{generate, score_recovery, ScoreReport};
use std::collections::BTreeMap;
use std::path::Path;

/// Fit the centering measure: explicit parameters pass through, the
/// auto choice fits the configured family to the pooled reported
/// medians.
pub fn resolve_centering(choice: &CenteringChoice, ds: &Dataset) -> Result<Centering> {
    match choice {
        CenteringChoice::Auto(family) => {
            let medians: Vec<f64> = ds.cohorts.iter().map(|c| c.median).collect();
            Centering::from_pooled_medians(&medians, *family)
        }
        CenteringChoice::Exponential { rate } => Centering::exponential(*rate),
        CenteringChoice::LogNormal { mu, sigma } => Centering::log_normal(*mu, *sigma),
    }
}

/// Cohort filter parsed from a selector like `marker=positive,x2=1`.
struct Selector {
    marker: Option<Marker>,
    constraints: Vec<(usize, f64)>,
}

fn parse_selector(text: &str, ds: &Dataset) -> Result<Selector> {
    let mut marker = None;
    let mut constraints = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::Config(format!("selector clause {part:?} is not key=value"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if key == "marker" {
            marker = Some(Marker::parse(value)?);
        } else {
            let col = ds
                .covariate_names
                .iter()
                .position(|n| n == key)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "selector names unknown covariate {key:?}; have {:?}",
                        ds.covariate_names
                    ))
                })?;
            let v: f64 = value
                .parse()
                .map_err(|_| Error::Config(format!("selector value {value:?} is not numeric")))?;
            constraints.push((col, v));
        }
    }
    Ok(Selector { marker, constraints })
}

fn select_cohorts(ds: &Dataset, sel: &Selector) -> Vec<usize> {
    (0..ds.n_cohorts())
        .filter(|&i| {
            let c = &ds.cohorts[i];
            if let Some(m) = sel.marker {
                if c.marker != m {
                    return false;
                }
            }
            sel.constraints
                .iter()
                .all(|&(col, v)| (c.covariates[col] - v).abs() < 1e-9)
        })
        .collect()
}

/// Pooled-effect table: one overall row, then one row per observed
/// value of each covariate with few distinct values. Continuous
/// covariates are skipped because pooling on exact equality would be
/// meaningless for them.
fn effect_rows(effects: &EffectSummaries, ds: &Dataset) -> Vec<report::EffectRow> {
    const MAX_LEVELS: usize = 12;
    let mut rows = Vec::new();
    if let Some(all) = covariate_effect(effects, ds, &[]) {
        rows.push(report::EffectRow {
            covariate: "overall".into(),
            mean: all.mean,
            lo: all.lower95,
            hi: all.upper95,
        });
    }
    for (col, name) in ds.covariate_names.iter().enumerate() {
        let mut values: Vec<f64> = Vec::new();
        for c in &ds.cohorts {
            let v = c.covariates[col];
            if !values.iter().any(|&u| (u - v).abs() < 1e-9) {
                values.push(v);
            }
            if values.len() > MAX_LEVELS {
                break;
            }
        }
        if values.len() > MAX_LEVELS {
            log::info!("covariate {name:?} looks continuous; no pooled rows written");
            continue;
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for v in values {
            if let Some(pool) = covariate_effect(effects, ds, &[(col, v)]) {
                rows.push(report::EffectRow {
                    covariate: format!("{name}={v}"),
                    mean: pool.mean,
                    lo: pool.lower95,
                    hi: pool.upper95,
                });
            }
        }
    }
    rows
}

/// Full analysis: ingest, fit, post-process, and write every output
/// file into `out_dir`.
pub fn analyze(
    data: &Path,
    cfg: &AppConfig,
    out_dir: &Path,
    baseline: Option<&Path>,
) -> Result<()> {
    let seed = cfg.seed.ok_or_else(|| {
        Error::Usage("analyze needs a seed; pass --seed or set seed in the config".into())
    })?;
    std::fs::create_dir_all(out_dir)?;
    let baseline_rows = match baseline {
        Some(p) => report::read_baseline(p)?,
        None => Vec::new(),
    };

    let started = std::time::Instant::now();
    let (dataset, ingest_report) = ingest(data)?;
    log::info!(
        "ingested {} cohorts in {} studies ({} rejected rows)",
        dataset.n_cohorts(),
        dataset.n_studies(),
        ingest_report.rejected.len()
    );
    let f0 = resolve_centering(&cfg.centering, &dataset)?;
    let mut state = ModelState::init(
        dataset,
        f0,
        cfg.hyper.clone(),
        &mut stream(seed, STREAM_INIT),
    )?;
    let chain = run_chain(&mut state, &cfg.schedule, seed, cfg.workers)?;
    log::info!(
        "chain finished: {} kept draws in {:.1}s",
        chain.draws.len(),
        started.elapsed().as_secs_f64()
    );
    let ds = &state.dataset;

    report::write_chain_medians(out_dir, ds, &chain.draws)?;
    report::write_clusters(out_dir, ds, &chain.draws)?;
    report::write_partition(out_dir, ds, &partition_point_estimate(&chain.draws))?;

    let effects = match effect_summaries(&chain.draws, ds) {
        Ok(e) => Some(e),
        Err(Error::Data(msg)) => {
            log::warn!("no study effects: {msg}");
            None
        }
        Err(e) => return Err(e),
    };
    let empty = EffectSummaries {
        studies: Vec::new(),
        p_bar: f64::NAN,
        excluded: ds.studies.clone(),
    };
    let eff_ref = effects.as_ref().unwrap_or(&empty);
    report::write_forest(out_dir, ds, eff_ref, &baseline_rows)?;
    report::write_effects(out_dir, &effect_rows(eff_ref, ds))?;

    for selector in &cfg.output.predictive {
        let sel = parse_selector(selector, ds)?;
        let chosen = select_cohorts(ds, &sel);
        if chosen.is_empty() {
            log::warn!("selector {selector:?} matched no cohort; writing no data");
            report::write_predictive(out_dir, selector, None)?;
        } else {
            let curve =
                predictive_density(&chain.draws, &state.trees, &state.f0, &chosen, cfg.output.bins)?;
            report::write_predictive(out_dir, selector, Some(&curve))?;
        }
    }

    let mut ess_median = BTreeMap::new();
    for (i, c) in ds.cohorts.iter().enumerate() {
        let series: Vec<f64> = chain.draws.iter().map(|d| d.medians[i]).collect();
        ess_median.insert(c.cohort_id.clone(), effective_sample_size(&series));
    }
    let imputed_upper: Vec<String> = state
        .trees
        .iter()
        .zip(ds.cohorts.iter())
        .filter(|(t, _)| t.imputed_upper())
        .map(|(_, c)| c.cohort_id.clone())
        .collect();
    let diag = report::Diagnostics {
        seed,
        workers: cfg.workers,
        n_draws: chain.draws.len(),
        counters: chain.counters,
        ess_median,
        p_bar: effects.as_ref().map(|e| e.p_bar),
        studies_without_pair: eff_ref.excluded.clone(),
        imputed_upper,
        centering: format!("{:?}", state.f0),
        ingest: ingest_report,
    };
    report::write_diagnostics(out_dir, &diag)?;
    log::info!("outputs written to {}", out_dir.display());
    Ok(())
}

/// Generate a synthetic dataset and its truth table.
pub fn simulate(cfg: &AppConfig, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let mut sim_cfg = cfg.sim.clone();
    if let Some(seed) = cfg.seed {
        sim_cfg.seed = seed;
    }
    let out = generate(&sim_cfg)?;
    let dataset = Dataset::new(out.cohorts, out.covariate_names)?;
    write_canonical(&out_dir.join("sim_data.csv"), &dataset)?;
    report::write_sim_truth(out_dir, &out.truth)?;
    log::info!(
        "simulated {} cohorts in {} studies into {}",
        dataset.n_cohorts(),
        dataset.n_studies(),
        out_dir.display()
    );
    Ok(())
}

/// Score a finished analysis in `out_dir` against `sim_truth.csv`
/// there; writes `metrics.json` next to the inputs and returns it.
pub fn score(data: &Path, out_dir: &Path) -> Result<ScoreReport> {
    let (dataset, _) = ingest(data)?;
    let draws = report::read_chain_medians(&out_dir.join("chain_medians.csv"), &dataset)?;
    let truth = report::read_sim_truth(&out_dir.join("sim_truth.csv"))?;
    let score = score_recovery(&draws, &dataset, &truth)?;
    report::write_metrics(out_dir, &score)?;
    Ok(score)
}

/// Ingest without analysis, for callers that only need the report.
pub fn ingest_only(data: &Path) -> Result<(Dataset, IngestReport)> {
    ingest(data)
}
