//! Deterministic output writing. Every file has a header row, a fixed
//! column order, and floats printed with 17 significant digits so
//! byte-level comparison across runs is meaningful.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::gibbs::KernelCounters;
use crate::ingest::IngestReport;
use crate::posterior::{EffectSummaries, PosteriorDraw, PredictiveCurve};
use crate::sim::{ScoreReport, SimTruth};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// 17 significant digits, which round-trips every finite f64; the
/// infinities use the same `Inf` token the input format accepts.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x == f64::INFINITY {
        "Inf".into()
    } else if x == f64::NEG_INFINITY {
        "-Inf".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Replace anything outside [A-Za-z0-9_-] so a selector can name a file.
pub fn sanitize_selector(selector: &str) -> String {
    selector
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn write_chain_medians(dir: &Path, ds: &Dataset, draws: &[PosteriorDraw]) -> Result<PathBuf> {
    let path = dir.join("chain_medians.csv");
    let mut w = csv::Writer::from_path(&path)?;
    let mut header = vec!["iteration".to_string()];
    header.extend(ds.cohorts.iter().map(|c| c.cohort_id.clone()));
    w.write_record(&header)?;
    for d in draws {
        let mut rec = vec![d.iteration.to_string()];
        rec.extend(d.medians.iter().map(|&m| fmt_float(m)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(path)
}

/// Study labels per kept iteration, 1-based for readability.
pub fn write_clusters(dir: &Path, ds: &Dataset, draws: &[PosteriorDraw]) -> Result<PathBuf> {
    let path = dir.join("clusters.csv");
    let mut w = csv::Writer::from_path(&path)?;
    let mut header = vec!["iteration".to_string()];
    header.extend(ds.studies.iter().cloned());
    w.write_record(&header)?;
    for d in draws {
        let mut rec = vec![d.iteration.to_string()];
        rec.extend(d.labels.iter().map(|&l| (l + 1).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(path)
}

/// External comparator rows read from a CSV in the forest schema.
#[derive(Clone, Debug)]
pub struct BaselineRow {
    pub study: String,
    pub estimate: f64,
    pub lo95: f64,
    pub hi95: f64,
    pub source: String,
}

pub fn read_baseline(path: &Path) -> Result<Vec<BaselineRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot open baseline {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    let want = ["study", "estimate", "lo95", "hi95", "source"];
    for (i, name) in want.iter().enumerate() {
        if headers.get(i) != Some(*name) {
            return Err(Error::Data(format!(
                "baseline column {} must be {name:?}, found {:?}",
                i + 1,
                headers.get(i).unwrap_or("")
            )));
        }
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record?;
        let num = |i: usize, name: &str| -> Result<f64> {
            r.get(i)
                .unwrap_or("")
                .parse()
                .map_err(|_| Error::Data(format!("baseline {name} not numeric: {:?}", r.get(i))))
        };
        rows.push(BaselineRow {
            study: r.get(0).unwrap_or("").to_string(),
            estimate: num(1, "estimate")?,
            lo95: num(2, "lo95")?,
            hi95: num(3, "hi95")?,
            source: r.get(4).unwrap_or("").to_string(),
        });
    }
    Ok(rows)
}

/// Forest table: one model row and one reported row per paired study,
/// then any baseline rows verbatim. The reported interval for the log
/// median ratio bounds the quotient by crossed CI endpoints.
pub fn write_forest(
    dir: &Path,
    ds: &Dataset,
    effects: &EffectSummaries,
    baseline: &[BaselineRow],
) -> Result<PathBuf> {
    let path = dir.join("forest.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["study", "estimate", "lo95", "hi95", "source"])?;
    let pairs = ds.marker_pairs();
    for eff in &effects.studies {
        w.write_record([
            eff.study_id.as_str(),
            &fmt_float(eff.mean),
            &fmt_float(eff.lower95),
            &fmt_float(eff.upper95),
            "bnpma",
        ])?;
        let s = ds
            .studies
            .iter()
            .position(|id| id == &eff.study_id)
            .expect("effect study exists");
        let &(_, pos, neg) = pairs
            .iter()
            .find(|&&(ps, _, _)| ps == s)
            .expect("paired study");
        let (p, n) = (&ds.cohorts[pos], &ds.cohorts[neg]);
        w.write_record([
            eff.study_id.as_str(),
            &fmt_float((p.median / n.median).ln()),
            &fmt_float((p.lower / n.upper).ln()),
            &fmt_float((p.upper / n.lower).ln()),
            "reported",
        ])?;
    }
    for b in baseline {
        w.write_record([
            b.study.as_str(),
            &fmt_float(b.estimate),
            &fmt_float(b.lo95),
            &fmt_float(b.hi95),
            b.source.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(path)
}

/// One pooled-effect output row.
#[derive(Clone, Debug)]
pub struct EffectRow {
    pub covariate: String,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn write_effects(dir: &Path, rows: &[EffectRow]) -> Result<PathBuf> {
    let path = dir.join("effects.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["covariate", "mean", "lo", "hi"])?;
    for r in rows {
        w.write_record([
            r.covariate.as_str(),
            &fmt_float(r.mean),
            &fmt_float(r.lo),
            &fmt_float(r.hi),
        ])?;
    }
    w.flush()?;
    Ok(path)
}

/// `None` writes a header-only file, the "no data" case.
pub fn write_predictive(
    dir: &Path,
    selector: &str,
    curve: Option<&PredictiveCurve>,
) -> Result<PathBuf> {
    let path = dir.join(format!("predictive_{}.csv", sanitize_selector(selector)));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["t", "density", "survival"])?;
    if let Some(curve) = curve {
        for i in 0..curve.t.len() {
            w.write_record([
                fmt_float(curve.t[i]),
                fmt_float(curve.density[i]),
                fmt_float(curve.survival[i]),
            ])?;
        }
    }
    w.flush()?;
    Ok(path)
}

pub fn write_partition(dir: &Path, ds: &Dataset, labels: &[usize]) -> Result<PathBuf> {
    let path = dir.join("partition.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["study", "cluster"])?;
    for (s, &l) in labels.iter().enumerate() {
        w.write_record([ds.studies[s].as_str(), &(l + 1).to_string()])?;
    }
    w.flush()?;
    Ok(path)
}

/// Run health summary written alongside the chain outputs. Holds no
/// wall-clock timing so reruns with one seed stay byte-identical.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub seed: u64,
    pub workers: usize,
    pub n_draws: usize,
    pub counters: KernelCounters,
    /// Effective sample size of each cohort's median chain.
    pub ess_median: BTreeMap<String, f64>,
    /// Averaged exceedance probability; absent without marker pairs.
    pub p_bar: Option<f64>,
    pub studies_without_pair: Vec<String>,
    /// Cohorts whose unreported upper bound was imputed from the
    /// centering measure.
    pub imputed_upper: Vec<String>,
    pub centering: String,
    pub ingest: IngestReport,
}

pub fn write_diagnostics(dir: &Path, diag: &Diagnostics) -> Result<PathBuf> {
    let path = dir.join("diagnostics.json");
    let text = serde_json::to_string_pretty(diag)
        .map_err(|e| Error::Data(format!("cannot serialize diagnostics: {e}")))?;
    std::fs::write(&path, text + "\n")?;
    Ok(path)
}

pub fn write_metrics(dir: &Path, score: &ScoreReport) -> Result<PathBuf> {
    let path = dir.join("metrics.json");
    let text = serde_json::to_string_pretty(score)
        .map_err(|e| Error::Data(format!("cannot serialize metrics: {e}")))?;
    std::fs::write(&path, text + "\n")?;
    Ok(path)
}

pub fn write_sim_truth(dir: &Path, truth: &[SimTruth]) -> Result<PathBuf> {
    let path = dir.join("sim_truth.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["cohort", "true_median", "group"])?;
    for t in truth {
        w.write_record([
            t.cohort_id.as_str(),
            &fmt_float(t.true_median),
            &t.group.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(path)
}

pub fn read_sim_truth(path: &Path) -> Result<Vec<SimTruth>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot open truth {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("cohort") || headers.get(1) != Some("true_median") {
        return Err(Error::Data(
            "truth file must have columns cohort, true_median, group".into(),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record?;
        rows.push(SimTruth {
            cohort_id: r.get(0).unwrap_or("").to_string(),
            true_median: r
                .get(1)
                .unwrap_or("")
                .parse()
                .map_err(|_| Error::Data("true_median not numeric".into()))?,
            group: r.get(2).unwrap_or("0").parse().unwrap_or(0),
        });
    }
    Ok(rows)
}

/// Kept medians per cohort, reconstructed from `chain_medians.csv` in
/// the dataset's cohort order.
pub fn read_chain_medians(path: &Path, ds: &Dataset) -> Result<Vec<PosteriorDraw>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot open chain {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("iteration") {
        return Err(Error::Data("chain file must start with an iteration column".into()));
    }
    let mut order = Vec::with_capacity(ds.n_cohorts());
    for c in &ds.cohorts {
        let col = headers
            .iter()
            .position(|h| h == c.cohort_id)
            .ok_or_else(|| {
                Error::Data(format!("chain file lacks a column for cohort {:?}", c.cohort_id))
            })?;
        order.push(col);
    }
    let mut draws = Vec::new();
    for record in reader.records() {
        let r = record?;
        let iteration: u64 = r
            .get(0)
            .unwrap_or("")
            .parse()
            .map_err(|_| Error::Data("iteration not an integer".into()))?;
        let mut medians = Vec::with_capacity(order.len());
        for &col in &order {
            let v: f64 = r
                .get(col)
                .unwrap_or("")
                .parse()
                .map_err(|_| Error::Data("median not numeric".into()))?;
            medians.push(v);
        }
        let k = medians.len();
        draws.push(PosteriorDraw {
            iteration,
            cell_masses: Vec::new(),
            medians,
            median_in_tail: vec![false; k],
            labels: Vec::new(),
        });
    }
    if draws.is_empty() {
        return Err(Error::Data("chain file has no draws".into()));
    }
    Ok(draws)
}
