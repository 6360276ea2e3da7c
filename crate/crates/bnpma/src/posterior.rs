//! Post-processing of sampler output: per-cohort medians and survival
//! curves, study-level log-median-ratio effects, pooled covariate
//! effects, averaged predictive densities, a clustering point estimate,
//! and effective sample sizes.

use crate::centering::Centering;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::partition::PartitionTree;

/// One emitted state: per-cohort terminal cell masses and their implied
/// medians, plus the root-node study labels.
#[derive(Clone, Debug)]
pub struct PosteriorDraw {
    /// 1-based sweep index the draw was taken at.
    pub iteration: u64,
    /// Per cohort: masses of the 2^depth terminal cells, summing to 1.
    pub cell_masses: Vec<Vec<f64>>,
    /// Per cohort: median implied by the cell masses.
    pub medians: Vec<f64>,
    /// Per cohort: true when the median fell in the unbounded tail cell.
    pub median_in_tail: Vec<bool>,
    /// Per study: cluster label at the root node.
    pub labels: Vec<usize>,
}

/// Median implied by terminal cell masses: linear interpolation inside
/// the cell where cumulative mass crosses one half. A crossing in the
/// unbounded tail cell falls back to the centering measure's
/// conditional median there; the flag reports that case.
pub fn median_from_masses(masses: &[f64], tree: &PartitionTree, f0: &Centering) -> (f64, bool) {
    debug_assert_eq!(masses.len(), tree.n_cells());
    let last = masses.len() - 1;
    let mut cum = 0.0;
    for (t, &mass) in masses.iter().enumerate() {
        let next = cum + mass;
        if next >= 0.5 {
            let (a, b) = tree.cell_bounds(t);
            if t == last {
                return (f0.conditional_median(a, f64::INFINITY), true);
            }
            let frac = (0.5 - cum) / mass;
            return (a + frac * (b - a), false);
        }
        cum = next;
    }
    // unreachable for masses summing to 1; defend against rounding
    let (a, _) = tree.cell_bounds(last);
    (f0.conditional_median(a, f64::INFINITY), true)
}

/// Survival probabilities S(t) = 1 - F(t) at the given times, with F
/// linear inside finite cells and following the centering measure's
/// conditional shape in the unbounded tail cell.
pub fn survival_curve(
    masses: &[f64],
    tree: &PartitionTree,
    f0: &Centering,
    grid: &[f64],
) -> Vec<f64> {
    let n_cells = masses.len();
    let mut cum = Vec::with_capacity(n_cells + 1);
    cum.push(0.0);
    for &m in masses {
        cum.push(cum.last().unwrap() + m);
    }
    let bounds = tree.boundaries();
    grid.iter()
        .map(|&t| {
            if t <= 0.0 {
                return 1.0;
            }
            // first cell whose right edge exceeds t
            let cell = bounds.partition_point(|&b| b <= t);
            let (a, b) = tree.cell_bounds(cell);
            let frac = if cell == n_cells - 1 {
                let sa = f0.survival(a);
                if sa > 0.0 {
                    ((sa - f0.survival(t)) / sa).clamp(0.0, 1.0)
                } else {
                    1.0
                }
            } else {
                ((t - a) / (b - a)).clamp(0.0, 1.0)
            };
            (1.0 - (cum[cell] + frac * masses[cell])).clamp(0.0, 1.0)
        })
        .collect()
}

/// Posterior draws and summaries of one study's log median ratio
/// between its marker-positive and marker-negative cohorts.
#[derive(Clone, Debug)]
pub struct StudyEffect {
    pub study_id: String,
    pub draws: Vec<f64>,
    pub mean: f64,
    pub lower95: f64,
    pub upper95: f64,
    /// P(D > 0 | data); exact zeros count one half.
    pub prob_positive: f64,
}

/// Study effects plus the exceedance probability averaged over studies.
#[derive(Clone, Debug)]
pub struct EffectSummaries {
    pub studies: Vec<StudyEffect>,
    pub p_bar: f64,
    /// Studies skipped for lack of a unique marker pair.
    pub excluded: Vec<String>,
}

/// Per-study D = log median(positive) - log median(negative), one draw
/// per emitted state, for studies with exactly one cohort of each
/// marker; other studies are listed as excluded.
pub fn effect_summaries(draws: &[PosteriorDraw], dataset: &Dataset) -> Result<EffectSummaries> {
    if draws.is_empty() {
        return Err(Error::InvalidParameter(
            "effect summaries need at least one posterior draw".into(),
        ));
    }
    let pairs = dataset.marker_pairs();
    let paired: std::collections::BTreeSet<usize> = pairs.iter().map(|&(s, _, _)| s).collect();
    let excluded: Vec<String> = (0..dataset.n_studies())
        .filter(|s| !paired.contains(s))
        .map(|s| dataset.studies[s].clone())
        .collect();
    if pairs.is_empty() {
        return Err(Error::Data(
            "no study has a marker-positive and marker-negative cohort pair".into(),
        ));
    }
    let mut studies = Vec::with_capacity(pairs.len());
    let mut p_bar = 0.0;
    for &(s, pos, neg) in &pairs {
        let d: Vec<f64> = draws
            .iter()
            .map(|dr| dr.medians[pos].ln() - dr.medians[neg].ln())
            .collect();
        let eff = summarize_effect(dataset.studies[s].clone(), d);
        p_bar += eff.prob_positive;
        studies.push(eff);
    }
    p_bar /= studies.len() as f64;
    Ok(EffectSummaries {
        studies,
        p_bar,
        excluded,
    })
}

fn summarize_effect(study_id: String, draws: Vec<f64>) -> StudyEffect {
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let mut sorted = draws.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lower95 = quantile(&sorted, 0.025);
    let upper95 = quantile(&sorted, 0.975);
    let above: f64 = draws
        .iter()
        .map(|&d| {
            if d > 0.0 {
                1.0
            } else if d == 0.0 {
                0.5
            } else {
                0.0
            }
        })
        .sum();
    StudyEffect {
        study_id,
        draws,
        mean,
        lower95,
        upper95,
        prob_positive: above / n,
    }
}

/// Linear-interpolation quantile of an ascending-sorted sample.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Effect draws pooled across the studies whose covariates match every
/// (column index, value) constraint.
#[derive(Clone, Debug)]
pub struct PooledEffect {
    pub n_studies: usize,
    pub draws: Vec<f64>,
    pub mean: f64,
    pub lower95: f64,
    pub upper95: f64,
}

/// Pool per-study effect draws over studies matching all constraints;
/// `None` when no paired study qualifies. A study qualifies when every
/// one of its cohorts carries the requested value.
pub fn covariate_effect(
    summaries: &EffectSummaries,
    dataset: &Dataset,
    constraints: &[(usize, f64)],
) -> Option<PooledEffect> {
    let mut draws = Vec::new();
    let mut n_studies = 0usize;
    for eff in &summaries.studies {
        let s = dataset
            .studies
            .iter()
            .position(|id| id == &eff.study_id)
            .expect("effect study present in dataset");
        let ok = dataset.cohorts_of[s].iter().all(|&i| {
            constraints
                .iter()
                .all(|&(col, v)| (dataset.cohorts[i].covariates[col] - v).abs() < 1e-9)
        });
        if ok {
            n_studies += 1;
            draws.extend_from_slice(&eff.draws);
        }
    }
    if draws.is_empty() {
        return None;
    }
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let mut sorted = draws.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(PooledEffect {
        n_studies,
        draws,
        mean,
        lower95: quantile(&sorted, 0.025),
        upper95: quantile(&sorted, 0.975),
    })
}

/// Averaged predictive curves on a shared grid of bin midpoints.
#[derive(Clone, Debug)]
pub struct PredictiveCurve {
    pub t: Vec<f64>,
    pub density: Vec<f64>,
    pub survival: Vec<f64>,
}

/// Average the cell-mass histograms of the selected cohorts over all
/// draws onto a common uniform grid. Finite cells spread mass
/// uniformly; the unbounded tail follows the centering measure's
/// conditional shape, and the grid extends far enough that the
/// truncated mass is below 1e-9.
pub fn predictive_density(
    draws: &[PosteriorDraw],
    trees: &[PartitionTree],
    f0: &Centering,
    selection: &[usize],
    bins: usize,
) -> Result<PredictiveCurve> {
    if selection.is_empty() {
        return Err(Error::Data("predictive selection matched no cohort".into()));
    }
    if draws.is_empty() {
        return Err(Error::InvalidParameter(
            "predictive density needs at least one posterior draw".into(),
        ));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "predictive grid needs at least 2 bins, got {bins}"
        )));
    }
    let mut a_max = 0.0f64;
    for &i in selection {
        let last = trees[i].n_cells() - 1;
        a_max = a_max.max(trees[i].cell_bounds(last).0);
    }
    // far enough out that every selected tail cell keeps under 1e-9 of
    // its mass beyond the grid
    let t_hi = f0.quantile_tail(1e-9 * f0.survival(a_max));
    let width = t_hi / bins as f64;

    let mut mass = vec![0.0f64; bins];
    for draw in draws {
        for &i in selection {
            let tree = &trees[i];
            let cells = &draw.cell_masses[i];
            let n_cells = cells.len();
            for (c, &cm) in cells.iter().enumerate() {
                if cm == 0.0 {
                    continue;
                }
                let (a, b) = tree.cell_bounds(c);
                let tail = c == n_cells - 1;
                let lo_bin = ((a / width).floor() as usize).min(bins - 1);
                let hi_bin = if tail {
                    bins - 1
                } else {
                    ((b / width).ceil() as usize).min(bins).saturating_sub(1)
                };
                if tail {
                    let denom = f0.survival(a);
                    for bin in lo_bin..=hi_bin {
                        let u = (bin as f64 * width).max(a);
                        let v = (bin + 1) as f64 * width;
                        if v <= u || denom <= 0.0 {
                            continue;
                        }
                        mass[bin] += cm * (f0.survival(u) - f0.survival(v)) / denom;
                    }
                } else {
                    let inv_len = 1.0 / (b - a);
                    for bin in lo_bin..=hi_bin {
                        let u = (bin as f64 * width).max(a);
                        let v = ((bin + 1) as f64 * width).min(b);
                        if v <= u {
                            continue;
                        }
                        mass[bin] += cm * (v - u) * inv_len;
                    }
                }
            }
        }
    }
    let scale = 1.0 / (draws.len() * selection.len()) as f64;
    for m in &mut mass {
        *m *= scale;
    }

    let mut t = Vec::with_capacity(bins);
    let mut density = Vec::with_capacity(bins);
    let mut survival = Vec::with_capacity(bins);
    let mut cum = 0.0;
    for (bin, &m) in mass.iter().enumerate() {
        t.push((bin as f64 + 0.5) * width);
        density.push(m / width);
        survival.push((1.0 - (cum + 0.5 * m)).clamp(0.0, 1.0));
        cum += m;
    }
    Ok(PredictiveCurve {
        t,
        density,
        survival,
    })
}

/// Least-squares clustering point estimate: among visited partitions,
/// pick the one closest to the posterior co-clustering frequencies;
/// labels are renumbered by first appearance.
pub fn partition_point_estimate(draws: &[PosteriorDraw]) -> Vec<usize> {
    assert!(!draws.is_empty());
    let s_count = draws[0].labels.len();
    let mut assoc = vec![0.0f64; s_count * s_count];
    for d in draws {
        for a in 0..s_count {
            for b in (a + 1)..s_count {
                if d.labels[a] == d.labels[b] {
                    assoc[a * s_count + b] += 1.0;
                }
            }
        }
    }
    let inv = 1.0 / draws.len() as f64;
    for v in &mut assoc {
        *v *= inv;
    }

    let mut best = 0usize;
    let mut best_loss = f64::INFINITY;
    for (idx, d) in draws.iter().enumerate() {
        let loss = partition_loss(&d.labels, &assoc, s_count);
        if loss < best_loss {
            best_loss = loss;
            best = idx;
        }
    }
    canonical_labels(&draws[best].labels)
}

/// Squared distance between a partition's co-clustering indicators and
/// the posterior co-clustering frequencies.
pub fn partition_loss(labels: &[usize], assoc: &[f64], s_count: usize) -> f64 {
    let mut loss = 0.0;
    for a in 0..s_count {
        for b in (a + 1)..s_count {
            let same = if labels[a] == labels[b] { 1.0 } else { 0.0 };
            let diff = same - assoc[a * s_count + b];
            loss += diff * diff;
        }
    }
    loss
}

/// Renumber labels by order of first appearance, starting at 0.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    labels
        .iter()
        .map(|&l| {
            if let Some(&(_, new)) = map.iter().find(|&&(old, _)| old == l) {
                new
            } else {
                let new = map.len();
                map.push((l, new));
                new
            }
        })
        .collect()
}

/// Effective sample size via the initial-positive-sequence rule on
/// paired autocovariances. Returns the chain length for constant
/// chains.
pub fn effective_sample_size(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 {
        return n as f64;
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let gamma = |lag: usize| -> f64 {
        let mut s = 0.0;
        for t in 0..n - lag {
            s += (x[t] - mean) * (x[t + lag] - mean);
        }
        s / nf
    };
    let g0 = gamma(0);
    if g0 <= 0.0 {
        return nf;
    }
    let mut tau = 1.0;
    let mut k = 0usize;
    loop {
        let lag = 2 * k + 1;
        if lag + 1 >= n / 2 {
            break;
        }
        let pair = gamma(lag) + gamma(lag + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair / g0;
        k += 1;
    }
    (nf / tau).clamp(1.0, nf)
}
