//! Model state for the hierarchical survival mixture.
//!
//! Each cohort's reported interval induces a binary partition of time
//! (see [`crate::partition`]). The probability mass a cohort assigns to
//! the two children of a node is governed by a logistic regression with
//! a Dirichlet-process mixture prior over study-level coefficients.
//! Three nodes carry data: the root (mass below the median), the lower
//! child (mass below the reported lower bound given below-median) and
//! the upper child (mass below the reported upper bound given
//! above-median). The three are conditionally independent given the
//! partition, so each gets its own mixture.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};

use crate::centering::Centering;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::logistic::{logit, sigmoid};
use crate::partition::{build_tree, derive_counts, PartitionTree};
use crate::quadrature::GaussHermite;

/// The three data-bearing partition nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// Root: mass below the reported median.
    Median,
    /// Below the lower CI bound, conditional on below-median.
    Lower,
    /// Below the upper CI bound, conditional on above-median.
    Upper,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Median, Split::Lower, Split::Upper];

    /// Tree depth of the node (root is 1).
    pub fn level(self) -> u32 {
        match self {
            Split::Median => 1,
            Split::Lower | Split::Upper => 2,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Split::Median => 0,
            Split::Lower => 1,
            Split::Upper => 2,
        }
    }
}

/// Prior and truncation settings.
#[derive(Clone, Debug)]
pub struct Hyper {
    /// DP concentration.
    pub alpha: f64,
    /// Scale c in the atom variance c * 2^level.
    pub c_scale: f64,
    /// Inverse-gamma shape for the study-effect variance.
    pub ig_shape: f64,
    /// Inverse-gamma rate for the study-effect variance.
    pub ig_rate: f64,
    /// Truncation level H; None picks min(25, studies + 5).
    pub h_trunc: Option<usize>,
    /// Partition depth M (2^M terminal cells).
    pub depth: usize,
    /// Replace exact Polya-Gamma draws with moment-matched normals
    /// for large counts. Off by default; changes output streams.
    pub pg_approx: bool,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            alpha: 1.0,
            c_scale: 2.0,
            ig_shape: 3.0,
            ig_rate: 2.0,
            h_trunc: None,
            depth: 12,
            pg_approx: false,
        }
    }
}

impl Hyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "concentration alpha must be positive and finite, got {}",
                self.alpha
            )));
        }
        if !(self.c_scale > 0.0) || !self.c_scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "atom variance scale must be positive and finite, got {}",
                self.c_scale
            )));
        }
        // shape > 1 so the study-effect variance has a finite prior mean,
        // which the intercept calibration depends on
        if !(self.ig_shape > 1.0) || !(self.ig_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "inverse-gamma prior needs shape > 1 and rate > 0, got ({}, {})",
                self.ig_shape, self.ig_rate
            )));
        }
        if let Some(h) = self.h_trunc {
            if h == 0 {
                return Err(Error::InvalidParameter(
                    "truncation level must be at least 1".into(),
                ));
            }
        }
        if !(2..=24).contains(&self.depth) {
            return Err(Error::InvalidParameter(format!(
                "partition depth must lie in 2..=24, got {}",
                self.depth
            )));
        }
        Ok(())
    }

    /// Prior mean of the study-effect variance.
    pub fn psi_prior_mean(&self) -> f64 {
        self.ig_rate / (self.ig_shape - 1.0)
    }

    /// Atom variance at a given node level.
    pub fn atom_variance(&self, level: u32) -> f64 {
        self.c_scale * f64::powi(2.0, level as i32)
    }

    pub fn resolve_h(&self, n_studies: usize) -> usize {
        self.h_trunc.unwrap_or_else(|| 25.min(n_studies + 5))
    }
}

/// Immutable per-node regression data: one row per cohort.
#[derive(Clone, Debug)]
pub struct SplitData {
    pub split: Split,
    /// Atom prior variance at this node's level.
    pub sigma2: f64,
    /// (successes, trials) per cohort at this node.
    pub obs: Vec<(u32, u32)>,
    /// Calibrated fixed intercepts, one per cohort.
    pub offsets: Vec<f64>,
    /// Centering probability each offset was calibrated to.
    pub targets: Vec<f64>,
}

/// Mutable mixture state for one node.
#[derive(Clone, Debug)]
pub struct ClusterState {
    /// Regression atoms, H vectors of length p (p may be zero).
    pub atoms: Vec<DVector<f64>>,
    /// Stick proportions v_1..v_H, last pinned to 1.
    pub sticks: Vec<f64>,
    /// Mixture weights derived from the sticks.
    pub weights: Vec<f64>,
    /// Cluster label per study.
    pub labels: Vec<usize>,
    /// Random intercept per cohort.
    pub z: Vec<f64>,
    /// Variance of the cohort intercepts.
    pub psi: f64,
    /// Polya-Gamma latents, one per cohort (unused slots stay 0).
    pub omega: Vec<f64>,
}

/// Full sampler state: data, partitions and the three node mixtures.
pub struct ModelState {
    pub dataset: Dataset,
    pub f0: Centering,
    pub hyper: Hyper,
    pub h_trunc: usize,
    pub trees: Vec<PartitionTree>,
    pub splits: [SplitData; 3],
    pub clusters: [ClusterState; 3],
    gh: GaussHermite,
}

/// Solve E[sigmoid(c + total_sd * Z)] = target for c, Z standard normal.
///
/// The expectation is strictly increasing in c, so bisection converges;
/// iteration stops once the expectation matches within 1e-10 or the
/// bracket collapses.
pub fn calibrate_intercept(target: f64, total_sd: f64, gh: &GaussHermite) -> f64 {
    assert!(target > 0.0 && target < 1.0, "target must be interior");
    assert!(total_sd > 0.0 && total_sd.is_finite());
    let expect = |c: f64| crate::quadrature::sigmoid_normal_mean(c, total_sd, gh);
    let mut lo = logit(target) - 1.0;
    let mut hi = logit(target) + 1.0;
    let mut grow = 1.0;
    while expect(lo) > target {
        grow *= 2.0;
        lo -= grow;
    }
    grow = 1.0;
    while expect(hi) < target {
        grow *= 2.0;
        hi += grow;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let val = expect(mid);
        if (val - target).abs() <= 1e-10 {
            return mid;
        }
        if val < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * (1.0 + mid.abs()) {
            return mid;
        }
    }
    0.5 * (lo + hi)
}

impl ModelState {
    /// Build partitions, derive node counts, calibrate intercepts and
    /// draw the initial mixture states from their priors.
    ///
    /// Draw order per node: atoms (ascending), sticks, psi, study
    /// intercepts, labels, then Polya-Gamma latents; the three nodes are
    /// initialized in `Split::ALL` order off the single `rng`.
    pub fn init(
        dataset: Dataset,
        f0: Centering,
        hyper: Hyper,
        rng: &mut impl Rng,
    ) -> Result<ModelState> {
        hyper.validate()?;
        let gh = GaussHermite::new(64);
        let n_cohorts = dataset.n_cohorts();
        let mut trees = Vec::with_capacity(n_cohorts);
        for c in &dataset.cohorts {
            trees.push(build_tree(c, &f0, hyper.depth)?);
        }

        let h_trunc = hyper.resolve_h(dataset.n_studies());
        let psi_mean = hyper.psi_prior_mean();

        let mut splits: Vec<SplitData> = Vec::with_capacity(3);
        for split in Split::ALL {
            let sigma2 = hyper.atom_variance(split.level());
            let mut obs = Vec::with_capacity(n_cohorts);
            let mut offsets = Vec::with_capacity(n_cohorts);
            let mut targets = Vec::with_capacity(n_cohorts);
            for (i, c) in dataset.cohorts.iter().enumerate() {
                let counts = derive_counts(c)?;
                let (pair, target) = match split {
                    Split::Median => ((counts.n0, counts.n), f0.cdf(c.median)),
                    Split::Lower => ((counts.n00, counts.n0), f0.cdf(c.lower) / f0.cdf(c.median)),
                    Split::Upper => {
                        let fm = f0.cdf(c.median);
                        // cut point is the reported upper bound, or the
                        // imputed one when the interval is unbounded
                        let cut = trees[i].quartile_cuts().2;
                        ((counts.n10, counts.n1), (f0.cdf(cut) - fm) / (1.0 - fm))
                    }
                };
                let norm2: f64 = c.covariates.iter().map(|x| x * x).sum();
                let total_sd = (sigma2 * norm2 + psi_mean).sqrt();
                obs.push(pair);
                offsets.push(calibrate_intercept(target, total_sd, &gh));
                targets.push(target);
            }
            splits.push(SplitData {
                split,
                sigma2,
                obs,
                offsets,
                targets,
            });
        }
        let splits: [SplitData; 3] = splits.try_into().expect("three splits");

        let mut state = ModelState {
            dataset,
            f0,
            hyper,
            h_trunc,
            trees,
            splits,
            clusters: [
                ClusterState::empty(),
                ClusterState::empty(),
                ClusterState::empty(),
            ],
            gh,
        };
        for split in Split::ALL {
            state.clusters[split.index()] = state.draw_prior_cluster(split, rng);
        }
        Ok(state)
    }

    pub fn quadrature(&self) -> &GaussHermite {
        &self.gh
    }

    /// Replace all three node mixtures with fresh prior draws.
    pub fn redraw_prior(&mut self, rng: &mut impl Rng) {
        for split in Split::ALL {
            self.clusters[split.index()] = self.draw_prior_cluster(split, rng);
        }
    }

    /// Sample one node's mixture state from its prior.
    fn draw_prior_cluster(&self, split: Split, rng: &mut impl Rng) -> ClusterState {
        let sd = &self.splits[split.index()];
        let s_count = self.dataset.n_studies();
        let p = self.dataset.n_covariates();
        let h = self.h_trunc;
        let atom_sd = sd.sigma2.sqrt();

        let atoms: Vec<DVector<f64>> = (0..h)
            .map(|_| DVector::from_fn(p, |_, _| atom_sd * rng.sample::<f64, _>(StandardNormal)))
            .collect();

        let mut sticks = vec![1.0; h];
        if h > 1 {
            let beta = Beta::new(1.0, self.hyper.alpha).expect("valid stick prior");
            for v in sticks.iter_mut().take(h - 1) {
                *v = beta.sample(rng);
            }
        }
        let weights = stick_weights(&sticks);

        let gamma = Gamma::new(self.hyper.ig_shape, 1.0).expect("valid prior shape");
        let psi = self.hyper.ig_rate / gamma.sample(rng);

        let z_sd = psi.sqrt();
        let z: Vec<f64> = (0..self.dataset.n_cohorts())
            .map(|_| z_sd * rng.sample::<f64, _>(StandardNormal))
            .collect();

        let labels: Vec<usize> = (0..s_count)
            .map(|_| sample_categorical(&weights, rng))
            .collect();

        let mut cs = ClusterState {
            atoms,
            sticks,
            weights,
            labels,
            z,
            psi,
            omega: vec![0.0; self.dataset.n_cohorts()],
        };
        let pg = crate::polya_gamma::PgSampler::exact();
        for (i, &(_, trials)) in sd.obs.iter().enumerate() {
            let eta = self.linear_predictor_with(sd, &cs, i);
            cs.omega[i] = pg.draw(trials, eta, rng);
        }
        cs
    }

    /// eta = offset + x'b_{label} + z_{cohort} for one cohort at one node.
    pub fn linear_predictor(&self, split: Split, cohort: usize) -> f64 {
        let sd = &self.splits[split.index()];
        let cs = &self.clusters[split.index()];
        self.linear_predictor_with(sd, cs, cohort)
    }

    fn linear_predictor_with(&self, sd: &SplitData, cs: &ClusterState, cohort: usize) -> f64 {
        let s = self.dataset.study_of[cohort];
        let atom = &cs.atoms[cs.labels[s]];
        let x = &self.dataset.cohorts[cohort].covariates;
        let mut eta = sd.offsets[cohort] + cs.z[cohort];
        for (xq, bq) in x.iter().zip(atom.iter()) {
            eta += xq * bq;
        }
        eta
    }

    /// Branch probability sigmoid(eta) for one cohort at one node.
    pub fn branch_prob(&self, split: Split, cohort: usize) -> f64 {
        sigmoid(self.linear_predictor(split, cohort))
    }

    /// Terminal cell masses for one cohort given the current state.
    ///
    /// Levels 1 and 2 use the node mixtures; deeper levels draw fresh
    /// symmetric Beta(c 2^level, c 2^level) proportions from `rng`, one
    /// per internal node in ascending cell order. The result has
    /// 2^depth entries summing to 1 up to rounding.
    pub fn cell_masses(&self, cohort: usize, rng: &mut impl Rng) -> Vec<f64> {
        let y1 = self.branch_prob(Split::Median, cohort);
        let y00 = self.branch_prob(Split::Lower, cohort);
        let y10 = self.branch_prob(Split::Upper, cohort);
        let mut masses = vec![
            y1 * y00,
            y1 * (1.0 - y00),
            (1.0 - y1) * y10,
            (1.0 - y1) * (1.0 - y10),
        ];
        for level in 3..=self.hyper.depth as u32 {
            let a = self.hyper.c_scale * f64::powi(2.0, level as i32);
            let beta = Beta::new(a, a).expect("valid deep beta");
            let mut next = Vec::with_capacity(masses.len() * 2);
            for &m in &masses {
                let y: f64 = beta.sample(rng);
                next.push(m * y);
                next.push(m * (1.0 - y));
            }
            masses = next;
        }
        masses
    }
}

impl ClusterState {
    fn empty() -> ClusterState {
        ClusterState {
            atoms: Vec::new(),
            sticks: Vec::new(),
            weights: Vec::new(),
            labels: Vec::new(),
            z: Vec::new(),
            psi: 1.0,
            omega: Vec::new(),
        }
    }
}

/// Truncated stick-breaking: w_h = v_h * prod_{l<h} (1 - v_l).
pub fn stick_weights(sticks: &[f64]) -> Vec<f64> {
    let mut weights = Vec::with_capacity(sticks.len());
    let mut remaining = 1.0;
    for &v in sticks {
        weights.push(v * remaining);
        remaining *= 1.0 - v;
    }
    weights
}

/// Inverse-CDF draw from an unnormalized weight vector.
pub fn sample_categorical(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (h, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return h;
        }
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{CohortSummary, Marker};
    use crate::rng::{stream, STREAM_INIT};

    fn cohort(id: &str, study: &str, marker: Marker, x: Vec<f64>) -> CohortSummary {
        CohortSummary {
            cohort_id: id.into(),
            study_id: study.into(),
            marker,
            lower: 2.0,
            median: 4.0,
            upper: 9.0,
            n: 50,
            conf_level: 0.95,
            covariates: x,
        }
    }

    fn toy_dataset() -> Dataset {
        let names = vec!["x1".to_string()];
        Dataset::new(
            vec![
                cohort("a_pos", "a", Marker::Positive, vec![1.0]),
                cohort("a_neg", "a", Marker::Negative, vec![0.0]),
                cohort("b_pos", "b", Marker::Positive, vec![2.0]),
            ],
            names,
        )
        .unwrap()
    }

    fn toy_state(seed: u64) -> ModelState {
        let ds = toy_dataset();
        let f0 = Centering::exponential(std::f64::consts::LN_2 / 4.0).unwrap();
        let mut rng = stream(seed, STREAM_INIT);
        ModelState::init(ds, f0, Hyper::default(), &mut rng).unwrap()
    }

    #[test]
    fn calibration_matches_frozen_reference() {
        let gh = GaussHermite::new(64);
        // E[sigmoid(c + 2 Z)] = 0.8 at c = 2.2284605386783016
        let c = calibrate_intercept(0.8, 2.0, &gh);
        assert!((c - 2.2284605386783016).abs() < 1e-8);
        // symmetric target gives zero intercept for any spread
        for sd in [0.3, 1.0, 5.0] {
            assert!(calibrate_intercept(0.5, sd, &gh).abs() < 1e-10);
        }
        // calibration inverts the forward map
        for (t, sd) in [(0.05, 1.3), (0.37, 2.4), (0.93, 0.7)] {
            let c = calibrate_intercept(t, sd, &gh);
            let back = gh.expect_std_normal(|z| sigmoid(c + sd * z));
            assert!((back - t).abs() < 1e-8, "target {t}: got {back}");
        }
    }

    #[test]
    fn atom_variance_doubles_per_level() {
        let h = Hyper::default();
        assert_eq!(h.atom_variance(1), 4.0);
        assert_eq!(h.atom_variance(2), 8.0);
        let h2 = Hyper {
            c_scale: 0.5,
            ..Hyper::default()
        };
        assert_eq!(h2.atom_variance(3), 4.0);
    }

    #[test]
    fn truncation_default_caps_at_25() {
        let h = Hyper::default();
        assert_eq!(h.resolve_h(3), 8);
        assert_eq!(h.resolve_h(20), 25);
        assert_eq!(h.resolve_h(100), 25);
        let fixed = Hyper {
            h_trunc: Some(7),
            ..Hyper::default()
        };
        assert_eq!(fixed.resolve_h(100), 7);
    }

    #[test]
    fn init_builds_consistent_state() {
        let st = toy_state(11);
        assert_eq!(st.h_trunc, 7); // 2 studies + 5
        assert_eq!(st.trees.len(), 3);
        for split in Split::ALL {
            let sd = &st.splits[split.index()];
            let cs = &st.clusters[split.index()];
            assert_eq!(sd.obs.len(), 3);
            assert_eq!(cs.atoms.len(), 7);
            assert_eq!(cs.labels.len(), 2);
            assert_eq!(cs.z.len(), 3);
            assert!(cs.psi > 0.0);
            let wsum: f64 = cs.weights.iter().sum();
            assert!(wsum <= 1.0 + 1e-12);
            assert_eq!(*cs.sticks.last().unwrap(), 1.0);
            assert!((wsum - 1.0).abs() < 1e-12); // last stick pinned
            assert!(cs.omega.iter().all(|&w| w > 0.0));
        }
        // n = 50 at 95%: root (25, 50), lower (18, 25), upper (8, 25)
        assert_eq!(st.splits[0].obs[0], (25, 50));
        assert_eq!(st.splits[1].obs[0], (18, 25));
        assert_eq!(st.splits[2].obs[0], (8, 25));
    }

    #[test]
    fn offsets_hit_centering_targets() {
        let st = toy_state(3);
        for split in Split::ALL {
            let sd = &st.splits[split.index()];
            for i in 0..3 {
                let x = &st.dataset.cohorts[i].covariates;
                let norm2: f64 = x.iter().map(|v| v * v).sum();
                let total_sd = (sd.sigma2 * norm2 + st.hyper.psi_prior_mean()).sqrt();
                let got = crate::quadrature::sigmoid_normal_mean(
                    sd.offsets[i],
                    total_sd,
                    st.quadrature(),
                );
                assert!(
                    (got - sd.targets[i]).abs() < 1e-8,
                    "split {:?} cohort {i}: {got} vs {}",
                    split,
                    sd.targets[i]
                );
            }
        }
    }

    #[test]
    fn targets_are_centering_probabilities() {
        let st = toy_state(5);
        let f0 = &st.f0;
        let c = &st.dataset.cohorts[0];
        let t_med = st.splits[0].targets[0];
        assert!((t_med - f0.cdf(c.median)).abs() < 1e-15);
        let t_low = st.splits[1].targets[0];
        assert!((t_low - f0.cdf(c.lower) / f0.cdf(c.median)).abs() < 1e-15);
        let t_up = st.splits[2].targets[0];
        let fm = f0.cdf(c.median);
        assert!((t_up - (f0.cdf(c.upper) - fm) / (1.0 - fm)).abs() < 1e-15);
    }

    #[test]
    fn unbounded_upper_centers_branch_on_imputed_cut() {
        let mut cohorts = vec![
            cohort("a_pos", "a", Marker::Positive, vec![1.0]),
            cohort("a_neg", "a", Marker::Negative, vec![0.0]),
        ];
        cohorts[1].upper = f64::INFINITY;
        let ds = Dataset::new(cohorts, vec!["x1".into()]).unwrap();
        let f0 = Centering::exponential(std::f64::consts::LN_2 / 4.0).unwrap();
        let mut rng = stream(9, STREAM_INIT);
        let st = ModelState::init(ds, f0, Hyper::default(), &mut rng).unwrap();
        assert!(st.trees[1].imputed_upper());
        // imputed cut is the conditional median, so the branch target is 1/2
        // and its calibrated intercept vanishes
        assert!((st.splits[2].targets[1] - 0.5).abs() < 1e-12);
        assert!(st.splits[2].offsets[1].abs() < 1e-9);
        // counts are unchanged by the imputation
        assert_eq!(st.splits[2].obs[1], st.splits[2].obs[0]);
    }

    #[test]
    fn cell_masses_sum_to_one_and_respect_branches() {
        let st = toy_state(17);
        let mut rng = stream(17, crate::rng::STREAM_EMIT);
        let m = st.cell_masses(0, &mut rng);
        assert_eq!(m.len(), 1 << 12);
        let total: f64 = m.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "total {total}");
        assert!(m.iter().all(|&v| v >= 0.0));
        // quarter sums reproduce the three branch probabilities
        let q = m.len() / 4;
        let quarter: Vec<f64> = (0..4).map(|k| m[k * q..(k + 1) * q].iter().sum()).collect();
        let y1 = st.branch_prob(Split::Median, 0);
        let y00 = st.branch_prob(Split::Lower, 0);
        let y10 = st.branch_prob(Split::Upper, 0);
        assert!((quarter[0] - y1 * y00).abs() < 1e-12);
        assert!((quarter[1] - y1 * (1.0 - y00)).abs() < 1e-12);
        assert!((quarter[2] - (1.0 - y1) * y10).abs() < 1e-12);
        assert!((quarter[3] - (1.0 - y1) * (1.0 - y10)).abs() < 1e-12);
    }

    #[test]
    fn init_is_reproducible_per_seed() {
        let a = toy_state(42);
        let b = toy_state(42);
        let c = toy_state(43);
        for k in 0..3 {
            assert_eq!(a.clusters[k].labels, b.clusters[k].labels);
            assert_eq!(a.clusters[k].psi.to_bits(), b.clusters[k].psi.to_bits());
            assert_eq!(a.clusters[k].atoms[0], b.clusters[k].atoms[0]);
        }
        let same = (0..3).all(|k| a.clusters[k].psi.to_bits() == c.clusters[k].psi.to_bits());
        assert!(!same, "distinct seeds should give distinct draws");
    }

    #[test]
    fn stick_weights_telescope() {
        let w = stick_weights(&[0.5, 0.5, 1.0]);
        assert_eq!(w, vec![0.5, 0.25, 0.25]);
        let single = stick_weights(&[1.0]);
        assert_eq!(single, vec![1.0]);
    }

    #[test]
    fn categorical_sampler_respects_weights() {
        let mut rng = stream(1, 99);
        let weights = [0.2, 0.5, 0.3];
        let mut counts = [0usize; 3];
        for _ in 0..20000 {
            counts[sample_categorical(&weights, &mut rng)] += 1;
        }
        for (h, &c) in counts.iter().enumerate() {
            let freq = c as f64 / 20000.0;
            assert!(
                (freq - weights[h]).abs() < 0.015,
                "slot {h}: {freq} vs {}",
                weights[h]
            );
        }
    }

    #[test]
    fn hyper_validation_rejects_bad_values() {
        let bad = |f: fn(&mut Hyper)| {
            let mut h = Hyper::default();
            f(&mut h);
            h.validate().is_err()
        };
        assert!(bad(|h| h.alpha = 0.0));
        assert!(bad(|h| h.c_scale = -1.0));
        assert!(bad(|h| h.ig_shape = 1.0));
        assert!(bad(|h| h.ig_rate = 0.0));
        assert!(bad(|h| h.depth = 1));
        assert!(bad(|h| h.depth = 25));
        assert!(bad(|h| h.h_trunc = Some(0)));
        assert!(Hyper::default().validate().is_ok());
    }
}
