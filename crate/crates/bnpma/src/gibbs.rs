//! Blocked Gibbs sampler for the three-node mixture model.
//!
//! Each node runs the same five-step kernel on its own random stream:
//! regression atoms jointly with member study intercepts, then study
//! labels (with the logistic latents marginalized out), then the
//! Polya-Gamma latents, then stick weights, then the study-effect
//! variance. Labels must precede the latent refresh: the label step
//! integrates the latents out, so they are redrawn immediately after to
//! keep the kernel's stationary distribution exact.
//!
//! The three nodes are conditionally independent given the partitions,
//! so `run_chain` advances them in parallel blocks between emission
//! points and emits draws from a dedicated stream; output is therefore
//! byte-identical for any worker count.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::logistic::ln_sigmoid;
use crate::model::{sample_categorical, stick_weights, ClusterState, Hyper, ModelState, SplitData};
use crate::polya_gamma::{would_clamp, PgSampler};
use crate::posterior::PosteriorDraw;
use crate::rng::{stream, STREAM_EMIT, STREAM_SPLIT_BASE};

/// Sweep counts for one run: total sweeps, discarded prefix, emission
/// stride. Draws are emitted at sweeps burn_in + thin, burn_in + 2*thin, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub n_iter: u64,
    pub burn_in: u64,
    pub thin: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            n_iter: 5_000,
            burn_in: 2_500,
            thin: 5,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::InvalidParameter(
                "thinning stride must be at least 1".into(),
            ));
        }
        if self.n_iter > 0 && self.burn_in >= self.n_iter {
            return Err(Error::InvalidParameter(format!(
                "burn-in {} must be smaller than the iteration count {}",
                self.burn_in, self.n_iter
            )));
        }
        Ok(())
    }

    /// Sweep indices (1-based) at which a draw is emitted.
    pub fn emission_sweeps(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut s = self.burn_in + self.thin;
        while s <= self.n_iter {
            out.push(s);
            s += self.thin;
        }
        out
    }
}

/// Tallies of numerical rescue events, reported in diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct KernelCounters {
    /// Cholesky factorizations that needed a diagonal jitter retry.
    pub jitter_retries: u64,
    /// Polya-Gamma tilts clamped to the overflow guard.
    pub pg_clamps: u64,
    /// Label draws kept at the current value because every candidate
    /// underflowed.
    pub label_rescues: u64,
}

impl KernelCounters {
    fn absorb(&mut self, other: &KernelCounters) {
        self.jitter_retries += other.jitter_retries;
        self.pg_clamps += other.pg_clamps;
        self.label_rescues += other.label_rescues;
    }
}

/// Sampler output: emitted draws plus rescue-event tallies.
pub struct Chain {
    pub draws: Vec<PosteriorDraw>,
    pub counters: KernelCounters,
}

/// Run the full chain on an initialized state.
///
/// `workers > 1` advances the three nodes on scoped threads; the result
/// is identical to the sequential schedule because each node owns one
/// stream derived from `seed` and emissions happen between blocks on
/// the orchestrator's own stream.
pub fn run_chain(
    state: &mut ModelState,
    sched: &Schedule,
    seed: u64,
    workers: usize,
) -> Result<Chain> {
    sched.validate()?;
    let mut rngs = [
        stream(seed, STREAM_SPLIT_BASE),
        stream(seed, STREAM_SPLIT_BASE + 1),
        stream(seed, STREAM_SPLIT_BASE + 2),
    ];
    let mut emit_rng = stream(seed, STREAM_EMIT);
    let mut counters = [KernelCounters::default(); 3];
    let pg = PgSampler {
        approximate: state.hyper.pg_approx,
        ..PgSampler::default()
    };

    let mut targets = sched.emission_sweeps();
    let emitted = targets.len();
    if targets.last().copied() != Some(sched.n_iter) && sched.n_iter > 0 {
        targets.push(sched.n_iter);
    }

    let mut draws = Vec::with_capacity(emitted);
    let mut done = 0u64;
    for (idx, &target) in targets.iter().enumerate() {
        let block = target - done;
        if block > 0 {
            advance_all(state, block, workers, pg, &mut rngs, &mut counters)?;
            done = target;
        }
        if idx < emitted {
            draws.push(emit_draw(state, done, &mut emit_rng));
        }
    }

    let mut total = KernelCounters::default();
    for c in &counters {
        total.absorb(c);
    }
    Ok(Chain {
        draws,
        counters: total,
    })
}

fn advance_all(
    state: &mut ModelState,
    sweeps: u64,
    workers: usize,
    pg: PgSampler,
    rngs: &mut [ChaCha8Rng; 3],
    counters: &mut [KernelCounters; 3],
) -> Result<()> {
    let dataset = &state.dataset;
    let hyper = &state.hyper;
    let splits = &state.splits;
    let [c0, c1, c2] = &mut state.clusters;
    let [r0, r1, r2] = rngs;
    let [k0, k1, k2] = counters;
    if workers > 1 {
        let (res1, res2) = std::thread::scope(|scope| {
            let h1 = scope
                .spawn(move || advance_node(dataset, &splits[1], c1, hyper, pg, r1, k1, sweeps));
            let h2 = scope
                .spawn(move || advance_node(dataset, &splits[2], c2, hyper, pg, r2, k2, sweeps));
            let res0 = advance_node(dataset, &splits[0], c0, hyper, pg, r0, k0, sweeps);
            let res1 = h1.join().unwrap_or_else(|e| std::panic::resume_unwind(e));
            let res2 = h2.join().unwrap_or_else(|e| std::panic::resume_unwind(e));
            res0.map(|_| (res1, res2))
        })?;
        res1?;
        res2?;
    } else {
        advance_node(dataset, &splits[0], c0, hyper, pg, r0, k0, sweeps)?;
        advance_node(dataset, &splits[1], c1, hyper, pg, r1, k1, sweeps)?;
        advance_node(dataset, &splits[2], c2, hyper, pg, r2, k2, sweeps)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn advance_node(
    data: &Dataset,
    sd: &SplitData,
    cs: &mut ClusterState,
    hyper: &Hyper,
    pg: PgSampler,
    rng: &mut ChaCha8Rng,
    counters: &mut KernelCounters,
    sweeps: u64,
) -> Result<()> {
    for _ in 0..sweeps {
        sweep_once(data, sd, cs, hyper, pg, rng, counters)?;
    }
    Ok(())
}

/// One full kernel sweep on a single node.
pub(crate) fn sweep_once(
    data: &Dataset,
    sd: &SplitData,
    cs: &mut ClusterState,
    hyper: &Hyper,
    pg: PgSampler,
    rng: &mut impl Rng,
    counters: &mut KernelCounters,
) -> Result<()> {
    update_atoms(data, sd, cs, rng, counters)?;
    update_labels(data, sd, cs, rng, counters);
    update_pg_latents(data, sd, cs, pg, rng, counters);
    update_weights(cs, hyper.alpha, rng);
    update_psi(cs, hyper, rng);
    Ok(())
}

/// Draw each cluster's regression atom jointly with the cohort intercepts
/// of its member studies from the Gaussian full conditional; empty
/// clusters are refreshed from the base measure.
pub(crate) fn update_atoms(
    data: &Dataset,
    sd: &SplitData,
    cs: &mut ClusterState,
    rng: &mut impl Rng,
    counters: &mut KernelCounters,
) -> Result<()> {
    let h_trunc = cs.atoms.len();
    let p = data.n_covariates();
    let atom_sd = sd.sigma2.sqrt();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); h_trunc];
    for (s, &h) in cs.labels.iter().enumerate() {
        for &i in &data.cohorts_of[s] {
            members[h].push(i);
        }
    }

    for h in 0..h_trunc {
        let block = &members[h];
        if block.is_empty() {
            for q in 0..p {
                cs.atoms[h][q] = atom_sd * rng.sample::<f64, _>(StandardNormal);
            }
            continue;
        }

        let d = p + block.len();
        let mut precision = DMatrix::<f64>::zeros(d, d);
        let mut rhs = DVector::<f64>::zeros(d);
        for (pos, &i) in block.iter().enumerate() {
            let zi = p + pos;
            let (n_i, trials) = sd.obs[i];
            let w = cs.omega[i];
            let kappa = f64::from(n_i) - f64::from(trials) / 2.0 - w * sd.offsets[i];
            let x = &data.cohorts[i].covariates;
            for a in 0..p {
                for b in 0..p {
                    precision[(a, b)] += w * x[a] * x[b];
                }
                precision[(a, zi)] += w * x[a];
                precision[(zi, a)] += w * x[a];
                rhs[a] += kappa * x[a];
            }
            precision[(zi, zi)] += w;
            rhs[zi] += kappa;
        }
        for q in 0..p {
            precision[(q, q)] += 1.0 / sd.sigma2;
        }
        for t in 0..block.len() {
            precision[(p + t, p + t)] += 1.0 / cs.psi;
        }

        let chol = match Cholesky::new(precision.clone()) {
            Some(c) => c,
            None => {
                counters.jitter_retries += 1;
                let mut jittered = precision;
                for q in 0..d {
                    jittered[(q, q)] += 1e-8;
                }
                Cholesky::new(jittered).ok_or_else(|| {
                    Error::LinearAlgebra(format!(
                        "cluster precision matrix ({d}x{d}) not positive definite after jitter"
                    ))
                })?
            }
        };
        let mean = chol.solve(&rhs);
        let u = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        // precision = L L'; solving L' e = u gives e ~ N(0, precision^{-1})
        let noise = chol
            .l()
            .transpose()
            .solve_upper_triangular(&u)
            .ok_or_else(|| Error::LinearAlgebra("singular Cholesky factor".into()))?;
        let draw = mean + noise;
        for q in 0..p {
            cs.atoms[h][q] = draw[q];
        }
        for (pos, &i) in block.iter().enumerate() {
            cs.z[i] = draw[p + pos];
        }
    }
    Ok(())
}

/// Redraw each study's cluster label from the mixture conditional with
/// the Polya-Gamma latents integrated out. Clusters the study does not
/// currently occupy are scored against fresh candidate intercepts for
/// its cohorts.
pub(crate) fn update_labels(
    data: &Dataset,
    sd: &SplitData,
    cs: &mut ClusterState,
    rng: &mut impl Rng,
    counters: &mut KernelCounters,
) {
    let h_trunc = cs.atoms.len();
    for s in 0..cs.labels.len() {
        let current = cs.labels[s];
        let cohorts = &data.cohorts_of[s];
        let z_sd = cs.psi.sqrt();
        // candidate_z[h] holds one intercept per cohort of study s
        let mut candidate_z: Vec<Vec<f64>> = (0..h_trunc)
            .map(|_| {
                cohorts
                    .iter()
                    .map(|_| z_sd * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        for (pos, &i) in cohorts.iter().enumerate() {
            candidate_z[current][pos] = cs.z[i];
        }

        let mut log_p: Vec<f64> = cs
            .weights
            .iter()
            .map(|&w| if w > 0.0 { w.ln() } else { f64::NEG_INFINITY })
            .collect();
        for (h, lp) in log_p.iter_mut().enumerate() {
            for (pos, &i) in cohorts.iter().enumerate() {
                let (n_i, trials) = sd.obs[i];
                let x = &data.cohorts[i].covariates;
                let mut eta = sd.offsets[i] + candidate_z[h][pos];
                for (xq, bq) in x.iter().zip(cs.atoms[h].iter()) {
                    eta += xq * bq;
                }
                *lp += f64::from(n_i) * ln_sigmoid(eta)
                    + f64::from(trials - n_i) * ln_sigmoid(-eta);
            }
        }

        let top = log_p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            counters.label_rescues += 1;
            continue;
        }
        let probs: Vec<f64> = log_p.iter().map(|&lp| (lp - top).exp()).collect();
        let new = sample_categorical(&probs, rng);
        cs.labels[s] = new;
        for (pos, &i) in cohorts.iter().enumerate() {
            cs.z[i] = candidate_z[new][pos];
        }
    }
}

/// Refresh the Polya-Gamma latent for every cohort at its current
/// linear predictor.
pub(crate) fn update_pg_latents(
    data: &Dataset,
    sd: &SplitData,
    cs: &mut ClusterState,
    pg: PgSampler,
    rng: &mut impl Rng,
    counters: &mut KernelCounters,
) {
    for i in 0..sd.obs.len() {
        let (_, trials) = sd.obs[i];
        let s = data.study_of[i];
        let x = &data.cohorts[i].covariates;
        let mut eta = sd.offsets[i] + cs.z[i];
        for (xq, bq) in x.iter().zip(cs.atoms[cs.labels[s]].iter()) {
            eta += xq * bq;
        }
        if would_clamp(eta) {
            counters.pg_clamps += 1;
        }
        cs.omega[i] = pg.draw(trials, eta, rng);
    }
}

/// Conjugate stick update; the last stick is pinned to one so the
/// truncated weights sum to unity.
pub(crate) fn update_weights(cs: &mut ClusterState, alpha: f64, rng: &mut impl Rng) {
    let h_trunc = cs.sticks.len();
    let mut sizes = vec![0u64; h_trunc];
    for &l in &cs.labels {
        sizes[l] += 1;
    }
    let mut tail = vec![0u64; h_trunc + 1];
    for h in (0..h_trunc).rev() {
        tail[h] = tail[h + 1] + sizes[h];
    }
    for h in 0..h_trunc.saturating_sub(1) {
        let shape_a = 1.0 + sizes[h] as f64;
        let shape_b = alpha + tail[h + 1] as f64;
        let beta = Beta::new(shape_a, shape_b).expect("positive Beta parameters");
        cs.sticks[h] = beta.sample(rng);
    }
    cs.sticks[h_trunc - 1] = 1.0;
    cs.weights = stick_weights(&cs.sticks);
}

/// Conjugate inverse-gamma update of the cohort-effect variance.
pub(crate) fn update_psi(cs: &mut ClusterState, hyper: &Hyper, rng: &mut impl Rng) {
    let shape = hyper.ig_shape + 0.5 * cs.z.len() as f64;
    let rate = hyper.ig_rate + 0.5 * cs.z.iter().map(|z| z * z).sum::<f64>();
    let gamma = Gamma::new(shape, 1.0).expect("positive Gamma shape");
    cs.psi = rate / gamma.sample(rng);
}

/// Assemble a posterior draw from the current state: per-cohort cell
/// masses (deep levels imputed fresh), medians, and root-node labels.
fn emit_draw(state: &ModelState, iteration: u64, rng: &mut impl Rng) -> PosteriorDraw {
    let n = state.dataset.n_cohorts();
    let mut cell_masses = Vec::with_capacity(n);
    let mut medians = Vec::with_capacity(n);
    let mut median_in_tail = Vec::with_capacity(n);
    for i in 0..n {
        let masses = state.cell_masses(i, rng);
        let (median, in_tail) =
            crate::posterior::median_from_masses(&masses, &state.trees[i], &state.f0);
        medians.push(median);
        median_in_tail.push(in_tail);
        cell_masses.push(masses);
    }
    PosteriorDraw {
        iteration,
        cell_masses,
        medians,
        median_in_tail,
        labels: state.clusters[0].labels.clone(),
    }
}
