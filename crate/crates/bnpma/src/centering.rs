//! Centering measures on (0, ∞) with closed-form CDFs and quantiles.
//!
//! The random survival distributions built elsewhere in this crate are
//! centered on one of these measures: partition cells beyond the reported
//! quadruple are cut at conditional medians of `F0`, and splitting
//! probabilities are calibrated to its conditional cell masses.

use crate::error::{Error, Result};
use statrs::distribution::{ContinuousCDF, Normal};

/// Parametric centering measure `F0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Centering {
    /// Exponential with the given rate; median = ln 2 / rate.
    Exponential { rate: f64 },
    /// LogNormal: log of the variable is N(mu, sigma²).
    LogNormal { mu: f64, sigma: f64 },
}

/// Family tag used by configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenteringFamily {
    Exponential,
    LogNormal,
}

impl Centering {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponential rate must be finite and positive, got {rate}"
            )));
        }
        Ok(Centering::Exponential { rate })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lognormal parameters must be finite with sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        Ok(Centering::LogNormal { mu, sigma })
    }

    /// Fit the family to the pooled reported medians: the exponential is
    /// rate-matched so its median equals the pooled median; the lognormal
    /// matches mean and standard deviation of the log medians.
    pub fn from_pooled_medians(medians: &[f64], family: CenteringFamily) -> Result<Self> {
        if medians.is_empty() || medians.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::InvalidParameter(
                "pooled medians must be a nonempty list of positive finite values".into(),
            ));
        }
        match family {
            CenteringFamily::Exponential => {
                let pooled = sample_median(medians);
                Centering::exponential(std::f64::consts::LN_2 / pooled)
            }
            CenteringFamily::LogNormal => {
                if medians.len() < 2 {
                    return Err(Error::InvalidParameter(
                        "lognormal moment matching needs at least two pooled medians".into(),
                    ));
                }
                let logs: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
                let mu = logs.iter().sum::<f64>() / logs.len() as f64;
                let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>()
                    / (logs.len() - 1) as f64;
                let sigma = var.sqrt();
                if !(sigma > 0.0) {
                    return Err(Error::InvalidParameter(
                        "pooled medians are degenerate; lognormal sigma would be zero".into(),
                    ));
                }
                Centering::log_normal(mu, sigma)
            }
        }
    }

    /// CDF at `t`; 0 for t ≤ 0, 1 for t = ∞.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t == f64::INFINITY {
            return 1.0;
        }
        match *self {
            Centering::Exponential { rate } => -(-rate * t).exp_m1(),
            Centering::LogNormal { mu, sigma } => std_normal().cdf((t.ln() - mu) / sigma),
        }
    }

    /// Quantile for p ∈ (0,1). Panics outside the open interval: callers
    /// own that precondition.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "quantile requires p in (0,1), got {p}");
        match *self {
            Centering::Exponential { rate } => -(-p).ln_1p() / rate,
            Centering::LogNormal { mu, sigma } => (mu + sigma * std_normal().inverse_cdf(p)).exp(),
        }
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    /// Upper tail 1 - F(t), computed in tail space so deep-tail values
    /// keep full relative precision instead of cancelling against 1.
    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        if t == f64::INFINITY {
            return 0.0;
        }
        match *self {
            Centering::Exponential { rate } => (-rate * t).exp(),
            Centering::LogNormal { mu, sigma } => std_normal().cdf(-(t.ln() - mu) / sigma),
        }
    }

    /// The t whose upper tail mass is `q`: survival(t) = q.
    pub fn quantile_tail(&self, q: f64) -> f64 {
        let q = q.clamp(1e-300, 1.0);
        if q == 1.0 {
            return 0.0;
        }
        match *self {
            Centering::Exponential { rate } => -q.ln() / rate,
            Centering::LogNormal { mu, sigma } => {
                (mu - sigma * std_normal().inverse_cdf(q)).exp()
            }
        }
    }

    /// Median of F0 conditioned on the cell (a, b); `b` may be ∞. Deep
    /// right-tail cells are bisected in tail space, where the halving
    /// stays exact however small the cell mass is.
    pub fn conditional_median(&self, a: f64, b: f64) -> f64 {
        debug_assert!(a >= 0.0 && a < b, "conditional_median needs 0 ≤ a < b");
        let sa = self.survival(a);
        if sa < 0.5 || b == f64::INFINITY {
            self.quantile_tail(0.5 * (sa + self.survival(b)))
        } else {
            self.quantile(0.5 * (self.cdf(a) + self.cdf(b)))
        }
    }

    /// Mass of (a, b) under F0, b may be ∞.
    pub fn cell_mass(&self, a: f64, b: f64) -> f64 {
        let sa = self.survival(a);
        if sa < 0.5 {
            sa - self.survival(b)
        } else {
            self.cdf(b) - self.cdf(a)
        }
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).unwrap()
}

/// Median of a sample; even lengths average the two middle order statistics.
pub fn sample_median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
