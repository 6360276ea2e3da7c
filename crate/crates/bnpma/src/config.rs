//! Run configuration: a small sectioned key=value text format, parsed
//! strictly. Unknown sections or keys are errors so a typo can never
//! silently fall back to a default.
//!
//! ```text
//! # chain seed (also settable with --seed)
//! seed = 42
//!
//! [centering]
//! family = auto        # auto | exponential | lognormal
//!
//! [model]
//! alpha = 1.0
//! depth = 12
//!
//! [run]
//! n_iter = 5000
//! burn_in = 2500
//! thin = 5
//! ```

use crate::centering::CenteringFamily;
use crate::error::{Error, Result};
use crate::gibbs::Schedule;
use crate::model::Hyper;
use crate::sim::SimConfig;
use std::path::Path;

/// How the centering measure is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum CenteringChoice {
    /// Family fitted to the pooled reported medians.
    Auto(CenteringFamily),
    Exponential { rate: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

/// Output selection: which predictive curves to write and how finely.
#[derive(Clone, Debug)]
pub struct OutputConfig {
    /// Each selector is `column=value` (for example `marker=positive`)
    /// or two comma-joined constraints for an interaction.
    pub predictive: Vec<String>,
    pub bins: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            predictive: vec!["marker=positive".into(), "marker=negative".into()],
            bins: 400,
        }
    }
}

/// Everything a run needs, fully defaulted except the seed.
#[derive(Clone, Debug)]
pub struct AppConfig {
    pub seed: Option<u64>,
    pub centering: CenteringChoice,
    pub hyper: Hyper,
    pub schedule: Schedule,
    pub workers: usize,
    pub sim: SimConfig,
    pub output: OutputConfig,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            seed: None,
            centering: CenteringChoice::Auto(CenteringFamily::Exponential),
            hyper: Hyper::default(),
            schedule: Schedule::default(),
            workers: 1,
            sim: SimConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl AppConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Parse the sectioned key=value format. Lines starting with `#` or
    /// `;` are comments; keys outside any section header belong to the
    /// top level.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = AppConfig::default();
        let mut section = String::new();
        let mut centering_family: Option<String> = None;
        let mut centering_rate: Option<f64> = None;
        let mut centering_mu: Option<f64> = None;
        let mut centering_sigma: Option<f64> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    Error::Config(format!("line {}: malformed section header", lineno + 1))
                })?;
                section = name.trim().to_string();
                match section.as_str() {
                    "centering" | "model" | "run" | "sim" | "output" => {}
                    other => {
                        return Err(Error::Config(format!(
                            "line {}: unknown section [{other}]",
                            lineno + 1
                        )))
                    }
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key = value, got {line:?}",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let ctx = |what: &str, e: String| {
                Error::Config(format!("line {}: {what}: {e}", lineno + 1))
            };

            match (section.as_str(), key) {
                ("", "seed") => cfg.seed = Some(parse_num(value).map_err(|e| ctx(key, e))?),
                ("", other) => {
                    return Err(Error::Config(format!(
                        "line {}: unknown top-level key {other:?}",
                        lineno + 1
                    )))
                }

                ("centering", "family") => centering_family = Some(value.to_lowercase()),
                ("centering", "rate") => {
                    centering_rate = Some(parse_num(value).map_err(|e| ctx(key, e))?)
                }
                ("centering", "mu") => {
                    centering_mu = Some(parse_num(value).map_err(|e| ctx(key, e))?)
                }
                ("centering", "sigma") => {
                    centering_sigma = Some(parse_num(value).map_err(|e| ctx(key, e))?)
                }

                ("model", "alpha") => cfg.hyper.alpha = parse_num(value).map_err(|e| ctx(key, e))?,
                ("model", "c_scale") => {
                    cfg.hyper.c_scale = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("model", "invgamma_a") => {
                    cfg.hyper.ig_shape = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("model", "invgamma_b") => {
                    cfg.hyper.ig_rate = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("model", "H") => {
                    cfg.hyper.h_trunc = Some(parse_num(value).map_err(|e| ctx(key, e))?)
                }
                ("model", "depth") => {
                    cfg.hyper.depth = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("model", "pg_approx") => {
                    cfg.hyper.pg_approx = parse_bool(value).map_err(|e| ctx(key, e))?
                }

                ("run", "n_iter") => {
                    cfg.schedule.n_iter = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("run", "burn_in") => {
                    cfg.schedule.burn_in = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("run", "thin") => cfg.schedule.thin = parse_num(value).map_err(|e| ctx(key, e))?,
                ("run", "workers") => {
                    cfg.workers = parse_num(value).map_err(|e| ctx(key, e))?
                }

                ("sim", "studies") => {
                    cfg.sim.studies = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("sim", "n") => {
                    cfg.sim.n_per_cohort = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("sim", "gamma_range") => {
                    cfg.sim.gamma_range = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("sim", "conf_level") => {
                    cfg.sim.conf_level = parse_num(value).map_err(|e| ctx(key, e))?
                }
                ("sim", "beta1") => {
                    cfg.sim.beta_group1 = parse_pair(value).map_err(|e| ctx(key, e))?
                }
                ("sim", "beta2") => {
                    cfg.sim.beta_group2 = parse_pair(value).map_err(|e| ctx(key, e))?
                }

                ("output", "predictive") => {
                    cfg.output.predictive = if value.is_empty() {
                        Vec::new()
                    } else {
                        value.split(';').map(|s| s.trim().to_string()).collect()
                    }
                }
                ("output", "bins") => {
                    cfg.output.bins = parse_num(value).map_err(|e| ctx(key, e))?
                }

                (sect, other) => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {other:?} in section [{sect}]",
                        lineno + 1
                    )))
                }
            }
        }

        cfg.centering = resolve_centering(
            centering_family.as_deref(),
            centering_rate,
            centering_mu,
            centering_sigma,
        )?;
        if cfg.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        cfg.hyper.validate()?;
        cfg.schedule.validate()?;
        Ok(cfg)
    }
}

fn resolve_centering(
    family: Option<&str>,
    rate: Option<f64>,
    mu: Option<f64>,
    sigma: Option<f64>,
) -> Result<CenteringChoice> {
    let no_params = |ok: bool, family: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "centering parameters do not match family {family:?}"
            )))
        }
    };
    match family.unwrap_or("auto") {
        "auto" => {
            no_params(rate.is_none() && mu.is_none() && sigma.is_none(), "auto")?;
            Ok(CenteringChoice::Auto(CenteringFamily::Exponential))
        }
        "auto-lognormal" => {
            no_params(rate.is_none() && mu.is_none() && sigma.is_none(), "auto-lognormal")?;
            Ok(CenteringChoice::Auto(CenteringFamily::LogNormal))
        }
        "exponential" => {
            no_params(mu.is_none() && sigma.is_none(), "exponential")?;
            match rate {
                Some(r) => Ok(CenteringChoice::Exponential { rate: r }),
                None => Ok(CenteringChoice::Auto(CenteringFamily::Exponential)),
            }
        }
        "lognormal" => {
            no_params(rate.is_none(), "lognormal")?;
            match (mu, sigma) {
                (Some(mu), Some(sigma)) => Ok(CenteringChoice::LogNormal { mu, sigma }),
                (None, None) => Ok(CenteringChoice::Auto(CenteringFamily::LogNormal)),
                _ => Err(Error::Config(
                    "lognormal centering needs both mu and sigma (or neither for auto fit)".into(),
                )),
            }
        }
        other => Err(Error::Config(format!("unknown centering family {other:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("cannot parse {value:?}: {e}"))
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value.to_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("cannot parse {other:?} as a boolean")),
    }
}

fn parse_pair(value: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got {value:?}"));
    }
    Ok([parse_num(parts[0])?, parse_num(parts[1])?])
}
