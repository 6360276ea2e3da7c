//! Core data model: one row per reported cohort, grouped into studies.

use crate::error::{Error, Result};

/// Biomarker arm of a cohort within its study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Marker {
    Positive,
    Negative,
    /// No biomarker split reported.
    None,
}

impl Marker {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(Marker::Positive),
            "negative" => Ok(Marker::Negative),
            "none" => Ok(Marker::None),
            other => Err(Error::Data(format!(
                "bad marker code {other:?}; expected positive|negative|none"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Marker::Positive => "positive",
            Marker::Negative => "negative",
            Marker::None => "none",
        }
    }
}

/// One cohort's reported summary: CI bounds and median in months, sample
/// size, the confidence level of the interval, and covariates (after any
/// one-hot expansion).
#[derive(Debug, Clone, PartialEq)]
pub struct CohortSummary {
    pub cohort_id: String,
    pub study_id: String,
    pub marker: Marker,
    /// Lower CI bound ℓ.
    pub lower: f64,
    /// Reported median m.
    pub median: f64,
    /// Upper CI bound h; +∞ when the study never reached it.
    pub upper: f64,
    pub n: u32,
    pub conf_level: f64,
    pub covariates: Vec<f64>,
}

impl CohortSummary {
    /// Ordering and domain checks shared by ingestion and the simulator.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidQuadruple {
                cohort: self.cohort_id.clone(),
                reason: reason.to_string(),
            })
        };
        if !(self.lower.is_finite() && self.lower > 0.0) {
            return fail("lower bound must be positive and finite");
        }
        if !(self.median.is_finite() && self.median > self.lower) {
            return fail("interval ordering requires lower < median");
        }
        if !(self.upper > self.median) {
            return fail("interval ordering requires median < upper");
        }
        if self.upper.is_nan() {
            return fail("upper bound is NaN");
        }
        if self.n < 4 {
            return fail("sample size must be at least 4");
        }
        if !(self.conf_level > 0.5 && self.conf_level < 1.0) {
            return fail("confidence level must lie in (0.5, 1)");
        }
        Ok(())
    }
}

/// A validated collection of cohorts with study-level indexing.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub cohorts: Vec<CohortSummary>,
    /// Unique study ids in order of first appearance.
    pub studies: Vec<String>,
    /// Study index of each cohort.
    pub study_of: Vec<usize>,
    /// Cohort indices of each study.
    pub cohorts_of: Vec<Vec<usize>>,
    /// Names of the covariate columns, aligned with `CohortSummary::covariates`.
    pub covariate_names: Vec<String>,
}

impl Dataset {
    pub fn new(cohorts: Vec<CohortSummary>, covariate_names: Vec<String>) -> Result<Self> {
        if cohorts.is_empty() {
            return Err(Error::Data("dataset has no cohorts".into()));
        }
        let p = covariate_names.len();
        let mut studies: Vec<String> = Vec::new();
        let mut study_of = Vec::with_capacity(cohorts.len());
        let mut seen_cohorts = std::collections::HashSet::new();
        for c in &cohorts {
            c.validate()?;
            if c.covariates.len() != p {
                return Err(Error::Data(format!(
                    "cohort {} has {} covariates, expected {}",
                    c.cohort_id,
                    c.covariates.len(),
                    p
                )));
            }
            if !seen_cohorts.insert(c.cohort_id.clone()) {
                return Err(Error::Data(format!("duplicate cohort id {}", c.cohort_id)));
            }
            let idx = match studies.iter().position(|s| *s == c.study_id) {
                Some(i) => i,
                None => {
                    studies.push(c.study_id.clone());
                    studies.len() - 1
                }
            };
            study_of.push(idx);
        }
        let mut cohorts_of = vec![Vec::new(); studies.len()];
        for (i, &s) in study_of.iter().enumerate() {
            cohorts_of[s].push(i);
        }
        Ok(Dataset { cohorts, studies, study_of, cohorts_of, covariate_names })
    }

    pub fn n_studies(&self) -> usize {
        self.studies.len()
    }

    pub fn n_cohorts(&self) -> usize {
        self.cohorts.len()
    }

    pub fn n_covariates(&self) -> usize {
        self.covariate_names.len()
    }

    /// (study, positive cohort, negative cohort) for every study with
    /// exactly one cohort of each marker; anything else is skipped so a
    /// study's effect is always a single well-defined contrast.
    pub fn marker_pairs(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (s, cohort_idx) in self.cohorts_of.iter().enumerate() {
            let pos: Vec<usize> = cohort_idx
                .iter()
                .copied()
                .filter(|&i| self.cohorts[i].marker == Marker::Positive)
                .collect();
            let neg: Vec<usize> = cohort_idx
                .iter()
                .copied()
                .filter(|&i| self.cohorts[i].marker == Marker::Negative)
                .collect();
            if let (&[p], &[n]) = (&pos[..], &neg[..]) {
                out.push((s, p, n));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cohort(id: &str, study: &str, marker: Marker) -> CohortSummary {
        CohortSummary {
            cohort_id: id.into(),
            study_id: study.into(),
            marker,
            lower: 2.0,
            median: 4.0,
            upper: 9.0,
            n: 50,
            conf_level: 0.95,
            covariates: vec![1.0],
        }
    }

    #[test]
    fn study_indexing_follows_first_appearance() {
        let ds = Dataset::new(
            vec![
                cohort("a+", "A", Marker::Positive),
                cohort("a-", "A", Marker::Negative),
                cohort("b+", "B", Marker::Positive),
            ],
            vec!["x".into()],
        )
        .unwrap();
        assert_eq!(ds.studies, vec!["A", "B"]);
        assert_eq!(ds.study_of, vec![0, 0, 1]);
        assert_eq!(ds.cohorts_of, vec![vec![0, 1], vec![2]]);
        let pairs = ds.marker_pairs();
        assert_eq!(pairs, vec![(0, 0, 1)]);
    }

    #[test]
    fn ambiguous_marker_arms_are_not_paired() {
        let ds = Dataset::new(
            vec![
                cohort("a1+", "A", Marker::Positive),
                cohort("a2+", "A", Marker::Positive),
                cohort("a-", "A", Marker::Negative),
                cohort("b+", "B", Marker::Positive),
                cohort("b-", "B", Marker::Negative),
            ],
            vec!["x".into()],
        )
        .unwrap();
        // study A has two positive arms, so only B yields a contrast
        assert_eq!(ds.marker_pairs(), vec![(1, 3, 4)]);
    }

    #[test]
    fn ordering_violations_are_rejected() {
        let mut c = cohort("bad", "A", Marker::None);
        c.lower = 5.0; // lower > median
        assert!(c.validate().is_err());
        let mut c = cohort("bad2", "A", Marker::None);
        c.upper = 3.0;
        assert!(c.validate().is_err());
        let mut c = cohort("ok_inf", "A", Marker::None);
        c.upper = f64::INFINITY;
        assert!(c.validate().is_ok());
        let mut c = cohort("small", "A", Marker::None);
        c.n = 3;
        assert!(c.validate().is_err());
    }

    #[test]
    fn duplicate_cohort_ids_rejected() {
        let err = Dataset::new(
            vec![cohort("x", "A", Marker::Positive), cohort("x", "A", Marker::Negative)],
            vec!["x".into()],
        );
        assert!(err.is_err());
    }

    #[test]
    fn marker_codes_parse_case_insensitively() {
        assert_eq!(Marker::parse(" Positive ").unwrap(), Marker::Positive);
        assert_eq!(Marker::parse("NONE").unwrap(), Marker::None);
        assert!(Marker::parse("pos").is_err());
    }
}
