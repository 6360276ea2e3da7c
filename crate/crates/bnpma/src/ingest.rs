//! CSV ingestion: strict fixed header, per-row validation with
//! reasons, deterministic one-hot expansion of categorical covariates,
//! and a canonical writer whose output re-ingests unchanged.

use crate::data::{CohortSummary, Dataset, Marker};
use crate::error::{Error, Result};
use crate::report::fmt_float;
use serde::Serialize;
use std::collections::BTreeSet;
use std::path::Path;

/// Names and order of the fixed leading columns.
pub const FIXED_COLUMNS: [&str; 8] = [
    "study_id",
    "cohort_id",
    "marker",
    "median",
    "ci_lower",
    "ci_upper",
    "n",
    "conf_level",
];

/// One rejected input row.
#[derive(Clone, Debug, Serialize)]
pub struct RejectedRow {
    /// 1-based data row number (header not counted).
    pub row: usize,
    pub cohort_id: String,
    pub reason: String,
}

/// One-hot expansion record for a categorical column.
#[derive(Clone, Debug, Serialize)]
pub struct OneHotExpansion {
    pub column: String,
    pub baseline: String,
    pub levels: Vec<String>,
}

/// What happened during ingestion; accepted + rejected = input rows.
#[derive(Clone, Debug, Serialize)]
pub struct IngestReport {
    pub input_rows: usize,
    pub accepted: usize,
    pub rejected: Vec<RejectedRow>,
    pub one_hot: Vec<OneHotExpansion>,
    /// Rows whose empty conf_level was filled with 0.95.
    pub conf_level_defaulted: usize,
}

struct RawRow {
    cohort: CohortSummary,
    covariate_text: Vec<String>,
}

/// Read and validate a dataset. Rows failing validation are collected
/// with reasons rather than aborting; zero surviving rows is an error.
pub fn ingest(path: &Path) -> Result<(Dataset, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Data(format!("cannot read header: {e}")))?
        .clone();
    if headers.len() < FIXED_COLUMNS.len() {
        return Err(Error::Data(format!(
            "header has {} columns; the first {} must be {}",
            headers.len(),
            FIXED_COLUMNS.len(),
            FIXED_COLUMNS.join(", ")
        )));
    }
    for (i, want) in FIXED_COLUMNS.iter().enumerate() {
        if headers.get(i) != Some(*want) {
            return Err(Error::Data(format!(
                "column {} must be named {want:?}, found {:?}",
                i + 1,
                headers.get(i).unwrap_or("")
            )));
        }
    }
    let covariate_columns: Vec<String> = headers
        .iter()
        .skip(FIXED_COLUMNS.len())
        .map(str::to_string)
        .collect();
    {
        let mut seen = BTreeSet::new();
        for c in &covariate_columns {
            if !seen.insert(c.clone()) {
                return Err(Error::Data(format!("duplicate covariate column {c:?}")));
            }
        }
    }

    let mut input_rows = 0usize;
    let mut rejected = Vec::new();
    let mut conf_level_defaulted = 0usize;
    let mut survivors: Vec<RawRow> = Vec::new();
    let mut seen_cohorts = BTreeSet::new();

    for (idx, record) in reader.records().enumerate() {
        input_rows += 1;
        let row = idx + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                rejected.push(RejectedRow {
                    row,
                    cohort_id: String::new(),
                    reason: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        let cohort_id = record.get(1).unwrap_or("").to_string();
        let reject = |reason: String, rejected: &mut Vec<RejectedRow>| {
            rejected.push(RejectedRow { row, cohort_id: cohort_id.clone(), reason });
        };
        if record.len() != headers.len() {
            reject(
                format!("expected {} fields, found {}", headers.len(), record.len()),
                &mut rejected,
            );
            continue;
        }
        match parse_row(&record, &covariate_columns, &mut conf_level_defaulted) {
            Ok(raw) => {
                if !seen_cohorts.insert(raw.cohort.cohort_id.clone()) {
                    reject("duplicate cohort_id".into(), &mut rejected);
                } else {
                    survivors.push(raw);
                }
            }
            Err(reason) => reject(reason, &mut rejected),
        }
    }

    // classify covariate columns on the surviving rows: a column is
    // numeric only when every value parses
    let mut one_hot = Vec::new();
    let mut final_names: Vec<String> = Vec::new();
    enum Col {
        Numeric,
        Categorical { emitted: Vec<String> },
    }
    let mut plan: Vec<Col> = Vec::new();
    for (c, name) in covariate_columns.iter().enumerate() {
        let numeric = survivors
            .iter()
            .all(|r| r.covariate_text[c].parse::<f64>().is_ok());
        if numeric {
            final_names.push(name.clone());
            plan.push(Col::Numeric);
        } else {
            let levels: BTreeSet<String> = survivors
                .iter()
                .map(|r| r.covariate_text[c].clone())
                .collect();
            let levels: Vec<String> = levels.into_iter().collect();
            let baseline = levels[0].clone();
            let emitted: Vec<String> = levels[1..].to_vec();
            for level in &emitted {
                final_names.push(format!("{name}_{level}"));
            }
            log::info!(
                "covariate {name:?} one-hot expanded; baseline level {baseline:?}"
            );
            one_hot.push(OneHotExpansion {
                column: name.clone(),
                baseline: baseline.clone(),
                levels: levels.clone(),
            });
            plan.push(Col::Categorical { emitted });
        }
    }

    let mut cohorts = Vec::with_capacity(survivors.len());
    for raw in survivors {
        let mut covariates = Vec::with_capacity(final_names.len());
        for (c, col) in plan.iter().enumerate() {
            let text = &raw.covariate_text[c];
            match col {
                Col::Numeric => covariates.push(text.parse::<f64>().unwrap()),
                Col::Categorical { emitted, .. } => {
                    for level in emitted {
                        covariates.push(if text == level { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        let mut cohort = raw.cohort;
        cohort.covariates = covariates;
        cohorts.push(cohort);
    }

    let accepted = cohorts.len();
    debug_assert_eq!(accepted + rejected.len(), input_rows);
    if accepted == 0 {
        return Err(Error::Data(format!(
            "no valid rows in {} ({} rejected)",
            path.display(),
            rejected.len()
        )));
    }
    let dataset = Dataset::new(cohorts, final_names)?;
    Ok((
        dataset,
        IngestReport {
            input_rows,
            accepted,
            rejected,
            one_hot,
            conf_level_defaulted,
        },
    ))
}

fn parse_row(
    record: &csv::StringRecord,
    covariate_columns: &[String],
    conf_level_defaulted: &mut usize,
) -> std::result::Result<RawRow, String> {
    let study_id = record.get(0).unwrap_or("").to_string();
    let cohort_id = record.get(1).unwrap_or("").to_string();
    if study_id.is_empty() {
        return Err("missing study_id".into());
    }
    if cohort_id.is_empty() {
        return Err("missing cohort_id".into());
    }
    let marker = Marker::parse(record.get(2).unwrap_or(""))
        .map_err(|e| format!("bad marker code: {e}"))?;
    let median = parse_positive(record.get(3), "median")?;
    let lower = parse_positive(record.get(4), "ci_lower")?;
    let upper_text = record.get(5).unwrap_or("");
    let upper: f64 = upper_text
        .parse()
        .map_err(|_| format!("cannot parse ci_upper {upper_text:?}"))?;
    let n_text = record.get(6).unwrap_or("");
    if n_text.is_empty() {
        return Err("missing n".into());
    }
    let n: u32 = n_text
        .parse()
        .map_err(|_| format!("cannot parse n {n_text:?}"))?;
    let conf_text = record.get(7).unwrap_or("");
    let conf_level = if conf_text.is_empty() {
        *conf_level_defaulted += 1;
        0.95
    } else {
        conf_text
            .parse()
            .map_err(|_| format!("cannot parse conf_level {conf_text:?}"))?
    };
    let mut covariate_text = Vec::with_capacity(covariate_columns.len());
    for (c, name) in covariate_columns.iter().enumerate() {
        let text = record.get(FIXED_COLUMNS.len() + c).unwrap_or("");
        if text.is_empty() {
            return Err(format!("missing value for covariate {name:?}"));
        }
        covariate_text.push(text.to_string());
    }
    let cohort = CohortSummary {
        cohort_id,
        study_id,
        marker,
        lower,
        median,
        upper,
        n,
        conf_level,
        covariates: Vec::new(),
    };
    cohort.validate().map_err(|e| match e {
        Error::InvalidQuadruple { reason, .. } => format!("interval ordering: {reason}"),
        other => other.to_string(),
    })?;
    Ok(RawRow { cohort, covariate_text })
}

fn parse_positive(field: Option<&str>, name: &str) -> std::result::Result<f64, String> {
    let text = field.unwrap_or("");
    let v: f64 = text
        .parse()
        .map_err(|_| format!("cannot parse {name} {text:?}"))?;
    Ok(v)
}

/// Write a dataset in the exact input schema. Covariates are already
/// numeric at this point, so re-ingesting reproduces the dataset.
pub fn write_canonical(path: &Path, dataset: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(dataset.covariate_names.iter().cloned());
    w.write_record(&header)?;
    for c in &dataset.cohorts {
        let mut rec = vec![
            c.study_id.clone(),
            c.cohort_id.clone(),
            c.marker.as_str().to_string(),
            fmt_float(c.median),
            fmt_float(c.lower),
            fmt_float(c.upper),
            c.n.to_string(),
            fmt_float(c.conf_level),
        ];
        rec.extend(c.covariates.iter().map(|&x| fmt_float(x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    const HEADER: &str = "study_id,cohort_id,marker,median,ci_lower,ci_upper,n,conf_level";

    #[test]
    fn accepts_good_rows_and_rejects_bad_ones_with_reasons() {
        let csv = format!(
            "{HEADER},age\n\
             A,a_pos,positive,4.0,2.0,9.0,50,0.95,61\n\
             A,a_neg,negative,3.0,1.5,7.0,40,0.95,61\n\
             B,b_bad,positive,4.0,5.0,9.0,50,0.95,60\n\
             B,b_pos,positive,6.0,3.0,Inf,30,,59\n\
             C,c_badmarker,wat,4.0,2.0,9.0,50,0.95,58\n\
             C,c_non,none,2.5,1.0,6.0,20,0.9,57\n"
        );
        let f = write_tmp(&csv);
        let (ds, report) = ingest(f.path()).unwrap();
        assert_eq!(report.input_rows, 6);
        assert_eq!(report.accepted, 4);
        assert_eq!(report.rejected.len(), 2);
        assert_eq!(report.accepted + report.rejected.len(), report.input_rows);
        assert!(report.rejected[0].reason.contains("interval ordering"));
        assert!(report.rejected[1].reason.contains("marker"));
        assert_eq!(report.conf_level_defaulted, 1);
        assert_eq!(ds.n_cohorts(), 4);
        assert_eq!(ds.covariate_names, vec!["age"]);
        // Inf upper bound survives as infinity
        let b = ds.cohorts.iter().find(|c| c.cohort_id == "b_pos").unwrap();
        assert!(b.upper.is_infinite());
    }

    #[test]
    fn header_must_match_exactly() {
        let f = write_tmp("study,cohort_id,marker,median,ci_lower,ci_upper,n,conf_level\n");
        assert!(ingest(f.path()).is_err());
        // median and ci_lower swapped
        let f = write_tmp("study_id,cohort_id,marker,ci_lower,median,ci_upper,n,conf_level\n");
        assert!(ingest(f.path()).is_err());
    }

    #[test]
    fn zero_valid_rows_is_an_error() {
        let csv = format!("{HEADER}\nA,a,positive,4.0,5.0,9.0,50,0.95\n");
        let f = write_tmp(&csv);
        assert!(ingest(f.path()).is_err());
    }

    #[test]
    fn categorical_covariates_expand_lexicographically() {
        let csv = format!(
            "{HEADER},cancer,dose\n\
             A,a1,positive,4.0,2.0,9.0,50,0.95,melanoma,10\n\
             A,a2,negative,3.0,1.5,7.0,40,0.95,lung,20\n\
             B,b1,positive,5.0,2.5,11.0,60,0.95,breast,15\n\
             B,b2,negative,4.5,2.0,10.0,55,0.95,melanoma,12\n"
        );
        let f = write_tmp(&csv);
        let (ds, report) = ingest(f.path()).unwrap();
        // baseline is the lexicographically first level: breast
        assert_eq!(ds.covariate_names, vec!["cancer_lung", "cancer_melanoma", "dose"]);
        assert_eq!(report.one_hot.len(), 1);
        assert_eq!(report.one_hot[0].baseline, "breast");
        assert_eq!(ds.cohorts[0].covariates, vec![0.0, 1.0, 10.0]);
        assert_eq!(ds.cohorts[1].covariates, vec![1.0, 0.0, 20.0]);
        assert_eq!(ds.cohorts[2].covariates, vec![0.0, 0.0, 15.0]);
    }

    #[test]
    fn duplicate_cohort_ids_reject_later_rows() {
        let csv = format!(
            "{HEADER}\n\
             A,dup,positive,4.0,2.0,9.0,50,0.95\n\
             A,dup,negative,3.0,1.5,7.0,40,0.95\n"
        );
        let f = write_tmp(&csv);
        let (ds, report) = ingest(f.path()).unwrap();
        assert_eq!(ds.n_cohorts(), 1);
        assert_eq!(report.rejected.len(), 1);
        assert!(report.rejected[0].reason.contains("duplicate"));
    }

    #[test]
    fn canonical_round_trip_is_idempotent() {
        let csv = format!(
            "{HEADER},cancer\n\
             A,a1,positive,4.0,2.0,9.0,50,0.95,melanoma\n\
             A,a2,negative,3.0,1.5,Inf,40,0.95,lung\n\
             B,b1,none,5.0,2.5,11.0,60,0.9,melanoma\n"
        );
        let f = write_tmp(&csv);
        let (ds1, _) = ingest(f.path()).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let out1 = dir.path().join("canon1.csv");
        write_canonical(&out1, &ds1).unwrap();
        let (ds2, report2) = ingest(&out1).unwrap();
        assert_eq!(report2.rejected.len(), 0);
        assert_eq!(ds2.covariate_names, ds1.covariate_names);

        let out2 = dir.path().join("canon2.csv");
        write_canonical(&out2, &ds2).unwrap();
        let bytes1 = std::fs::read(&out1).unwrap();
        let bytes2 = std::fs::read(&out2).unwrap();
        assert_eq!(bytes1, bytes2);
    }
}
