use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{EnsembleSpec, SampleMode};
use crate::error::{parse_err, Error, Result};

/// An empirical average paired with its predicted value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub statistic: String,
    pub q: u32,
    pub g: usize,
    /// Parameters of the statistic, enough to re-run it.
    pub params: String,
    pub empirical: Complex64,
    pub predicted: Complex64,
    pub abs_err: f64,
    /// `|empirical - predicted| / max(|predicted|, 1e-300)`.
    pub rel_err: f64,
    /// Size of the proven error term, constants and
    /// epsilons omitted.
    pub predicted_error_scale: f64,
    pub std_err: f64,
    pub n_excluded: u64,
    pub mode: SampleMode,
    pub runtime_s: f64,
}

impl EnsembleReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        statistic: &str,
        spec: &EnsembleSpec,
        params: String,
        empirical: Complex64,
        predicted: Complex64,
        predicted_error_scale: f64,
        std_err: f64,
        n_excluded: u64,
    ) -> Self {
        let abs_err = (empirical - predicted).norm();
        Self {
            statistic: statistic.to_string(),
            q: spec.field.q(),
            g: spec.g,
            params,
            empirical,
            predicted,
            abs_err,
            rel_err: abs_err / predicted.norm().max(1e-300),
            predicted_error_scale,
            std_err,
            n_excluded,
            mode: spec.mode,
            runtime_s: 0.0,
        }
    }

    pub fn row(&self) -> ReportRow {
        ReportRow {
            statistic: self.statistic.clone(),
            q: self.q,
            g: self.g,
            params: self.params.clone(),
            empirical_re: self.empirical.re,
            empirical_im: self.empirical.im,
            predicted_re: self.predicted.re,
            predicted_im: self.predicted.im,
            abs_err: self.abs_err,
            rel_err: self.rel_err,
            predicted_error_scale: self.predicted_error_scale,
            n_excluded: self.n_excluded,
            mode: self.mode.to_string(),
            seed: self.mode.seed(),
            runtime_s: self.runtime_s,
            std_err: self.std_err,
        }
    }
}

/// Flat CSV/JSON record of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub statistic: String,
    pub q: u32,
    pub g: usize,
    pub params: String,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub predicted_re: f64,
    pub predicted_im: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub predicted_error_scale: f64,
    pub n_excluded: u64,
    pub mode: String,
    pub seed: Option<u64>,
    pub runtime_s: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(parse_err(s, "expected csv or json")),
        }
    }
}

/// Writes any serializable rows as CSV (with header) or as a JSON array.
pub fn write_reports<T: Serialize, W: Write>(rows: &[T], format: OutputFormat, mut out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::FieldParams;

    #[test]
    fn csv_and_json_keys() {
        let spec = EnsembleSpec::sampled(FieldParams::new(5).unwrap(), 2, 10, 3).unwrap();
        let r = EnsembleReport::new(
            "ratio",
            &spec,
            "A=0.1 B=0.3".into(),
            Complex64::new(1.0, 0.5),
            Complex64::new(2.0, 0.5),
            1e-3,
            0.01,
            0,
        );
        assert_eq!(r.rel_err, 1.0 / Complex64::new(2.0, 0.5).norm());
        let mut buf = Vec::new();
        write_reports(&[r.row()], OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "statistic,q,g,params,empirical_re,empirical_im,predicted_re,predicted_im,abs_err,rel_err,\
             predicted_error_scale,n_excluded,mode,seed,runtime_s,std_err"
        );
        assert!(text.contains("sample:10,3,"));
        let mut buf = Vec::new();
        write_reports(&[r.row()], OutputFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let keys: Vec<&str> = header.split(',').collect();
        for k in keys {
            assert!(v[0].get(k).is_some(), "{k}");
        }
    }
}
