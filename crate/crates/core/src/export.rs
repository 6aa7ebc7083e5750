//! Machine-readable outputs: trace CSV, λ-sequence CSV, coefficient CSV and
//! the result summary JSON.
//!
//! CSV numbers carry 17 significant digits so they parse back to the same
//! `f64`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::data::Metrics;
use crate::error::{Error, Result};
use crate::lambda_seq::{LambdaTable, SampleMode};
use crate::solver::{FitResult, TraceRecord};

/// `f64` with 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const TRACE_HEADER: [&str; 6] = [
    "iter",
    "r_norm",
    "s_norm",
    "eps_pri",
    "eps_dual",
    "objective",
];

pub fn write_trace_csv<W: Write>(w: W, trace: &[TraceRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRACE_HEADER)?;
    for t in trace {
        out.write_record([
            t.iter.to_string(),
            fmt_f64(t.r_norm),
            fmt_f64(t.s_norm),
            fmt_f64(t.eps_pri),
            fmt_f64(t.eps_dual),
            fmt_f64(t.objective),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(r: R) -> Result<Vec<TraceRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != TRACE_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected trace header {header:?}"),
        });
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// `k,lambda_bh,lambda`; the last column is clipped when `clip` is set.
pub fn write_lambda_csv<W: Write>(w: W, table: &LambdaTable, clip: bool) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "lambda_bh", "lambda"])?;
    let lam = if clip {
        table.clipped()
    } else {
        table.raw.clone()
    };
    for (k, (bh, l)) in table.bh.iter().zip(&lam).enumerate() {
        out.write_record([(k + 1).to_string(), fmt_f64(*bh), fmt_f64(*l)])?;
    }
    out.flush()?;
    Ok(())
}

/// `index,value` with 1-based indices.
pub fn write_coefficients_csv<W: Write>(w: W, coefficients: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "value"])?;
    for (j, v) in coefficients.iter().enumerate() {
        out.write_record([(j + 1).to_string(), fmt_f64(*v)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_coefficients_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let idx: usize = rec.get(0).unwrap_or("").parse().map_err(|_| Error::Parse {
            line: line + 2,
            message: "bad coefficient index".into(),
        })?;
        if idx != out.len() + 1 {
            return Err(Error::Index {
                line: line + 2,
                message: format!("expected index {}, found {idx}", out.len() + 1),
            });
        }
        let v: f64 = rec.get(1).unwrap_or("").parse().map_err(|_| Error::Parse {
            line: line + 2,
            message: "bad coefficient value".into(),
        })?;
        out.push(v);
    }
    Ok(out)
}

/// How the penalty weights of a run were chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaSpec {
    Bhq {
        q: f64,
        mode: SampleMode,
        length: usize,
        clip: bool,
        lambda_first: f64,
        lambda_last: f64,
    },
    Scalar {
        lambda: f64,
        lambda_max: f64,
        fraction_of_max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSummary {
    pub penalty: String,
    pub converged: bool,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub nonzero_count: usize,
    pub coefficients_path: Option<String>,
    pub lambda_spec: LambdaSpec,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metrics: Option<Metrics>,
}

impl ResultSummary {
    pub fn from_fit(
        penalty: &str,
        fit: &FitResult,
        lambda_spec: LambdaSpec,
        coefficients_path: Option<String>,
    ) -> Self {
        Self {
            penalty: penalty.to_string(),
            converged: fit.converged,
            iterations: fit.iterations,
            wall_time_s: fit.wall_time.as_secs_f64(),
            nonzero_count: fit.nonzero_count,
            coefficients_path,
            lambda_spec,
            metrics: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
