//! Resolved run configurations. Each one is read from an optional JSON file
//! (missing keys take defaults), overridden by flags, and echoed verbatim
//! into the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ordered_ridge::data::{map_labels_binary, read_dataset_csv, read_libsvm, Dataset};
use ordered_ridge::{SampleMode, SolverConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, Fingerprint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyKind {
    /// Ordered ℓ₂ (ordered ridge).
    Ol2,
    /// Ordered elastic net.
    Oenet,
    /// ℓ₁ with λ = fraction·λ_max.
    Lasso,
}

impl PenaltyKind {
    pub fn name(self) -> &'static str {
        match self {
            PenaltyKind::Ol2 => "ol2",
            PenaltyKind::Oenet => "oenet",
            PenaltyKind::Lasso => "lasso",
        }
    }

    pub fn is_ordered(self) -> bool {
        !matches!(self, PenaltyKind::Lasso)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    /// `.csv` files as CSV, everything else as LIBSVM.
    #[default]
    Auto,
    Csv,
    Libsvm,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataSource {
    pub path: Option<PathBuf>,
    pub format: DataFormat,
    pub n_features: Option<usize>,
    /// `[negative, positive]` LIBSVM labels mapped to −1 / +1.
    pub labels: Option<Vec<String>>,
}

impl DataSource {
    /// Parse the file and fingerprint its bytes.
    pub fn load(&self) -> CliResult<(Dataset, Fingerprint)> {
        let path = self
            .path
            .as_deref()
            .ok_or_else(|| CliError::Usage("no dataset given (--data)".into()))?;
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        let format = match self.format {
            DataFormat::Auto if has_extension(path, "csv") => DataFormat::Csv,
            DataFormat::Auto => DataFormat::Libsvm,
            f => f,
        };
        let d = match format {
            DataFormat::Csv => read_dataset_csv(bytes.as_slice())?,
            _ => {
                let rows = read_libsvm(bytes.as_slice(), self.n_features)?;
                match self.labels.as_deref() {
                    Some([neg, pos]) => {
                        let b = map_labels_binary(&rows.labels, neg, pos)?;
                        Dataset::new(rows.a, b)?
                    }
                    Some(other) => {
                        return Err(CliError::Usage(format!(
                            "--labels takes exactly two classes, got {}",
                            other.len()
                        )))
                    }
                    None => rows.into_dataset()?,
                }
            }
        };
        let fp = Fingerprint {
            path: path.display().to_string(),
            n: d.n(),
            p: d.p(),
            sha256: sha256_hex(&bytes),
        };
        Ok((d, fp))
    }

    /// Absolute data path so a manifest can be replayed from anywhere.
    pub fn canonicalize(&mut self) -> CliResult<()> {
        if let Some(p) = &self.path {
            self.path = Some(fs::canonicalize(p).map_err(|e| CliError::io(p, e))?);
        }
        Ok(())
    }
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub data: DataSource,
    pub normalize: bool,
    pub penalty: PenaltyKind,
    pub q: Option<f64>,
    pub mode: SampleMode,
    pub alpha_en: f64,
    pub lasso_fraction: f64,
    pub solver: SolverConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            data: DataSource::default(),
            normalize: false,
            penalty: PenaltyKind::Ol2,
            q: None,
            mode: SampleMode::NEqualsTwoP,
            alpha_en: 0.1,
            lasso_fraction: 0.1,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub data: DataSource,
    pub train_n: Option<usize>,
    pub split_seed: u64,
    pub stratified: bool,
    pub normalize: bool,
    pub q_grid: Vec<f64>,
    pub penalties: Vec<PenaltyKind>,
    pub mode: SampleMode,
    pub alpha_en: f64,
    pub lasso_fraction: f64,
    pub solver: SolverConfig,
    pub parallel: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            data: DataSource::default(),
            train_n: None,
            split_seed: 0,
            stratified: false,
            normalize: true,
            q_grid: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            penalties: vec![PenaltyKind::Ol2, PenaltyKind::Oenet],
            mode: SampleMode::NEqualsTwoP,
            alpha_en: 0.1,
            lasso_fraction: 0.1,
            solver: SolverConfig::default(),
            parallel: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaConfig {
    pub p: usize,
    pub q: f64,
    pub mode: SampleMode,
    pub length: Option<usize>,
    pub clip: bool,
}

/// Defaults overlaid with the JSON file at `path`, if any.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config {
                path: p.display().to_string(),
                message: e.to_string(),
            })
        }
    }
}
