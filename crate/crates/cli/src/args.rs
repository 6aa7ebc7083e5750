use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ordered_ridge::SampleMode;

use crate::config::{DataFormat, DataSource, FitConfig, LambdaConfig, PenaltyKind, SweepConfig};

/// Ordered ridge regression, ordered elastic net and lasso fitted with ADMM.
#[derive(Debug, Parser)]
#[command(name = "ordridge", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic regression problem.
    Synth(SynthArgs),
    /// Write a BHq regularizing sequence.
    Lambda(LambdaArgs),
    /// Fit one penalized regression.
    Fit(FitArgs),
    /// Score coefficients on held-out data.
    Eval(EvalArgs),
    /// Run the q × method grid on a train/test split.
    Sweep(SweepArgs),
    /// Re-run a fit, synth or lambda manifest and compare output checksums.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutDir {
    /// Output directory.
    #[arg(long, env = "ORDRIDGE_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// Variance of the true coefficients.
    #[arg(long, default_value_t = 0.02)]
    pub coef_var: f64,
    /// Variance of the additive noise.
    #[arg(long, default_value_t = 1e-3)]
    pub noise_var: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub q: f64,
    /// Sample-size assumption: n=p, n=2p or n=<count>.
    #[arg(long, default_value = "n=2p")]
    pub mode: SampleMode,
    /// Number of terms (defaults to the longest valid for the mode, at most p).
    #[arg(long)]
    pub length: Option<usize>,
    /// Keep the corrected sequence as computed instead of its running minimum.
    #[arg(long)]
    pub no_clip: bool,
    #[command(flatten)]
    pub out: OutDir,
}

impl LambdaArgs {
    pub fn config(&self) -> LambdaConfig {
        LambdaConfig {
            p: self.p,
            q: self.q,
            mode: self.mode,
            length: self.length,
            clip: !self.no_clip,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset file (`b,a_1..a_p` CSV or LIBSVM).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
    /// Feature count for LIBSVM input (defaults to the largest index).
    #[arg(long)]
    pub n_features: Option<usize>,
    /// Map LIBSVM labels NEG,POS to −1,+1.
    #[arg(long, value_delimiter = ',')]
    pub labels: Option<Vec<String>>,
}

impl DataArgs {
    fn apply(&self, src: &mut DataSource) {
        if let Some(v) = &self.data {
            src.path = Some(v.clone());
        }
        if let Some(v) = self.format {
            src.format = v;
        }
        if let Some(v) = self.n_features {
            src.n_features = Some(v);
        }
        if let Some(v) = &self.labels {
            src.labels = Some(v.clone());
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub mode: Option<SampleMode>,
    /// Elastic-net mix: λ₁ = mix·λ, λ₂ = (1 − mix)·λ.
    #[arg(long)]
    pub alpha_en: Option<f64>,
    /// Lasso λ as a fraction of λ_max.
    #[arg(long)]
    pub lasso_fraction: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Over-relaxation parameter.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eps_abs: Option<f64>,
    #[arg(long)]
    pub eps_rel: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Keep every k-th trace row (0 keeps none).
    #[arg(long)]
    pub trace_every: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// JSON config; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub penalty: Option<PenaltyKind>,
    /// Target FDR level of the BHq sequence (ordered penalties).
    #[arg(long)]
    pub q: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Rescale columns to unit ℓ₂ norm before fitting.
    #[arg(long)]
    pub normalize: bool,
    #[command(flatten)]
    pub out: OutDir,
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    #[arg(long)]
    pub result_out: Option<PathBuf>,
}

impl FitArgs {
    pub fn apply(&self, cfg: &mut FitConfig) {
        self.data.apply(&mut cfg.data);
        if let Some(v) = self.penalty {
            cfg.penalty = v;
        }
        if let Some(v) = self.q {
            cfg.q = Some(v);
        }
        let m = &self.model;
        if let Some(v) = m.mode {
            cfg.mode = v;
        }
        if let Some(v) = m.alpha_en {
            cfg.alpha_en = v;
        }
        if let Some(v) = m.lasso_fraction {
            cfg.lasso_fraction = v;
        }
        apply_solver(m, &mut cfg.solver);
        if self.normalize {
            cfg.normalize = true;
        }
    }
}

fn apply_solver(m: &ModelArgs, s: &mut ordered_ridge::SolverConfig) {
    if let Some(v) = m.rho {
        s.rho = v;
    }
    if let Some(v) = m.alpha {
        s.alpha = v;
    }
    if let Some(v) = m.eps_abs {
        s.eps_abs = v;
    }
    if let Some(v) = m.eps_rel {
        s.eps_rel = v;
    }
    if let Some(v) = m.max_iter {
        s.max_iter = v;
    }
    if let Some(v) = m.trace_every {
        s.trace_every = v;
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Held-out dataset.
    #[arg(long)]
    pub data_test: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: DataFormat,
    #[arg(long)]
    pub n_features: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub labels: Option<Vec<String>>,
    /// Result JSON from `fit`; its coefficient file is read.
    #[arg(
        long,
        conflicts_with = "coefficients",
        required_unless_present = "coefficients"
    )]
    pub result: Option<PathBuf>,
    /// Coefficient CSV (`index,value`).
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    /// Metrics JSON path (defaults to `<out>/metrics.json`).
    #[arg(long)]
    pub metrics_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutDir,
}

impl EvalArgs {
    pub fn source(&self) -> DataSource {
        DataSource {
            path: Some(self.data_test.clone()),
            format: self.format,
            n_features: self.n_features,
            labels: self.labels.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON config; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub data: DataArgs,
    /// Training rows; the rest form the test set.
    #[arg(long)]
    pub train_n: Option<usize>,
    #[arg(long)]
    pub split_seed: Option<u64>,
    /// Keep class proportions in the training set.
    #[arg(long)]
    pub stratified: bool,
    /// Use the split as loaded, without column rescaling.
    #[arg(long)]
    pub no_normalize: bool,
    #[arg(long, value_delimiter = ',')]
    pub q_grid: Option<Vec<f64>>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub penalties: Option<Vec<PenaltyKind>>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Worker threads; 1 runs the grid sequentially.
    #[arg(long)]
    pub parallel: Option<usize>,
    #[command(flatten)]
    pub out: OutDir,
}

impl SweepArgs {
    pub fn apply(&self, cfg: &mut SweepConfig) {
        self.data.apply(&mut cfg.data);
        if let Some(v) = self.train_n {
            cfg.train_n = Some(v);
        }
        if let Some(v) = self.split_seed {
            cfg.split_seed = v;
        }
        if self.stratified {
            cfg.stratified = true;
        }
        if self.no_normalize {
            cfg.normalize = false;
        }
        if let Some(v) = &self.q_grid {
            cfg.q_grid = v.clone();
        }
        if let Some(v) = &self.penalties {
            cfg.penalties = v.clone();
        }
        let m = &self.model;
        if let Some(v) = m.mode {
            cfg.mode = v;
        }
        if let Some(v) = m.alpha_en {
            cfg.alpha_en = v;
        }
        if let Some(v) = m.lasso_fraction {
            cfg.lasso_fraction = v;
        }
        apply_solver(m, &mut cfg.solver);
        if let Some(v) = self.parallel {
            cfg.parallel = v;
        }
    }
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    #[command(flatten)]
    pub out: OutDir,
}
