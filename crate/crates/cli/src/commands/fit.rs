use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ordered_ridge::export::{write_coefficients_csv, write_trace_csv, LambdaSpec, ResultSummary};
use ordered_ridge::lambda_seq::{sorted_lambda_sequence, BhqConfig};
use ordered_ridge::linalg::DenseMatrix;
use ordered_ridge::solver::{compute_lambda_max, fit, FitResult, Penalty};
use ordered_ridge::{SampleMode, SolverConfig};

use crate::args::FitArgs;
use crate::config::{load_config, FitConfig, PenaltyKind};
use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, write_recorded, Fingerprint, Manifest, OutputRecord};

pub struct FitPaths {
    pub trace: PathBuf,
    pub result: PathBuf,
    pub coefficients: PathBuf,
}

impl FitPaths {
    pub fn in_dir(out: &Path) -> Self {
        Self {
            trace: out.join("trace.csv"),
            result: out.join("result.json"),
            coefficients: out.join("coefficients.csv"),
        }
    }
}

pub struct FitRun {
    pub summary: ResultSummary,
    pub fit: FitResult,
    pub dataset: Fingerprint,
    pub outputs: BTreeMap<String, OutputRecord>,
}

/// The penalty of one run and how its weights were chosen.
pub struct ModelSpec {
    pub kind: PenaltyKind,
    pub q: Option<f64>,
    pub mode: SampleMode,
    pub alpha_en: f64,
    pub lasso_fraction: f64,
}

impl ModelSpec {
    pub fn build(&self, a: &DenseMatrix, b: &[f64]) -> CliResult<(Penalty, LambdaSpec)> {
        if self.kind == PenaltyKind::Lasso {
            if !(self.lasso_fraction > 0.0 && self.lasso_fraction.is_finite()) {
                return Err(CliError::Usage(format!(
                    "lasso fraction must be positive, got {}",
                    self.lasso_fraction
                )));
            }
            let lambda_max = compute_lambda_max(a, b)?;
            let lambda = self.lasso_fraction * lambda_max;
            let spec = LambdaSpec::Scalar {
                lambda,
                lambda_max,
                fraction_of_max: self.lasso_fraction,
            };
            return Ok((Penalty::lasso(lambda)?, spec));
        }
        let q = self.q.ok_or_else(|| {
            CliError::Usage(format!(
                "--q is required for the {} penalty",
                self.kind.name()
            ))
        })?;
        let cfg = BhqConfig::new(q, a.cols(), self.mode);
        let lam = sorted_lambda_sequence(&cfg)?;
        let spec = LambdaSpec::Bhq {
            q,
            mode: self.mode,
            length: cfg.length,
            clip: cfg.monotone_clip,
            lambda_first: lam.values()[0],
            lambda_last: *lam.values().last().expect("p ≥ 1"),
        };
        let penalty = match self.kind {
            PenaltyKind::Ol2 => Penalty::ordered_l2(lam),
            _ => Penalty::ordered_elastic_net(&lam, self.alpha_en)?,
        };
        Ok((penalty, spec))
    }
}

impl FitConfig {
    pub fn model(&self) -> ModelSpec {
        ModelSpec {
            kind: self.penalty,
            q: self.q,
            mode: self.mode,
            alpha_en: self.alpha_en,
            lasso_fraction: self.lasso_fraction,
        }
    }
}

pub fn run_model(
    a: &DenseMatrix,
    b: &[f64],
    model: &ModelSpec,
    solver: &SolverConfig,
) -> CliResult<(FitResult, LambdaSpec)> {
    let (penalty, spec) = model.build(a, b)?;
    Ok((fit(a, b, &penalty, solver)?, spec))
}

/// Hash of the result JSON with the wall-clock time zeroed.
pub fn result_checksum(summary: &ResultSummary) -> CliResult<String> {
    let mut timeless = summary.clone();
    timeless.wall_time_s = 0.0;
    Ok(sha256_hex(timeless.to_json()?.as_bytes()))
}

/// Load, fit and write trace, coefficients and result.
pub fn execute_fit(cfg: &FitConfig, paths: &FitPaths) -> CliResult<FitRun> {
    let (data, dataset) = cfg.data.load()?;
    let data = if cfg.normalize {
        data.normalized()?.0
    } else {
        data
    };
    let (fit, spec) = run_model(&data.a, &data.b, &cfg.model(), &cfg.solver)?;

    let mut outputs = BTreeMap::new();
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, &fit.trace)?;
    outputs.insert("trace".into(), write_recorded(&paths.trace, &buf)?);

    buf.clear();
    write_coefficients_csv(&mut buf, &fit.coefficients)?;
    outputs.insert(
        "coefficients".into(),
        write_recorded(&paths.coefficients, &buf)?,
    );

    let coefficients_path = if paths.coefficients.parent() == paths.result.parent() {
        paths
            .coefficients
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
    } else {
        Some(paths.coefficients.display().to_string())
    };
    let summary = ResultSummary::from_fit(cfg.penalty.name(), &fit, spec, coefficients_path);
    let mut record = write_recorded(&paths.result, summary.to_json()?.as_bytes())?;
    record.sha256 = result_checksum(&summary)?;
    record.excludes = vec!["wall_time_s".into()];
    outputs.insert("result".into(), record);

    Ok(FitRun {
        summary,
        fit,
        dataset,
        outputs,
    })
}

pub fn cmd_fit(args: &FitArgs, argv: &[String]) -> CliResult<()> {
    let mut cfg: FitConfig = load_config(args.config.as_deref())?;
    args.apply(&mut cfg);
    cfg.data.canonicalize()?;
    cfg.solver.validate()?;

    let out = &args.out.out;
    let mut paths = FitPaths::in_dir(out);
    if let Some(p) = &args.trace_out {
        paths.trace = p.clone();
    }
    if let Some(p) = &args.result_out {
        paths.result = p.clone();
        paths.coefficients = p.with_file_name("coefficients.csv");
    }
    let run = execute_fit(&cfg, &paths)?;

    let mut manifest = Manifest::new("fit", argv, &cfg)?;
    manifest.dataset = Some(run.dataset);
    manifest.outputs = run.outputs;
    manifest.write(&out.join("fit.manifest.json"))?;

    let s = &run.summary;
    println!(
        "{}: converged={} iterations={} nonzero={} wall_time_s={:.3}",
        s.penalty, s.converged, s.iterations, s.nonzero_count, s.wall_time_s
    );
    Ok(())
}
