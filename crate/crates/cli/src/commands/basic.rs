//! `synth`, `lambda` and `eval`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ordered_ridge::data::{evaluate, generate_synthetic, write_dataset_csv, SynthSpec};
use ordered_ridge::export::{
    read_coefficients_csv, write_coefficients_csv, write_lambda_csv, ResultSummary,
};
use ordered_ridge::lambda_seq::{lambda_table, BhqConfig};

use crate::args::{EvalArgs, LambdaArgs, SynthArgs};
use crate::config::LambdaConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::{write_file, write_recorded, Manifest, OutputRecord};

pub fn execute_synth(spec: &SynthSpec, out: &Path) -> CliResult<BTreeMap<String, OutputRecord>> {
    let (data, x0) = generate_synthetic(spec)?;
    let mut outputs = BTreeMap::new();
    let mut buf = Vec::new();
    write_dataset_csv(&mut buf, &data)?;
    outputs.insert("data".into(), write_recorded(&out.join("data.csv"), &buf)?);
    buf.clear();
    write_coefficients_csv(&mut buf, &x0)?;
    outputs.insert("x0".into(), write_recorded(&out.join("x0.csv"), &buf)?);
    Ok(outputs)
}

pub fn cmd_synth(args: &SynthArgs, argv: &[String]) -> CliResult<()> {
    let spec = SynthSpec {
        n: args.n,
        p: args.p,
        coef_variance: args.coef_var,
        noise_variance: args.noise_var,
        seed: args.seed,
    };
    let out = &args.out.out;
    let outputs = execute_synth(&spec, out)?;
    let mut manifest = Manifest::new("synth", argv, &spec)?;
    manifest.seeds.insert("synth".into(), spec.seed);
    manifest.outputs = outputs;
    manifest.write(&out.join("synth.manifest.json"))?;
    println!(
        "wrote {}×{} dataset to {}",
        spec.n,
        spec.p,
        out.join("data.csv").display()
    );
    Ok(())
}

pub fn execute_lambda(
    cfg: &LambdaConfig,
    out: &Path,
) -> CliResult<(BTreeMap<String, OutputRecord>, Option<usize>)> {
    let bhq = BhqConfig {
        q: cfg.q,
        p: cfg.p,
        mode: cfg.mode,
        length: cfg.length.unwrap_or_else(|| cfg.mode.max_length(cfg.p)),
        monotone_clip: cfg.clip,
    };
    let table = lambda_table(&bhq)?;
    let mut buf = Vec::new();
    write_lambda_csv(&mut buf, &table, cfg.clip)?;
    let mut outputs = BTreeMap::new();
    outputs.insert(
        "lambda".into(),
        write_recorded(&out.join("lambda.csv"), &buf)?,
    );
    Ok((outputs, table.first_increase()))
}

pub fn cmd_lambda(args: &LambdaArgs, argv: &[String]) -> CliResult<()> {
    let cfg = args.config();
    let out = &args.out.out;
    if cfg.length.is_none() && cfg.mode.max_length(cfg.p) < cfg.p {
        eprintln!(
            "note: {} admits at most {} terms for p = {}; writing that many",
            cfg.mode,
            cfg.mode.max_length(cfg.p),
            cfg.p
        );
    }
    let (outputs, increase) = execute_lambda(&cfg, out)?;
    if let Some(k) = increase {
        if cfg.clip {
            eprintln!(
                "note: corrected sequence increases at k = {k} ({}); written as its running minimum",
                cfg.mode
            );
        } else {
            eprintln!(
                "warning: corrected sequence is not monotone, first increase at k = {k} ({}); \
                 it is not a valid ordered penalty as written",
                cfg.mode
            );
        }
    }
    let mut manifest = Manifest::new("lambda", argv, &cfg)?;
    manifest.outputs = outputs;
    manifest.write(&out.join("lambda.manifest.json"))?;
    println!("wrote {}", out.join("lambda.csv").display());
    Ok(())
}

fn coefficients_of(args: &EvalArgs) -> CliResult<(Vec<f64>, PathBuf)> {
    let path = match (&args.result, &args.coefficients) {
        (Some(result), _) => {
            let text = fs::read_to_string(result).map_err(|e| CliError::io(result, e))?;
            let summary: ResultSummary = serde_json::from_str(&text)?;
            let rel = summary.coefficients_path.ok_or_else(|| {
                CliError::Usage(format!("{} names no coefficient file", result.display()))
            })?;
            result.parent().unwrap_or(Path::new(".")).join(rel)
        }
        (None, Some(c)) => c.clone(),
        (None, None) => return Err(CliError::Usage("give --result or --coefficients".into())),
    };
    let file = fs::File::open(&path).map_err(|e| CliError::io(&path, e))?;
    Ok((read_coefficients_csv(file)?, path))
}

pub fn cmd_eval(args: &EvalArgs, argv: &[String]) -> CliResult<()> {
    let mut source = args.source();
    source.canonicalize()?;
    let (test, fingerprint) = source.load()?;
    let (coefficients, coef_path) = coefficients_of(args)?;
    let metrics = evaluate(&coefficients, &test)?;

    let out = &args.out.out;
    let metrics_path = args
        .metrics_out
        .clone()
        .unwrap_or_else(|| out.join("metrics.json"));
    let json = serde_json::to_string_pretty(&metrics)?;
    let record = write_recorded(&metrics_path, json.as_bytes())?;

    let config = serde_json::json!({
        "data": source,
        "coefficients": coef_path.display().to_string(),
    });
    let mut manifest = Manifest::new("eval", argv, &config)?;
    manifest.dataset = Some(fingerprint);
    manifest.outputs.insert("metrics".into(), record);
    manifest.write(&out.join("eval.manifest.json"))?;
    println!("{json}");
    Ok(())
}

/// Write the replay comparison and fail if any checksum differs.
pub fn report_replay(
    command: &str,
    expected: &BTreeMap<String, OutputRecord>,
    actual: &BTreeMap<String, OutputRecord>,
    out: &Path,
) -> CliResult<()> {
    let mut rows = serde_json::Map::new();
    let mut differing = Vec::new();
    for (role, want) in expected {
        let got = actual.get(role).map(|r| r.sha256.as_str());
        let same = got == Some(want.sha256.as_str());
        if !same {
            differing.push(role.clone());
        }
        rows.insert(
            role.clone(),
            serde_json::json!({ "expected": want.sha256, "actual": got, "match": same }),
        );
    }
    let report = serde_json::json!({
        "command": command,
        "reproduced": differing.is_empty(),
        "outputs": rows,
    });
    let text = serde_json::to_string_pretty(&report)?;
    write_file(&out.join("replay.json"), text.as_bytes())?;
    println!("{text}");
    if differing.is_empty() {
        Ok(())
    } else {
        Err(CliError::NotReproduced(differing.join(", ")))
    }
}
