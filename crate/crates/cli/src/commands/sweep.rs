use std::fmt::Write as _;

use ordered_ridge::data::{evaluate, split_train_test, Dataset, SplitSpec};
use ordered_ridge::export::{fmt_f64, ResultSummary};
use rayon::prelude::*;

use crate::args::SweepArgs;
use crate::commands::fit::{run_model, ModelSpec};
use crate::config::{load_config, PenaltyKind, SweepConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{write_recorded, Manifest};

pub const SWEEP_HEADER: &str = "q,method,test_error,mse,genes,time_s,iterations,converged";

/// One (q, method) cell of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub q: f64,
    pub method: PenaltyKind,
    pub summary: ResultSummary,
}

impl SweepRow {
    fn misclassified(&self) -> f64 {
        self.summary
            .metrics
            .map_or(f64::NAN, |m| m.misclassified as f64)
    }

    fn mse(&self) -> f64 {
        self.summary.metrics.map_or(f64::NAN, |m| m.mse)
    }
}

fn run_cell(
    cfg: &SweepConfig,
    train: &Dataset,
    test: &Dataset,
    method: PenaltyKind,
    q: f64,
) -> CliResult<SweepRow> {
    let model = ModelSpec {
        kind: method,
        q: Some(q),
        mode: cfg.mode,
        alpha_en: cfg.alpha_en,
        lasso_fraction: cfg.lasso_fraction,
    };
    let (fit, spec) = run_model(&train.a, &train.b, &model, &cfg.solver)?;
    let mut summary = ResultSummary::from_fit(method.name(), &fit, spec, None);
    summary.metrics = Some(evaluate(&fit.coefficients, test)?);
    Ok(SweepRow { q, method, summary })
}

/// Fit every cell, in parallel when `cfg.parallel > 1`, and return the rows
/// sorted by method then q.
pub fn run_grid(cfg: &SweepConfig, train: &Dataset, test: &Dataset) -> CliResult<Vec<SweepRow>> {
    let cells: Vec<(PenaltyKind, f64)> = cfg
        .penalties
        .iter()
        .flat_map(|&m| cfg.q_grid.iter().map(move |&q| (m, q)))
        .collect();
    let mut rows = if cfg.parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallel)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", cfg.parallel)))?;
        pool.install(|| {
            cells
                .par_iter()
                .map(|&(m, q)| run_cell(cfg, train, test, m, q))
                .collect::<CliResult<Vec<_>>>()
        })?
    } else {
        cells
            .iter()
            .map(|&(m, q)| run_cell(cfg, train, test, m, q))
            .collect::<CliResult<Vec<_>>>()?
    };
    rows.sort_by(|a, b| a.method.cmp(&b.method).then(a.q.total_cmp(&b.q)));
    Ok(rows)
}

/// Table-shaped CSV: one row per cell, then one `average` row per method.
pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut s = String::new();
    writeln!(s, "{SWEEP_HEADER}").unwrap();
    for r in rows {
        let m = &r.summary;
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(r.q),
            r.method.name(),
            r.misclassified(),
            fmt_f64(r.mse()),
            m.nonzero_count,
            fmt_f64(m.wall_time_s),
            m.iterations,
            m.converged
        )
        .unwrap();
    }
    let mut methods: Vec<PenaltyKind> = rows.iter().map(|r| r.method).collect();
    methods.dedup();
    for method in methods {
        let group: Vec<&SweepRow> = rows.iter().filter(|r| r.method == method).collect();
        let k = group.len() as f64;
        let mean = |f: &dyn Fn(&SweepRow) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / k;
        writeln!(
            s,
            "average,{},{},{},{},{},{},{}",
            method.name(),
            fmt_f64(mean(&|r| r.misclassified())),
            fmt_f64(mean(&|r| r.mse())),
            fmt_f64(mean(&|r| r.summary.nonzero_count as f64)),
            fmt_f64(mean(&|r| r.summary.wall_time_s)),
            fmt_f64(mean(&|r| r.summary.iterations as f64)),
            group.iter().all(|r| r.summary.converged)
        )
        .unwrap();
    }
    s
}

pub fn cmd_sweep(args: &SweepArgs, argv: &[String]) -> CliResult<()> {
    let mut cfg: SweepConfig = load_config(args.config.as_deref())?;
    args.apply(&mut cfg);
    cfg.data.canonicalize()?;
    cfg.solver.validate()?;
    if cfg.q_grid.is_empty() || cfg.penalties.is_empty() {
        return Err(CliError::Usage("empty q grid or penalty list".into()));
    }
    let train_n = cfg
        .train_n
        .ok_or_else(|| CliError::Usage("--train-n is required".into()))?;

    let (data, fingerprint) = cfg.data.load()?;
    let split = SplitSpec {
        train_n,
        seed: cfg.split_seed,
        stratified: cfg.stratified,
        normalize: cfg.normalize,
    };
    let (train, test) = split_train_test(&data, &split)?;
    let rows = run_grid(&cfg, &train, &test)?;

    let out = &args.out.out;
    let mut manifest = Manifest::new("sweep", argv, &cfg)?;
    manifest.seeds.insert("split".into(), cfg.split_seed);
    manifest.dataset = Some(fingerprint);
    for r in &rows {
        let name = format!("{}-q{}", r.method.name(), r.q);
        let path = out.join("runs").join(format!("{name}.json"));
        let mut rec = write_recorded(&path, r.summary.to_json()?.as_bytes())?;
        rec.excludes = vec!["wall_time_s".into()];
        rec.sha256 = crate::commands::fit::result_checksum(&r.summary)?;
        manifest.outputs.insert(name, rec);
    }
    let table = render_csv(&rows);
    let mut rec = write_recorded(&out.join("sweep.csv"), table.as_bytes())?;
    rec.sha256 = crate::manifest::sha256_hex(strip_time_column(&table).as_bytes());
    rec.excludes = vec!["time_s".into()];
    manifest.outputs.insert("sweep".into(), rec);
    manifest.write(&out.join("sweep.manifest.json"))?;
    print!("{table}");
    Ok(())
}

/// The sweep CSV without its `time_s` column.
pub fn strip_time_column(table: &str) -> String {
    let col = SWEEP_HEADER.split(',').position(|c| c == "time_s").unwrap();
    table
        .lines()
        .map(|line| {
            let mut cells: Vec<&str> = line.split(',').collect();
            cells.remove(col);
            cells.join(",") + "\n"
        })
        .collect()
}
