//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exported: BHq regularizing sequences, an ADMM fit on
//! synthetic data with its residual trace, and the shrinkage operators
//! applied to a user-supplied vector. Each has a plain Rust counterpart
//! returning `Result<_, String>` so it can be tested off the browser.

use ordered_ridge::data::{generate_synthetic, SynthSpec};
use ordered_ridge::lambda_seq::{lambda_table, sorted_lambda_sequence};
use ordered_ridge::penalty::{
    prox_oracle_small, shrink_objective, shrink_ordered_elastic_net, shrink_ordered_l2,
    OrderStatisticView, RegularizationSequence, ORACLE_MAX_LEN,
};
use ordered_ridge::solver::{compute_lambda_max, fit, Penalty};
use ordered_ridge::{BhqConfig, SampleMode, SolverConfig};
use wasm_bindgen::prelude::*;

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[wasm_bindgen]
pub struct LambdaCurves {
    bh: Vec<f64>,
    raw: Vec<f64>,
    clipped: Vec<f64>,
    first_increase: Option<u32>,
}

#[wasm_bindgen]
impl LambdaCurves {
    /// Uncorrected `λ_BH(k)`.
    #[wasm_bindgen(getter)]
    pub fn bh(&self) -> Vec<f64> {
        self.bh.clone()
    }

    /// Corrected sequence as computed.
    #[wasm_bindgen(getter)]
    pub fn raw(&self) -> Vec<f64> {
        self.raw.clone()
    }

    /// Running minimum of `raw`.
    #[wasm_bindgen(getter)]
    pub fn clipped(&self) -> Vec<f64> {
        self.clipped.clone()
    }

    /// 1-based `k` where `raw` first increases.
    #[wasm_bindgen(getter, js_name = firstIncrease)]
    pub fn first_increase(&self) -> Option<u32> {
        self.first_increase
    }
}

/// Sequence of the longest valid length for `mode` (`"n=p"`, `"n=2p"`, `"n=72"`).
pub fn compute_lambda_curves(p: usize, q: f64, mode: &str) -> Result<LambdaCurves, String> {
    let mode: SampleMode = mode.parse().map_err(text)?;
    let mut cfg = BhqConfig::new(q, p, mode);
    cfg.length = mode.max_length(p);
    let table = lambda_table(&cfg).map_err(text)?;
    Ok(LambdaCurves {
        first_increase: table.first_increase().map(|k| k as u32),
        clipped: table.clipped(),
        bh: table.bh,
        raw: table.raw,
    })
}

#[wasm_bindgen(js_name = lambdaCurves)]
pub fn lambda_curves(p: usize, q: f64, mode: &str) -> Result<LambdaCurves, JsError> {
    compute_lambda_curves(p, q, mode).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct ConvergenceRun {
    iterations: u32,
    converged: bool,
    nonzero: u32,
    r_norm: Vec<f64>,
    s_norm: Vec<f64>,
    eps_pri: Vec<f64>,
    eps_dual: Vec<f64>,
    objective: Vec<f64>,
    coefficients: Vec<f64>,
    truth: Vec<f64>,
}

#[wasm_bindgen]
impl ConvergenceRun {
    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }

    #[wasm_bindgen(getter)]
    pub fn nonzero(&self) -> u32 {
        self.nonzero
    }

    #[wasm_bindgen(getter, js_name = rNorm)]
    pub fn r_norm(&self) -> Vec<f64> {
        self.r_norm.clone()
    }

    #[wasm_bindgen(getter, js_name = sNorm)]
    pub fn s_norm(&self) -> Vec<f64> {
        self.s_norm.clone()
    }

    #[wasm_bindgen(getter, js_name = epsPri)]
    pub fn eps_pri(&self) -> Vec<f64> {
        self.eps_pri.clone()
    }

    #[wasm_bindgen(getter, js_name = epsDual)]
    pub fn eps_dual(&self) -> Vec<f64> {
        self.eps_dual.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn objective(&self) -> Vec<f64> {
        self.objective.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn coefficients(&self) -> Vec<f64> {
        self.coefficients.clone()
    }

    /// Coefficients the synthetic response was generated from.
    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<f64> {
        self.truth.clone()
    }
}

/// Settings for [`compute_convergence_run`].
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub penalty: String,
    pub n: usize,
    pub p: usize,
    pub q: f64,
    pub seed: u64,
    pub rho: f64,
    pub alpha: f64,
    pub alpha_en: f64,
    pub max_iter: usize,
}

/// Fit `ol2`, `oenet` or `lasso` (λ = 0.1·λ_max) on fresh synthetic data.
pub fn compute_convergence_run(spec: &RunSpec) -> Result<ConvergenceRun, String> {
    let (data, truth) =
        generate_synthetic(&SynthSpec::new(spec.n, spec.p, spec.seed)).map_err(text)?;
    let ordered = || {
        sorted_lambda_sequence(&BhqConfig::new(spec.q, spec.p, SampleMode::NEqualsTwoP))
            .map_err(text)
    };
    let penalty = match spec.penalty.as_str() {
        "ol2" => Penalty::ordered_l2(ordered()?),
        "oenet" => Penalty::ordered_elastic_net(&ordered()?, spec.alpha_en).map_err(text)?,
        "lasso" => {
            let lmax = compute_lambda_max(&data.a, &data.b).map_err(text)?;
            Penalty::lasso(0.1 * lmax).map_err(text)?
        }
        other => return Err(format!("unknown penalty `{other}`")),
    };
    let cfg = SolverConfig {
        rho: spec.rho,
        alpha: spec.alpha,
        max_iter: spec.max_iter,
        ..SolverConfig::default()
    };
    let result = fit(&data.a, &data.b, &penalty, &cfg).map_err(text)?;
    let column = |f: fn(&ordered_ridge::TraceRecord) -> f64| result.trace.iter().map(f).collect();
    Ok(ConvergenceRun {
        iterations: result.iterations as u32,
        converged: result.converged,
        nonzero: result.nonzero_count as u32,
        r_norm: column(|t| t.r_norm),
        s_norm: column(|t| t.s_norm),
        eps_pri: column(|t| t.eps_pri),
        eps_dual: column(|t| t.eps_dual),
        objective: column(|t| t.objective),
        coefficients: result.coefficients.into_vec(),
        truth: truth.into_vec(),
    })
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = convergenceRun)]
pub fn convergence_run(
    penalty: &str,
    n: usize,
    p: usize,
    q: f64,
    seed: u32,
    rho: f64,
    alpha: f64,
    alpha_en: f64,
    max_iter: usize,
) -> Result<ConvergenceRun, JsError> {
    let spec = RunSpec {
        penalty: penalty.to_string(),
        n,
        p,
        q,
        seed: seed.into(),
        rho,
        alpha,
        alpha_en,
        max_iter,
    };
    compute_convergence_run(&spec).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct ShrinkComparison {
    rank_matched: Vec<f64>,
    exact: Vec<f64>,
    elastic_net: Vec<f64>,
    order_preserved: bool,
    objective_gap: f64,
}

#[wasm_bindgen]
impl ShrinkComparison {
    /// `ρvⱼ/(λ_rank + ρ)`.
    #[wasm_bindgen(getter, js_name = rankMatched)]
    pub fn rank_matched(&self) -> Vec<f64> {
        self.rank_matched.clone()
    }

    /// Exhaustive-search proximal point; empty above the oracle size limit.
    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }

    #[wasm_bindgen(getter, js_name = elasticNet)]
    pub fn elastic_net(&self) -> Vec<f64> {
        self.elastic_net.clone()
    }

    /// Whether the rank-matched output keeps the input's magnitude order.
    #[wasm_bindgen(getter, js_name = orderPreserved)]
    pub fn order_preserved(&self) -> bool {
        self.order_preserved
    }

    /// Relative excess of the rank-matched objective over the exact one
    /// (NaN without an exact solution).
    #[wasm_bindgen(getter, js_name = objectiveGap)]
    pub fn objective_gap(&self) -> f64 {
        self.objective_gap
    }
}

/// Apply the ordered ℓ₂ shrink, its exact counterpart (up to six entries)
/// and the ordered elastic-net shrink with mix `alpha_en` to `v`.
pub fn compute_shrink_comparison(
    v: &[f64],
    lambda: &[f64],
    rho: f64,
    alpha_en: f64,
) -> Result<ShrinkComparison, String> {
    let lam = RegularizationSequence::new(lambda.to_vec()).map_err(text)?;
    let z = shrink_ordered_l2(v, &lam, rho).map_err(text)?;
    let l1 = lam.scaled(alpha_en).map_err(text)?;
    let l2 = lam.scaled(1.0 - alpha_en).map_err(text)?;
    let en = shrink_ordered_elastic_net(v, &l1, &l2, rho).map_err(text)?;
    let order = OrderStatisticView::of(v).permutation;
    let order_preserved = order.windows(2).all(|w| z[w[0]].abs() >= z[w[1]].abs());
    let (exact, objective_gap) = if v.len() <= ORACLE_MAX_LEN {
        let o = prox_oracle_small(v, &lam, rho).map_err(text)?;
        let fz = shrink_objective(&z, v, &lam, rho).map_err(text)?;
        let fo = shrink_objective(&o, v, &lam, rho).map_err(text)?;
        let gap = if fo > 0.0 { (fz - fo) / fo } else { 0.0 };
        (o.into_vec(), gap)
    } else {
        (Vec::new(), f64::NAN)
    };
    Ok(ShrinkComparison {
        rank_matched: z.into_vec(),
        exact,
        elastic_net: en.into_vec(),
        order_preserved,
        objective_gap,
    })
}

#[wasm_bindgen(js_name = shrinkComparison)]
pub fn shrink_comparison(
    v: &[f64],
    lambda: &[f64],
    rho: f64,
    alpha_en: f64,
) -> Result<ShrinkComparison, JsError> {
    compute_shrink_comparison(v, lambda, rho, alpha_en).map_err(|e| JsError::new(&e))
}
