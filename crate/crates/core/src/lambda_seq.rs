//! BHq-style regularizing sequences.
//!
//! `λ_BH(k) = Φ⁻¹(1 − q·k/(2p))`, and for `k ≥ 2` the corrected value
//! `λ_k = λ_BH(k)·√(1 + Σ_{j<k} λ_BH(j)² / D_k)` where the denominator `D_k`
//! depends on [`SampleMode`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::penalty::RegularizationSequence;

// Acklam's rational approximation, relative error below 1.2e-9 before
// refinement.
#[allow(clippy::excessive_precision)]
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

fn acklam(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Complementary error function.
///
/// Power series of `erf` below 2.5, Lentz-evaluated continued fraction above.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.5 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

// erf(x) = 2/√π · e^{-x²} · Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1)); all terms positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

// erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))).
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..1000 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        d = if d.abs() < TINY { TINY } else { d };
        c = x + a / c;
        c = if c.abs() < TINY { TINY } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal quantile `Φ⁻¹(α)`.
///
/// Rational initial guess refined by one Halley step. Upper-half arguments
/// are reflected so every refinement runs in the lower tail, where
/// `1 − α` is exact.
pub fn inv_norm_cdf(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfDomain {
            what: "inv_norm_cdf",
            value: alpha,
        });
    }
    if alpha > 0.5 {
        return Ok(-lower_quantile(1.0 - alpha));
    }
    Ok(lower_quantile(alpha))
}

fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let x = acklam(p);
    let e = norm_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// `λ_BH(k) = Φ⁻¹(1 − q·k/(2p))`.
pub fn bh_lambda(k: usize, p: usize, q: f64) -> Result<f64> {
    if k == 0 || p == 0 {
        return Err(Error::InvalidParameter(format!(
            "k and p must be positive, got k = {k}, p = {p}"
        )));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::OutOfDomain {
            what: "bh_lambda (q)",
            value: q,
        });
    }
    let tail = q * k as f64 / (2.0 * p as f64);
    if tail >= 0.5 {
        return Err(Error::OutOfDomain {
            what: "bh_lambda (q·k/2p)",
            value: tail,
        });
    }
    inv_norm_cdf(1.0 - tail)
}

/// Sample size assumed by the correction denominator.
///
/// Serialized as its display form (`n=p`, `n=2p`, `n=72`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SampleMode {
    /// `D_k = p − k − 1`.
    NEqualsP,
    /// `D_k = 2p − k − 1`.
    NEqualsTwoP,
    /// `D_k = n − k`.
    Explicit(usize),
}

impl SampleMode {
    pub fn denominator(self, k: usize, p: usize) -> i64 {
        let (k, p) = (k as i64, p as i64);
        match self {
            SampleMode::NEqualsP => p - k - 1,
            SampleMode::NEqualsTwoP => 2 * p - k - 1,
            SampleMode::Explicit(n) => n as i64 - k,
        }
    }

    /// Longest sequence whose denominators stay positive (at least 1 and
    /// at most `p`).
    pub fn max_length(self, p: usize) -> usize {
        let limit = match self {
            SampleMode::NEqualsP => p.saturating_sub(2),
            SampleMode::NEqualsTwoP => (2 * p).saturating_sub(2),
            SampleMode::Explicit(n) => n.saturating_sub(1),
        };
        limit.clamp(1, p.max(1))
    }
}

impl std::fmt::Display for SampleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SampleMode::NEqualsP => write!(f, "n=p"),
            SampleMode::NEqualsTwoP => write!(f, "n=2p"),
            SampleMode::Explicit(n) => write!(f, "n={n}"),
        }
    }
}

impl std::str::FromStr for SampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rest = s.trim().strip_prefix("n=").unwrap_or(s.trim());
        match rest {
            "p" => Ok(SampleMode::NEqualsP),
            "2p" => Ok(SampleMode::NEqualsTwoP),
            other => other
                .parse::<usize>()
                .map(SampleMode::Explicit)
                .map_err(|_| Error::InvalidParameter(format!("unknown sample mode `{s}`"))),
        }
    }
}

impl From<SampleMode> for String {
    fn from(m: SampleMode) -> Self {
        m.to_string()
    }
}

impl TryFrom<String> for SampleMode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BhqConfig {
    pub q: f64,
    pub p: usize,
    pub mode: SampleMode,
    pub length: usize,
    pub monotone_clip: bool,
}

impl BhqConfig {
    /// Full-length sequence (`K = p`) with clipping on.
    pub fn new(q: f64, p: usize, mode: SampleMode) -> Self {
        Self {
            q,
            p,
            mode,
            length: p,
            monotone_clip: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "q must lie in (0, 1], got {}",
                self.q
            )));
        }
        if self.length == 0 || self.length > self.p {
            return Err(Error::InvalidParameter(format!(
                "sequence length must lie in [1, p = {}], got {}",
                self.p, self.length
            )));
        }
        Ok(())
    }
}

/// Uncorrected and corrected values for `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTable {
    pub bh: Vec<f64>,
    pub raw: Vec<f64>,
}

impl LambdaTable {
    /// 1-based `k` of the first increase in the corrected sequence.
    pub fn first_increase(&self) -> Option<usize> {
        self.raw.windows(2).position(|w| w[1] > w[0]).map(|i| i + 2)
    }

    /// Running minimum of the corrected sequence.
    pub fn clipped(&self) -> Vec<f64> {
        let mut lo = f64::INFINITY;
        self.raw
            .iter()
            .map(|&v| {
                lo = lo.min(v);
                lo
            })
            .collect()
    }
}

/// Corrected sequence before any clipping.
pub fn lambda_table(cfg: &BhqConfig) -> Result<LambdaTable> {
    cfg.validate()?;
    let mut bh = Vec::with_capacity(cfg.length);
    let mut raw = Vec::with_capacity(cfg.length);
    let mut sum_sq = 0.0;
    for k in 1..=cfg.length {
        let base = bh_lambda(k, cfg.p, cfg.q)?;
        let value = if k == 1 {
            base
        } else {
            let denom = cfg.mode.denominator(k, cfg.p);
            if denom <= 0 {
                return Err(Error::DegenerateDenominator {
                    k,
                    denominator: denom,
                });
            }
            base * (1.0 + sum_sq / denom as f64).sqrt()
        };
        sum_sq += base * base;
        bh.push(base);
        raw.push(value);
    }
    Ok(LambdaTable { bh, raw })
}

/// The regularizing sequence for `cfg`. With clipping off, an increasing
/// sequence is rejected as [`Error::NonMonotone`].
pub fn sorted_lambda_sequence(cfg: &BhqConfig) -> Result<RegularizationSequence> {
    let table = lambda_table(cfg)?;
    if cfg.monotone_clip {
        RegularizationSequence::new(table.clipped())
    } else {
        RegularizationSequence::new(table.raw)
    }
}
