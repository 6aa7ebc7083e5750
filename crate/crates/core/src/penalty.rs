//! The ordered ℓ₂ penalty `J_λ(x) = Σ λᵢ x²₍ᵢ₎` and the shrinkage operators
//! used by the ADMM z-updates.
//!
//! `x₍ᵢ₎` is the entry with the i-th largest magnitude. Weights are matched to
//! entries by rank, so the largest weight always lands on the largest entry.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_len, DenseVector};

/// Non-increasing, non-negative weights `λ₁ ≥ λ₂ ≥ … ≥ λ_p ≥ 0`.
///
/// Sequences built with [`RegularizationSequence::new`] also have `λ₁ > 0`.
/// [`RegularizationSequence::scaled`] may produce the all-zero sequence, which
/// the elastic-net mixing needs at its endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RegularizationSequence(Vec<f64>);

impl RegularizationSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let seq = Self::non_increasing(values)?;
        if !(seq.0[0] > 0.0) {
            return Err(Error::InvalidParameter(
                "leading regularization weight must be positive".into(),
            ));
        }
        Ok(seq)
    }

    fn non_increasing(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "empty regularization sequence".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("regularization sequence"));
        }
        if let Some(&v) = values.iter().find(|&&v| v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "regularization weights must be non-negative, got {v}"
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::NonMonotone {
                index: i + 1,
                previous: values[i],
                next: values[i + 1],
            });
        }
        Ok(Self(values))
    }

    /// `len` copies of `value`.
    pub fn constant(len: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; len])
    }

    /// Every weight multiplied by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be finite and non-negative, got {factor}"
            )));
        }
        Self::non_increasing(self.0.iter().map(|v| v * factor).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for RegularizationSequence {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<RegularizationSequence> for Vec<f64> {
    fn from(seq: RegularizationSequence) -> Self {
        seq.0
    }
}

/// Ranks of a vector's entries by magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStatisticView {
    /// `permutation[rank]` is the original index of the entry with that rank.
    pub permutation: Vec<usize>,
    /// `|x|` sorted non-increasing.
    pub magnitudes: Vec<f64>,
}

impl OrderStatisticView {
    /// Ties keep ascending original index.
    pub fn of(x: &[f64]) -> Self {
        let mut permutation: Vec<usize> = (0..x.len()).collect();
        permutation.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()));
        let magnitudes = permutation.iter().map(|&i| x[i].abs()).collect();
        Self {
            permutation,
            magnitudes,
        }
    }
}

/// `J_λ(x) = Σᵢ λᵢ x²₍ᵢ₎`.
pub fn ordered_l2_penalty(x: &[f64], lam: &RegularizationSequence) -> Result<f64> {
    check_len(lam.len(), x.len())?;
    let view = OrderStatisticView::of(x);
    Ok(view
        .magnitudes
        .iter()
        .zip(lam.values())
        .map(|(m, l)| l * (m * m))
        .sum())
}

/// `√J_λ(x)`, a norm on ℝᵖ.
pub fn sqrt_ordered_l2(x: &[f64], lam: &RegularizationSequence) -> Result<f64> {
    ordered_l2_penalty(x, lam).map(f64::sqrt)
}

/// `Σᵢ λᵢ |x|₍ᵢ₎`, the ordered ℓ₁ term of the elastic net objective.
pub fn ordered_l1_penalty(x: &[f64], lam: &RegularizationSequence) -> Result<f64> {
    check_len(lam.len(), x.len())?;
    let view = OrderStatisticView::of(x);
    Ok(view
        .magnitudes
        .iter()
        .zip(lam.values())
        .map(|(m, l)| l * m)
        .sum())
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "rho must be positive and finite, got {rho}"
        )))
    }
}

/// Rank-matched ridge shrinkage: the entry holding the i-th largest `|vⱼ|`
/// becomes `ρ·vⱼ / (λᵢ + ρ)`.
///
/// This is the exact minimizer of `½ J_λ(z) + (ρ/2)‖v − z‖²` whenever the
/// shrunk magnitudes keep the ordering of `|v|`; otherwise it can differ from
/// the true proximal point (see [`prox_oracle_small`]).
pub fn shrink_ordered_l2(v: &[f64], lam: &RegularizationSequence, rho: f64) -> Result<DenseVector> {
    check_len(lam.len(), v.len())?;
    check_rho(rho)?;
    let view = OrderStatisticView::of(v);
    let mut z = vec![0.0; v.len()];
    for (&j, l) in view.permutation.iter().zip(lam.values()) {
        z[j] = rho * v[j] / (l + rho);
    }
    Ok(DenseVector::from_vec_unchecked(z))
}

/// Rank-matched ordered elastic-net shrinkage:
/// `zⱼ = ((ρvⱼ − λ₁ᵢ)/(λ₂ᵢ + ρ))₊ − ((−ρvⱼ − λ₁ᵢ)/(λ₂ᵢ + ρ))₊`
/// where `i` is the magnitude rank of `vⱼ`.
pub fn shrink_ordered_elastic_net(
    v: &[f64],
    lam1: &RegularizationSequence,
    lam2: &RegularizationSequence,
    rho: f64,
) -> Result<DenseVector> {
    check_len(lam1.len(), v.len())?;
    check_len(lam2.len(), v.len())?;
    check_rho(rho)?;
    let view = OrderStatisticView::of(v);
    let mut z = vec![0.0; v.len()];
    for ((&j, l1), l2) in view
        .permutation
        .iter()
        .zip(lam1.values())
        .zip(lam2.values())
    {
        let denom = l2 + rho;
        let pos = ((rho * v[j] - l1) / denom).max(0.0);
        let neg = ((-rho * v[j] - l1) / denom).max(0.0);
        z[j] = pos - neg;
    }
    Ok(DenseVector::from_vec_unchecked(z))
}

/// `sign(vᵢ)·max(0, |vᵢ| − κ)`.
pub fn soft_threshold(v: &[f64], kappa: f64) -> DenseVector {
    debug_assert!(kappa >= 0.0, "threshold must be non-negative");
    let z = v
        .iter()
        .map(|&x| {
            if x > kappa {
                x - kappa
            } else if x < -kappa {
                x + kappa
            } else {
                0.0
            }
        })
        .collect();
    DenseVector::from_vec_unchecked(z)
}

/// Objective minimized by the ordered ℓ₂ z-update:
/// `½ J_λ(z) + (ρ/2)‖v − z‖²`.
pub fn shrink_objective(
    z: &[f64],
    v: &[f64],
    lam: &RegularizationSequence,
    rho: f64,
) -> Result<f64> {
    check_len(v.len(), z.len())?;
    let fit: f64 = v.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(0.5 * ordered_l2_penalty(z, lam)? + 0.5 * rho * fit)
}

/// Largest input accepted by [`prox_oracle_small`].
pub const ORACLE_MAX_LEN: usize = 6;

/// Exact proximal point of `½ J_λ` by exhaustive search, for `p ≤ 6`.
///
/// Every assignment of ranks to coordinates is tried. Within an assignment,
/// consecutive ranks may be pooled to a common magnitude, which covers
/// minimizers sitting on a tie between order statistics. Each candidate is
/// scored with the true sorted-order objective and the best one is returned.
pub fn prox_oracle_small(v: &[f64], lam: &RegularizationSequence, rho: f64) -> Result<DenseVector> {
    let p = v.len();
    if p > ORACLE_MAX_LEN {
        return Err(Error::TooLarge {
            len: p,
            max: ORACLE_MAX_LEN,
        });
    }
    check_len(lam.len(), p)?;
    check_rho(rho)?;
    let weights = lam.values();

    let mut best = vec![0.0; p];
    let mut best_obj = shrink_objective(&best, v, lam, rho)?;
    let mut candidate = vec![0.0; p];
    let mut order: Vec<usize> = (0..p).collect();

    for_each_permutation(&mut order, &mut |order| {
        // Bit k of `cuts` set means ranks k and k+1 lie in different blocks.
        let n_cuts = p.saturating_sub(1);
        for cuts in 0u32..(1u32 << n_cuts) {
            let mut start = 0;
            for end in 0..p {
                let boundary = end + 1 == p || cuts & (1 << end) != 0;
                if !boundary {
                    continue;
                }
                let block = &order[start..=end];
                let mass: f64 = block.iter().map(|&j| v[j].abs()).sum();
                let weight: f64 = (start..=end).map(|r| weights[r] + rho).sum();
                let magnitude = rho * mass / weight;
                for &j in block {
                    candidate[j] = signum_or_zero(v[j]) * magnitude;
                }
                start = end + 1;
            }
            let obj = shrink_objective(&candidate, v, lam, rho).expect("lengths checked");
            if obj < best_obj {
                best_obj = obj;
                best.copy_from_slice(&candidate);
            }
        }
    });
    Ok(DenseVector::from_vec_unchecked(best))
}

fn signum_or_zero(x: f64) -> f64 {
    match x.partial_cmp(&0.0) {
        Some(Ordering::Greater) => 1.0,
        Some(Ordering::Less) => -1.0,
        _ => 0.0,
    }
}

// Heap's algorithm.
fn for_each_permutation(items: &mut [usize], f: &mut impl FnMut(&[usize])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> RegularizationSequence {
        RegularizationSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn order_statistics_of_worked_example() {
        let x = [-2.1, -0.5, 3.2, 7.2];
        let view = OrderStatisticView::of(&x);
        assert_eq!(view.permutation, vec![3, 2, 0, 1]);
        assert_eq!(view.magnitudes, vec![7.2, 3.2, 2.1, 0.5]);
        let ones = seq(&[1.0; 4]);
        let j = ordered_l2_penalty(&x, &ones).unwrap();
        assert!((j - 66.74).abs() < 1e-12);
        // λ = (1, 0, 0, 0) picks out the largest square only.
        let top = seq(&[1.0, 0.0, 0.0, 0.0]);
        assert!((ordered_l2_penalty(&x, &top).unwrap() - 7.2 * 7.2).abs() < 1e-12);
    }

    #[test]
    fn ties_break_by_index() {
        let view = OrderStatisticView::of(&[1.0, -2.0, 2.0, -1.0]);
        assert_eq!(view.permutation, vec![1, 2, 0, 3]);
    }

    #[test]
    fn zero_vector_has_zero_penalty() {
        assert_eq!(
            ordered_l2_penalty(&[0.0; 3], &seq(&[3.0, 2.0, 1.0])).unwrap(),
            0.0
        );
    }

    #[test]
    fn sequence_validation() {
        assert!(matches!(
            RegularizationSequence::new(vec![1.0, 2.0]),
            Err(Error::NonMonotone { index: 1, .. })
        ));
        assert!(RegularizationSequence::new(vec![0.0, 0.0]).is_err());
        assert!(RegularizationSequence::new(vec![1.0, -1.0]).is_err());
        assert!(RegularizationSequence::new(vec![]).is_err());
        let z = seq(&[2.0, 1.0]).scaled(0.0).unwrap();
        assert_eq!(z.values(), &[0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let lam = seq(&[1.0, 1.0]);
        assert!(matches!(
            ordered_l2_penalty(&[1.0], &lam),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(shrink_ordered_l2(&[1.0], &lam, 1.0).is_err());
        assert!(shrink_ordered_elastic_net(&[1.0, 2.0], &lam, &seq(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn unit_weights_halve() {
        let v = [4.0, -2.0, 1.0];
        let z = shrink_ordered_l2(&v, &seq(&[1.0; 3]), 1.0).unwrap();
        assert_eq!(z.as_slice(), &[2.0, -1.0, 0.5]);
    }

    #[test]
    fn vanishing_weights_leave_input() {
        let v = [4.0, -2.0, 1.0];
        let z = shrink_ordered_l2(&v, &seq(&[1e-14; 3]), 1.0).unwrap();
        for (a, b) in z.iter().zip(v) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn shrink_matches_rank_assignment() {
        // Largest |v| is index 1 and receives λ₁ = 3.
        let v = [1.0, -5.0, 2.0];
        let z = shrink_ordered_l2(&v, &seq(&[3.0, 2.0, 1.0]), 1.0).unwrap();
        assert_eq!(z.as_slice(), &[0.5, -1.25, 2.0 / 3.0]);
    }

    #[test]
    fn elastic_net_full_threshold() {
        let v = [0.3, -0.2, 0.1];
        let z =
            shrink_ordered_elastic_net(&v, &seq(&[0.5, 0.4, 0.3]), &seq(&[1.0; 3]), 1.0).unwrap();
        assert_eq!(z.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn elastic_net_reduces_to_soft_threshold() {
        let v = [3.0, -1.0, 0.2];
        let zeros = seq(&[1.0; 3]).scaled(0.0).unwrap();
        let z = shrink_ordered_elastic_net(&v, &seq(&[0.5; 3]), &zeros, 1.0).unwrap();
        assert_eq!(z, soft_threshold(&v, 0.5));
    }

    #[test]
    fn elastic_net_without_l1_is_ridge_shrink() {
        let v = [0.7, -2.5, 1.3, 0.0];
        let lam2 = seq(&[2.0, 1.5, 1.0, 0.5]);
        let zeros = lam2.scaled(0.0).unwrap();
        let a = shrink_ordered_elastic_net(&v, &zeros, &lam2, 1.3).unwrap();
        let b = shrink_ordered_l2(&v, &lam2, 1.3).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() <= 1e-15 * y.abs().max(1.0));
        }
    }

    #[test]
    fn soft_threshold_definition() {
        assert_eq!(
            soft_threshold(&[3.0, -1.0, 0.2], 0.5).as_slice(),
            &[2.5, -0.5, 0.0]
        );
        assert_eq!(
            soft_threshold(&[3.0, -1.0, 0.2], 0.0).as_slice(),
            &[3.0, -1.0, 0.2]
        );
    }

    #[test]
    fn oracle_equal_weights() {
        let v = [0.4, -1.7, 2.2];
        let z = prox_oracle_small(&v, &seq(&[2.0; 3]), 1.0).unwrap();
        for (a, b) in z.iter().zip(v) {
            assert!((a - b / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_keeps_zero_fixed() {
        let z = prox_oracle_small(&[1.0, 0.0], &seq(&[3.0, 1.0]), 1.0).unwrap();
        assert_eq!(z[1], 0.0);
        assert!((z[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn oracle_rejects_large_input() {
        let lam = seq(&[1.0; 7]);
        assert!(matches!(
            prox_oracle_small(&[0.0; 7], &lam, 1.0),
            Err(Error::TooLarge { len: 7, max: 6 })
        ));
    }

    #[test]
    fn oracle_pools_crossing_magnitudes() {
        // Rank-matched shrink reorders here: 1.0/(9+1) < 0.9/(0+1).
        let v = [1.0, 0.9];
        let lam = seq(&[9.0, 0.0]);
        let shrink = shrink_ordered_l2(&v, &lam, 1.0).unwrap();
        assert!(shrink[0].abs() < shrink[1].abs());
        let oracle = prox_oracle_small(&v, &lam, 1.0).unwrap();
        let so = shrink_objective(&oracle, &v, &lam, 1.0).unwrap();
        let ss = shrink_objective(&shrink, &v, &lam, 1.0).unwrap();
        assert!(so <= ss);
        // With λ₂ = 0 the two magnitudes pool:  m = (1.0 + 0.9)/(10 + 1).
        assert!((oracle[0] - 1.9 / 11.0).abs() < 1e-12);
        assert!((oracle[1] - 1.9 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn permutation_enumeration_is_complete() {
        let mut items = vec![0, 1, 2, 3];
        let mut seen = std::collections::BTreeSet::new();
        for_each_permutation(&mut items, &mut |p| {
            seen.insert(p.to_vec());
        });
        assert_eq!(seen.len(), 24);
    }
}
