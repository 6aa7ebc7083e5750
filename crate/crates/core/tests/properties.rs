use ordered_ridge::data::{
    generate_synthetic, read_libsvm, split_indices, write_libsvm, Dataset, SplitSpec, SynthSpec,
};
use ordered_ridge::lambda_seq::{lambda_table, BhqConfig, SampleMode};
use ordered_ridge::linalg::{build_ridge_factor, ridge_solve, DenseMatrix, DenseVector};
use ordered_ridge::penalty::{
    ordered_l2_penalty, prox_oracle_small, shrink_objective, shrink_ordered_l2, sqrt_ordered_l2,
    RegularizationSequence,
};
use proptest::prelude::*;

fn lambda_strategy(p: usize) -> impl Strategy<Value = RegularizationSequence> {
    (
        0.01f64..10.0,
        proptest::collection::vec(0.0f64..5.0, p.saturating_sub(1)),
    )
        .prop_map(|(last, gaps)| {
            let mut values = vec![last];
            for g in gaps {
                let next = values.last().unwrap() + g;
                values.push(next);
            }
            values.reverse();
            RegularizationSequence::new(values).unwrap()
        })
}

fn vec_and_lambda(max_p: usize) -> impl Strategy<Value = (Vec<f64>, RegularizationSequence)> {
    (1..=max_p).prop_flat_map(|p| {
        (
            proptest::collection::vec(-10.0f64..10.0, p),
            lambda_strategy(p),
        )
    })
}

fn pair_and_lambda(
    max_p: usize,
) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, RegularizationSequence)> {
    (1..=max_p).prop_flat_map(|p| {
        (
            proptest::collection::vec(-10.0f64..10.0, p),
            proptest::collection::vec(-10.0f64..10.0, p),
            lambda_strategy(p),
        )
    })
}

proptest! {
    #[test]
    fn norm_is_nonnegative_and_zero_only_at_origin((x, lam) in vec_and_lambda(20)) {
        let n = sqrt_ordered_l2(&x, &lam).unwrap();
        prop_assert!(n >= 0.0);
        if x.iter().any(|v| *v != 0.0) {
            prop_assert!(n > 0.0);
        }
        let zero = vec![0.0; x.len()];
        prop_assert_eq!(sqrt_ordered_l2(&zero, &lam).unwrap(), 0.0);
    }

    #[test]
    fn norm_is_absolutely_homogeneous((x, lam) in vec_and_lambda(20), c in -5.0f64..5.0) {
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let lhs = sqrt_ordered_l2(&scaled, &lam).unwrap();
        let rhs = c.abs() * sqrt_ordered_l2(&x, &lam).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn norm_satisfies_triangle_inequality((x, y, lam) in pair_and_lambda(20)) {
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lhs = sqrt_ordered_l2(&sum, &lam).unwrap();
        let rhs = sqrt_ordered_l2(&x, &lam).unwrap() + sqrt_ordered_l2(&y, &lam).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn penalty_ignores_permutation_and_sign((x, lam) in vec_and_lambda(12), seed in any::<u64>()) {
        let mut y: Vec<f64> = x.iter().map(|v| -v).collect();
        let len = y.len();
        let mut s = seed;
        for i in (1..len).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            y.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = ordered_l2_penalty(&x, &lam).unwrap();
        let b = ordered_l2_penalty(&y, &lam).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn penalty_is_bounded_by_extreme_weights((x, lam) in vec_and_lambda(12)) {
        let sq: f64 = x.iter().map(|v| v * v).sum();
        let j = ordered_l2_penalty(&x, &lam).unwrap();
        let hi = lam.values()[0];
        let lo = *lam.values().last().unwrap();
        prop_assert!(j <= hi * sq * (1.0 + 1e-12) + 1e-300);
        prop_assert!(j >= lo * sq * (1.0 - 1e-12));
    }

    #[test]
    fn shrink_is_nonexpansive_and_sign_preserving(
        (v, w, lam) in pair_and_lambda(10),
        rho in 0.1f64..10.0,
    ) {
        let zv = shrink_ordered_l2(&v, &lam, rho).unwrap();
        let zw = shrink_ordered_l2(&w, &lam, rho).unwrap();
        for (z, x) in zv.iter().zip(&v) {
            prop_assert!(z.abs() <= x.abs());
            prop_assert!(z * x >= 0.0);
        }
        let dz: f64 = zv.iter().zip(zw.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let dv: f64 = v.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(dz <= dv * (1.0 + 1e-12));
    }

    #[test]
    fn shrink_never_beats_oracle((v, lam) in vec_and_lambda(5), rho in 0.1f64..5.0) {
        let z = shrink_ordered_l2(&v, &lam, rho).unwrap();
        let o = prox_oracle_small(&v, &lam, rho).unwrap();
        let fz = shrink_objective(&z, &v, &lam, rho).unwrap();
        let fo = shrink_objective(&o, &v, &lam, rho).unwrap();
        prop_assert!(fo <= fz + 1e-9 * fz.abs().max(1.0));
    }

    #[test]
    fn bhq_sequence_is_positive_and_clipped_nonincreasing(
        p in 2usize..300,
        q in 0.01f64..0.9,
    ) {
        let mut cfg = BhqConfig::new(q, p, SampleMode::NEqualsTwoP);
        cfg.length = p / 2 + 1;
        let t = lambda_table(&cfg).unwrap();
        prop_assert!(t.bh.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(t.raw.iter().zip(&t.bh).all(|(l, b)| l >= b));
        let c = t.clipped();
        prop_assert!(c.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn ridge_solve_is_linear(
        seed in any::<u64>(),
        (n, p) in (1usize..12, 1usize..12),
        rho in 0.1f64..5.0,
        c in -3.0f64..3.0,
    ) {
        let (d, _) = generate_synthetic(&SynthSpec::new(n, p, seed)).unwrap();
        let f = build_ridge_factor(&d.a, &d.b, rho).unwrap();
        let r1: Vec<f64> = (0..p).map(|i| (i as f64 + 1.0).sin()).collect();
        let r2: Vec<f64> = (0..p).map(|i| (i as f64 * 0.7).cos()).collect();
        let combo: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| a + c * b).collect();
        let s1 = ridge_solve(&f, &r1).unwrap();
        let s2 = ridge_solve(&f, &r2).unwrap();
        let s = ridge_solve(&f, &combo).unwrap();
        for i in 0..p {
            let expect = s1[i] + c * s2[i];
            prop_assert!((s[i] - expect).abs() <= 1e-9 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>(), n in 1usize..10, p in 1usize..10) {
        let raw: Vec<f64> = (0..n * p)
            .map(|k| ((k as u64).wrapping_mul(seed | 1) % 1000) as f64 / 97.0 + 0.5)
            .collect();
        let d = Dataset::new(
            DenseMatrix::new(n, p, raw).unwrap(),
            DenseVector::zeros(n),
        ).unwrap();
        let (once, _) = d.normalized().unwrap();
        let (twice, norms) = once.clone().normalized().unwrap();
        for (x, y) in once.a.as_slice().iter().zip(twice.a.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-14);
        }
        prop_assert!(norms.iter().all(|v| (v - 1.0).abs() <= 1e-10));
    }

    #[test]
    fn libsvm_round_trip(seed in any::<u64>(), n in 1usize..8, p in 1usize..8) {
        let (d, _) = generate_synthetic(&SynthSpec::new(n, p, seed)).unwrap();
        let mut buf = Vec::new();
        write_libsvm(&mut buf, &d).unwrap();
        let rows = read_libsvm(buf.as_slice(), Some(p)).unwrap();
        prop_assert_eq!(&rows.a, &d.a);
        let labels: Vec<f64> = rows.labels.iter().map(|s| s.parse().unwrap()).collect();
        prop_assert_eq!(labels.as_slice(), d.b.as_slice());
    }

    #[test]
    fn split_is_a_partition(
        n in 2usize..60,
        frac in 0.01f64..0.99,
        seed in any::<u64>(),
        stratified in any::<bool>(),
    ) {
        let train_n = ((n as f64 * frac) as usize).clamp(1, n - 1);
        let labels: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let mut spec = SplitSpec::new(train_n, seed);
        spec.stratified = stratified;
        let (train, test) = split_indices(&labels, &spec).unwrap();
        prop_assert_eq!(train.len(), train_n);
        prop_assert_eq!(test.len(), n - train_n);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let again = split_indices(&labels, &spec).unwrap();
        prop_assert_eq!(again, (train, test));
    }
}
