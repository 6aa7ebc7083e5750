use ordered_ridge::data::{generate_synthetic, SynthSpec};
use ordered_ridge::lambda_seq::{sorted_lambda_sequence, BhqConfig, SampleMode};
use ordered_ridge::linalg::DenseMatrix;
use ordered_ridge::penalty::RegularizationSequence;
use ordered_ridge::solver::{
    compute_lambda_max, fit_lasso, fit_ordered_elastic_net, fit_ordered_ridge, AdmmSolver, Penalty,
    SolverConfig,
};

/// Dense Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn gauss_solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    x
}

#[allow(clippy::needless_range_loop)]
fn ridge_oracle(a: &DenseMatrix, b: &[f64], c: f64) -> Vec<f64> {
    let (n, p) = a.shape();
    let mut m = vec![vec![0.0; p]; p];
    let mut rhs = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            m[i][j] = (0..n).map(|k| a.get(k, i) * a.get(k, j)).sum();
        }
        m[i][i] += c;
        rhs[i] = (0..n).map(|k| a.get(k, i) * b[k]).sum();
    }
    gauss_solve(m, rhs)
}

fn rel_err(x: &[f64], y: &[f64]) -> f64 {
    let d: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let s: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    d / s
}

fn tight() -> SolverConfig {
    SolverConfig {
        eps_abs: 1e-10,
        eps_rel: 1e-10,
        max_iter: 100_000,
        ..SolverConfig::default()
    }
}

#[test]
fn equal_weights_reduce_to_ridge() {
    let (d, _) = generate_synthetic(&SynthSpec::new(60, 40, 11)).unwrap();
    let c = 0.7;
    let lam = RegularizationSequence::constant(40, c).unwrap();
    let want = ridge_oracle(&d.a, &d.b, c);
    let fit = fit_ordered_ridge(&d.a, &d.b, &lam, &tight()).unwrap();
    assert!(fit.converged);
    assert!(rel_err(&fit.coefficients, &want) < 1e-8);
}

#[test]
fn equal_weights_wide_problem_uses_inversion_lemma() {
    let (d, _) = generate_synthetic(&SynthSpec::new(15, 45, 5)).unwrap();
    let lam = RegularizationSequence::constant(45, 0.3).unwrap();
    let want = ridge_oracle(&d.a, &d.b, 0.3);
    let fit = fit_ordered_ridge(&d.a, &d.b, &lam, &tight()).unwrap();
    assert!(rel_err(&fit.coefficients, &want) < 1e-7);
}

#[test]
fn lasso_satisfies_kkt() {
    let (d, _) = generate_synthetic(&SynthSpec::new(50, 100, 3)).unwrap();
    let lmax = compute_lambda_max(&d.a, &d.b).unwrap();
    let lambda = 0.1 * lmax;
    let fit = fit_lasso(&d.a, &d.b, lambda, &tight()).unwrap();
    let x = fit.coefficients.as_slice();
    let ax = d.a.matvec(x).unwrap();
    let resid: Vec<f64> = d.b.iter().zip(ax.iter()).map(|(b, p)| b - p).collect();
    let g = d.a.t_matvec(&resid).unwrap();
    for (j, &xj) in x.iter().enumerate() {
        if xj != 0.0 {
            assert!(
                (g[j] - lambda * xj.signum()).abs() <= 1e-3 * lambda,
                "coordinate {j}"
            );
        } else {
            assert!(g[j].abs() <= lambda * (1.0 + 1e-3), "coordinate {j}");
        }
    }
}

#[test]
fn lasso_at_lambda_max_is_zero() {
    let (d, _) = generate_synthetic(&SynthSpec::new(30, 20, 8)).unwrap();
    let lmax = compute_lambda_max(&d.a, &d.b).unwrap();
    let fit = fit_lasso(&d.a, &d.b, lmax * 1.0001, &tight()).unwrap();
    assert_eq!(fit.nonzero_count, 0);
}

#[test]
fn elastic_net_with_zero_mix_is_ordered_ridge() {
    let (d, _) = generate_synthetic(&SynthSpec::new(40, 30, 2)).unwrap();
    let lam = sorted_lambda_sequence(&BhqConfig::new(0.3, 30, SampleMode::NEqualsTwoP)).unwrap();
    let cfg = SolverConfig::default();
    let a = fit_ordered_ridge(&d.a, &d.b, &lam, &cfg).unwrap();
    let b = fit_ordered_elastic_net(&d.a, &d.b, &lam, 0.0, &cfg).unwrap();
    assert_eq!(a.iterations, b.iterations);
    assert!(rel_err(&b.coefficients, &a.coefficients) < 1e-12);
}

#[test]
fn elastic_net_with_full_mix_is_sparser() {
    let (d, _) = generate_synthetic(&SynthSpec::new(40, 30, 2)).unwrap();
    let lam = sorted_lambda_sequence(&BhqConfig::new(0.3, 30, SampleMode::NEqualsTwoP)).unwrap();
    let cfg = SolverConfig::default();
    let ridge = fit_ordered_ridge(&d.a, &d.b, &lam, &cfg).unwrap();
    let l1 = fit_ordered_elastic_net(&d.a, &d.b, &lam, 1.0, &cfg).unwrap();
    assert_eq!(ridge.nonzero_count, 30);
    assert!(l1.nonzero_count < 30);
}

#[test]
fn zero_response_gives_zero_solution_in_one_step() {
    let (d, _) = generate_synthetic(&SynthSpec::new(10, 5, 1)).unwrap();
    let b = vec![0.0; 10];
    let lam = RegularizationSequence::constant(5, 1.0).unwrap();
    let fit = fit_ordered_ridge(&d.a, &b, &lam, &SolverConfig::default()).unwrap();
    assert!(fit.converged);
    assert_eq!(fit.iterations, 1);
    assert!(fit.coefficients.iter().all(|v| *v == 0.0));
}

#[test]
fn fits_are_bitwise_deterministic() {
    let (d, _) = generate_synthetic(&SynthSpec::new(25, 60, 9)).unwrap();
    let lam = sorted_lambda_sequence(&BhqConfig::new(0.4, 60, SampleMode::NEqualsTwoP)).unwrap();
    let cfg = SolverConfig {
        alpha: 1.5,
        ..SolverConfig::default()
    };
    let a = fit_ordered_ridge(&d.a, &d.b, &lam, &cfg).unwrap();
    let b = fit_ordered_ridge(&d.a, &d.b, &lam, &cfg).unwrap();
    assert_eq!(a.coefficients, b.coefficients);
    assert_eq!(a.trace, b.trace);
}

#[test]
fn trace_thresholds_match_iterates() {
    let (d, _) = generate_synthetic(&SynthSpec::new(20, 12, 4)).unwrap();
    let lam = sorted_lambda_sequence(&BhqConfig::new(0.4, 12, SampleMode::NEqualsTwoP)).unwrap();
    let penalty = Penalty::ordered_l2(lam);
    let cfg = SolverConfig {
        rho: 2.5,
        alpha: 1.3,
        ..SolverConfig::default()
    };
    let mut s = AdmmSolver::new(&d.a, &d.b, &penalty, &cfg).unwrap();
    for _ in 0..5 {
        let z_old = s.state().z.clone();
        let rec = s.step().unwrap();
        let st = s.state();
        let r: f64 =
            st.x.iter()
                .zip(st.z.iter())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
        let sd: f64 = z_old
            .iter()
            .zip(st.z.iter())
            .map(|(a, b)| (cfg.rho * (a - b)).powi(2))
            .sum::<f64>()
            .sqrt();
        let eps_pri = (12f64).sqrt() * cfg.eps_abs + cfg.eps_rel * st.x.norm2().max(st.z.norm2());
        let eps_dual = (20f64).sqrt() * cfg.eps_abs + cfg.eps_rel * cfg.rho * st.u.norm2();
        assert!((rec.r_norm - r).abs() <= 1e-12 * r.max(1.0));
        assert!((rec.s_norm - sd).abs() <= 1e-12 * sd.max(1.0));
        assert!((rec.eps_pri - eps_pri).abs() <= 1e-12);
        assert!((rec.eps_dual - eps_dual).abs() <= 1e-12);
    }
}

#[test]
fn max_iter_one_reports_unconverged() {
    let (d, _) = generate_synthetic(&SynthSpec::new(30, 50, 6)).unwrap();
    let lam = sorted_lambda_sequence(&BhqConfig::new(0.4, 50, SampleMode::NEqualsTwoP)).unwrap();
    let cfg = SolverConfig {
        max_iter: 1,
        ..SolverConfig::default()
    };
    let fit = fit_ordered_ridge(&d.a, &d.b, &lam, &cfg).unwrap();
    assert!(!fit.converged);
    assert_eq!(fit.iterations, 1);
    assert_eq!(fit.trace.len(), 1);
}

#[test]
fn objective_decreases_overall() {
    let (d, _) = generate_synthetic(&SynthSpec::new(40, 80, 12)).unwrap();
    let lam = sorted_lambda_sequence(&BhqConfig::new(0.4, 80, SampleMode::NEqualsTwoP)).unwrap();
    let fit = fit_ordered_ridge(&d.a, &d.b, &lam, &SolverConfig::default()).unwrap();
    assert!(fit.converged);
    let first = fit.trace.first().unwrap().objective;
    let last = fit.trace.last().unwrap().objective;
    let zero = 0.5 * d.b.iter().map(|v| v * v).sum::<f64>();
    assert!(last <= first + 1e-12);
    assert!(last <= zero);
}

#[test]
fn rejects_bad_configuration() {
    let (d, _) = generate_synthetic(&SynthSpec::new(5, 3, 1)).unwrap();
    let lam = RegularizationSequence::constant(3, 1.0).unwrap();
    for cfg in [
        SolverConfig {
            rho: 0.0,
            ..SolverConfig::default()
        },
        SolverConfig {
            alpha: 2.0,
            ..SolverConfig::default()
        },
        SolverConfig {
            max_iter: 0,
            ..SolverConfig::default()
        },
    ] {
        assert!(fit_ordered_ridge(&d.a, &d.b, &lam, &cfg).is_err());
    }
    let short = RegularizationSequence::constant(2, 1.0).unwrap();
    assert!(fit_ordered_ridge(&d.a, &d.b, &short, &SolverConfig::default()).is_err());
}
