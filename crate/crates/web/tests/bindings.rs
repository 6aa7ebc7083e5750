use ordered_ridge_web::{
    compute_convergence_run, compute_lambda_curves, compute_shrink_comparison, RunSpec,
};

fn spec(penalty: &str) -> RunSpec {
    RunSpec {
        penalty: penalty.into(),
        n: 40,
        p: 80,
        q: 0.4,
        seed: 1,
        rho: 1.0,
        alpha: 1.0,
        alpha_en: 0.1,
        max_iter: 2000,
    }
}

#[test]
fn lambda_curves_cover_valid_length() {
    let c = compute_lambda_curves(200, 0.4, "n=p").unwrap();
    assert_eq!(c.bh().len(), 198);
    assert_eq!(c.raw().len(), 198);
    assert!(c.clipped().windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(
        compute_lambda_curves(200, 0.4, "n=2p").unwrap().bh().len(),
        200
    );
}

#[test]
fn lambda_curves_flag_increase() {
    let c = compute_lambda_curves(5000, 0.055, "n=p").unwrap();
    assert_eq!(c.first_increase(), Some(97));
    assert!(compute_lambda_curves(10, 0.4, "n=z").is_err());
    assert!(compute_lambda_curves(10, 1.5, "n=p").is_err());
}

#[test]
fn convergence_run_traces_every_iteration() {
    let r = compute_convergence_run(&spec("ol2")).unwrap();
    assert!(r.converged());
    assert_eq!(r.r_norm().len(), r.iterations() as usize);
    assert_eq!(r.objective().len(), r.iterations() as usize);
    assert_eq!(r.coefficients().len(), 80);
    assert_eq!(r.truth().len(), 80);
    assert_eq!(r.nonzero(), 80);
    let last = r.r_norm().len() - 1;
    assert!(r.r_norm()[last] <= r.eps_pri()[last]);
    assert!(r.s_norm()[last] <= r.eps_dual()[last]);
}

#[test]
fn convergence_run_accepts_each_penalty() {
    for p in ["oenet", "lasso"] {
        let r = compute_convergence_run(&spec(p)).unwrap();
        assert!(r.nonzero() < 80, "{p}");
    }
    assert!(compute_convergence_run(&spec("ridge")).is_err());
}

#[test]
fn shrink_comparison_matches_when_order_is_kept() {
    let c = compute_shrink_comparison(&[3.0, -1.0, 0.5], &[2.0, 1.0, 0.5], 1.0, 0.5).unwrap();
    assert!(c.order_preserved());
    assert_eq!(c.rank_matched(), vec![1.0, -0.5, 1.0 / 3.0]);
    for (a, b) in c.rank_matched().iter().zip(c.exact()) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(c.objective_gap().abs() < 1e-12);
    assert_eq!(c.elastic_net().len(), 3);
}

#[test]
fn shrink_comparison_reports_reordering_gap() {
    let c = compute_shrink_comparison(&[1.0, 0.9], &[9.0, 0.0], 1.0, 0.0).unwrap();
    assert!(!c.order_preserved());
    assert!(c.objective_gap() > 0.0);
    let big: Vec<f64> = (0..8).map(|i| i as f64).collect();
    let lam = vec![1.0; 8];
    let c = compute_shrink_comparison(&big, &lam, 1.0, 0.5).unwrap();
    assert!(c.exact().is_empty());
    assert!(c.objective_gap().is_nan());
}
