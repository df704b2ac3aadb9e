//! End-to-end experiment runs at reduced scale.

use qspec::experiments::{
    adam_train, gen_dataset, run_seed, spectrum_matching_experiment, variance_sweep, wilcoxon_exact, TrainConfig,
};
use qspec::qsim::{make_generator, CircuitSpec, EntanglerKind};

fn tiny() -> TrainConfig {
    TrainConfig {
        n_qubits: 2,
        depth: 2,
        dataset_size: 24,
        epochs: 6,
        seeds: vec![5, 2, 9],
        ..TrainConfig::published()
    }
}

#[test]
fn experiment_is_a_function_of_config_and_seeds() {
    let cfg = tiny();
    let a = spectrum_matching_experiment(&cfg).unwrap();
    let b = spectrum_matching_experiment(&cfg).unwrap();
    assert_eq!(a, b);
    let seeds: Vec<u64> = a.runs.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, vec![2, 5, 9]);
    assert_eq!(a.runs[1], run_seed(&cfg, 5).unwrap());
    for (k, s) in a.summary.iter().enumerate() {
        let xs: Vec<f64> = a.runs.iter().map(|r| r.models[k].rmse).collect();
        assert_eq!(s.rmse, xs);
        assert!((s.mean - xs.iter().sum::<f64>() / 3.0).abs() < 1e-15);
    }
    let pairs: Vec<(f64, f64)> = a.summary[1].rmse.iter().copied().zip(a.summary[2].rmse.iter().copied()).collect();
    assert_eq!(a.wilcoxon_b1_vs_b10.unwrap(), wilcoxon_exact(&pairs).unwrap());
}

#[test]
fn config_round_trips_through_both_formats() {
    let cfg = TrainConfig {
        entangler: EntanglerKind::Chain,
        share_generator_basis: true,
        ..tiny()
    };
    let json = serde_json::to_string(&cfg).unwrap();
    assert_eq!(TrainConfig::parse(&json).unwrap(), cfg);
    let kv = "n_qubits = 2\ndepth = 2\ndataset_size = 24\nepochs = 6\nseeds = 5, 2, 9\nentangler = chain\nshare_generator_basis = true\n";
    assert_eq!(TrainConfig::parse(kv).unwrap(), cfg);
}

#[test]
fn shared_basis_changes_models_only() {
    let a = run_seed(&tiny(), 3).unwrap();
    let cfg = TrainConfig {
        share_generator_basis: true,
        ..tiny()
    };
    let b = run_seed(&cfg, 3).unwrap();
    for (x, y) in a.models.iter().zip(&b.models) {
        assert_eq!(x.theta_init, y.theta_init);
        assert_ne!(x.initial_loss, y.initial_loss);
    }
}

#[test]
fn larger_learning_rate_reduces_loss() {
    let n = 2;
    let target = CircuitSpec::new(n, vec![make_generator(4, 1.0, 1), make_generator(4, 1.0, 2)], vec![(0, 1)]).unwrap();
    let data = gen_dataset(&target, 40, 8).unwrap();
    let cfg = TrainConfig {
        lr: 0.05,
        epochs: 60,
        ..tiny()
    };
    let out = adam_train(&target, &data, &cfg, 4).unwrap();
    assert!(out.final_loss < 0.5 * out.initial_loss, "{out:?}");
    assert!((out.rmse - out.final_loss.sqrt()).abs() < 1e-15);
}

#[test]
fn variance_report_keeps_weight_order_and_seed() {
    let w = [0.0, 0.3, 0.6, 0.9];
    let r = variance_sweep(&w, 200, 17).unwrap();
    assert_eq!(r.seed, 17);
    assert_eq!(r.samples, 200);
    assert_eq!(r.points.iter().map(|p| p.weight).collect::<Vec<_>>(), w);
    assert_eq!(r.points[0].variance, 0.0);
    assert_eq!(r, variance_sweep(&w, 200, 17).unwrap());
    assert!(variance_sweep(&[1.5], 10, 1).is_err());
    assert!(variance_sweep(&w, 1, 1).is_err());
}
