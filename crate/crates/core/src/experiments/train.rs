//! Spectrum-matching experiment: fit models whose generator spectra span
//! `[−b, b]` to data produced by a target circuit with spectrum scale
//! `b_target`, and compare the final RMSE across `b`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::wilcoxon::{wilcoxon_exact, WilcoxonResult};
use crate::error::Result;
use crate::linalg::{haar_unitary, CMatrix};
use crate::qsim::{make_generator_with_basis, CircuitSpec, StateVector};
use crate::rng::{derive_seed, rng_from_seed, uniform};

pub type Dataset = Vec<(f64, f64)>;

/// `x ~ U[−1, 1]` and `y = f_target(θ = 1, x)`.
pub fn gen_dataset(target: &CircuitSpec<f64>, count: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng_from_seed(seed);
    let xs: Vec<f64> = (0..count).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
    let states: Vec<StateVector<f64>> = xs.iter().map(|&x| target.encoded_state(x)).collect();
    let ys = target.forward_states(&vec![1.0; target.depth()], &states)?;
    Ok(xs.into_iter().zip(ys).collect())
}

/// Adam with bias-corrected moment estimates.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(params: usize, lr: f64, beta1: f64, beta2: f64, eps: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            eps,
            m: vec![0.0; params],
            v: vec![0.0; params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        for (((p, &g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub theta_init: Vec<f64>,
    pub theta_final: Vec<f64>,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub rmse: f64,
}

fn mse(pred: &[f64], ys: &[f64]) -> f64 {
    pred.iter().zip(ys).map(|(p, y)| (p - y) * (p - y)).sum::<f64>() / ys.len() as f64
}

/// Full-batch Adam on the mean squared error, `θ₀ ~ U[−π, π)` from `seed`.
/// Gradients are central finite differences of the model outputs.
pub fn adam_train(model: &CircuitSpec<f64>, data: &[(f64, f64)], cfg: &TrainConfig, seed: u64) -> Result<TrainOutcome> {
    let mut rng = rng_from_seed(seed);
    let pi = std::f64::consts::PI;
    let theta_init: Vec<f64> = (0..model.depth()).map(|_| uniform(&mut rng, -pi, pi)).collect();
    adam_train_from(model, data, cfg, theta_init)
}

/// [`adam_train`] from an explicit starting point.
pub fn adam_train_from(
    model: &CircuitSpec<f64>,
    data: &[(f64, f64)],
    cfg: &TrainConfig,
    theta_init: Vec<f64>,
) -> Result<TrainOutcome> {
    if data.is_empty() {
        return Err(crate::Error::InvalidInput("empty dataset".into()));
    }
    let states: Vec<StateVector<f64>> = data.iter().map(|&(x, _)| model.encoded_state(x)).collect();
    let ys: Vec<f64> = data.iter().map(|&(_, y)| y).collect();
    let n = ys.len() as f64;
    let mut theta = theta_init.clone();
    let mut opt = Adam::new(theta.len(), cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps);
    let mut initial_loss = f64::NAN;
    for epoch in 0..cfg.epochs {
        let pred = model.forward_states(&theta, &states)?;
        if epoch == 0 {
            initial_loss = mse(&pred, &ys);
        }
        let jac = model.fd_jacobian(&theta, &states, cfg.fd_step)?;
        let grad: Vec<f64> = jac
            .iter()
            .map(|col| 2.0 / n * pred.iter().zip(&ys).zip(col).map(|((p, y), d)| (p - y) * d).sum::<f64>())
            .collect();
        opt.step(&mut theta, &grad);
    }
    let final_loss = mse(&model.forward_states(&theta, &states)?, &ys);
    Ok(TrainOutcome {
        theta_init,
        theta_final: theta,
        initial_loss,
        final_loss,
        rmse: final_loss.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    /// One entry per `b_models` value, in config order.
    pub models: Vec<TrainOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSummary {
    pub b: f64,
    pub rmse: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (`n − 1`).
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: TrainConfig,
    pub runs: Vec<SeedRun>,
    pub summary: Vec<ScaleSummary>,
    /// Paired test of RMSE at `b = 1` against `b = 10` when both are present.
    pub wilcoxon_b1_vs_b10: Option<WilcoxonResult>,
}

impl TrainReport {
    pub fn mean_rmse(&self, b: f64) -> Option<f64> {
        self.summary.iter().find(|s| s.b == b).map(|s| s.mean)
    }
}

fn layer_bases(seed: u64, tag: &str, depth: usize, dim: usize) -> Vec<CMatrix<f64>> {
    (0..depth)
        .map(|l| haar_unitary(dim, derive_seed(seed, tag, l as u64)))
        .collect()
}

fn circuit(cfg: &TrainConfig, bases: &[CMatrix<f64>], b: f64) -> Result<CircuitSpec<f64>> {
    let gens = bases.iter().map(|u| make_generator_with_basis(u, b)).collect();
    CircuitSpec::new(cfg.n_qubits, gens, cfg.entangler.pairs(cfg.n_qubits))
}

/// One seed of the experiment: target, dataset, and one trained model per
/// spectrum scale.
pub fn run_seed(cfg: &TrainConfig, seed: u64) -> Result<SeedRun> {
    let dim = 1usize << cfg.n_qubits;
    let target_bases = layer_bases(seed, "target-basis", cfg.depth, dim);
    let target = circuit(cfg, &target_bases, cfg.b_target)?;
    let data = gen_dataset(&target, cfg.dataset_size, derive_seed(seed, "dataset", 0))?;
    let models = cfg
        .b_models
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let bases = if cfg.share_generator_basis {
                target_bases.clone()
            } else {
                (0..cfg.depth)
                    .map(|l| haar_unitary(dim, derive_seed(seed, "model-basis", (k * cfg.depth + l) as u64)))
                    .collect()
            };
            let model = circuit(cfg, &bases, b)?;
            adam_train(&model, &data, cfg, derive_seed(seed, "init", k as u64))
        })
        .collect::<Result<_>>()?;
    Ok(SeedRun { seed, models })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

pub fn spectrum_matching_experiment(cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    let mut runs: Vec<SeedRun> = cfg.seeds.par_iter().map(|&s| run_seed(cfg, s)).collect::<Result<_>>()?;
    runs.sort_by_key(|r| r.seed);
    let summary: Vec<ScaleSummary> = cfg
        .b_models
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let rmse: Vec<f64> = runs.iter().map(|r| r.models[k].rmse).collect();
            let (mean, std) = mean_std(&rmse);
            ScaleSummary { b, rmse, mean, std }
        })
        .collect();
    let find = |b: f64| summary.iter().find(|s| s.b == b);
    let wilcoxon_b1_vs_b10 = match (find(1.0), find(10.0)) {
        (Some(s1), Some(s10)) => {
            let pairs: Vec<(f64, f64)> = s1.rmse.iter().copied().zip(s10.rmse.iter().copied()).collect();
            wilcoxon_exact(&pairs).ok()
        }
        _ => None,
    };
    Ok(TrainReport {
        config: cfg.clone(),
        runs,
        summary,
        wilcoxon_b1_vs_b10,
    })
}
