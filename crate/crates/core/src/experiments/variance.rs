//! Gradient variance of `C(θ) = ⟨00|U†(I⊗Z)U|00⟩` for
//! `U = exp(−iθ(w·I⊗Y + I⊗I))` as the identity weight shifts.
//!
//! The identity part is a global phase, so `C(θ) = cos(2wθ)` and
//! `∂C = −2w sin(2wθ)`.

use serde::{Deserialize, Serialize};

use crate::dla::eta;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, pauli, CMatrix};
use crate::qsim::{grad_analytic_1p_eig, StateVector};
use crate::rng::{rng_from_seed, uniform};

/// Published sample count per weight.
pub const PUBLISHED_SAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPoint {
    pub weight: f64,
    /// Unbiased sample variance of `∂C`.
    pub variance: f64,
    pub mean_gradient: f64,
    pub eta: f64,
    /// Population variance for `θ ~ U[−2π, 2π]`.
    pub oracle_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceSweepReport {
    pub samples: usize,
    pub seed: u64,
    pub points: Vec<WeightPoint>,
}

impl VarianceSweepReport {
    pub fn variances(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.variance).collect()
    }

    pub fn etas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.eta).collect()
    }
}

/// `w·(I⊗Y) + I⊗I`.
pub fn weighted_generator(w: f64) -> CMatrix<f64> {
    let iy = pauli::string::<f64>("IY").expect("valid label");
    &iy.scale_real(w) + &CMatrix::identity(4)
}

/// `Var[−2w sin(2wθ)]`, `θ ~ U[−2π, 2π]`: `4w² (1/2 − sin(8πw) / (16πw))`,
/// continued by 0 at `w = 0`.
pub fn analytic_variance_oracle(w: f64) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    let x = 8.0 * std::f64::consts::PI * w;
    4.0 * w * w * (0.5 - x.sin() / (2.0 * x))
}

/// Samples the parameter angles once; every weight sees the same draws.
pub fn sample_angles(samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let two_pi = 2.0 * std::f64::consts::PI;
    (0..samples).map(|_| uniform(&mut rng, -two_pi, two_pi)).collect()
}

/// Analytic gradients at the given angles for one weight.
pub fn gradients(weight: f64, thetas: &[f64]) -> Result<Vec<f64>> {
    let h = weighted_generator(weight);
    let eig = eig_hermitian(&h)?;
    let o = pauli::string::<f64>("IZ")?;
    let s = StateVector::zero(2);
    thetas.iter().map(|&t| grad_analytic_1p_eig(&eig, &h, t, &o, &s)).collect()
}

pub fn variance_sweep(weights: &[f64], samples: usize, seed: u64) -> Result<VarianceSweepReport> {
    if samples < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(Error::InvalidInput(format!("weight {w} outside [0, 1]")));
    }
    let thetas = sample_angles(samples, seed);
    let points = weights
        .iter()
        .map(|&w| {
            let g = gradients(w, &thetas)?;
            let n = g.len() as f64;
            let mean = g.iter().sum::<f64>() / n;
            let variance = g.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Ok(WeightPoint {
                weight: w,
                variance,
                mean_gradient: mean,
                eta: eta(&weighted_generator(w))?,
                oracle_variance: analytic_variance_oracle(w),
            })
        })
        .collect::<Result<_>>()?;
    Ok(VarianceSweepReport { samples, seed, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn oracle_values() {
        assert_eq!(analytic_variance_oracle(0.0), 0.0);
        assert_abs_diff_eq!(analytic_variance_oracle(1.0), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(analytic_variance_oracle(0.5), 0.5, epsilon = 1e-14);
        // continuity at zero
        assert!(analytic_variance_oracle(1e-9) < 1e-15);
    }

    #[test]
    fn oracle_matches_quadrature() {
        // midpoint rule for E[g²] − E[g]², g = −2w sin(2wθ) on [−2π, 2π]
        for w in [0.1, 0.33, 0.8] {
            let m = 200_000;
            let a = -2.0 * std::f64::consts::PI;
            let h = -2.0 * a / m as f64;
            let (mut s1, mut s2) = (0.0, 0.0);
            for k in 0..m {
                let t = a + (k as f64 + 0.5) * h;
                let g = -2.0 * w * (2.0 * w * t).sin();
                s1 += g;
                s2 += g * g;
            }
            let mean = s1 / m as f64;
            let var = s2 / m as f64 - mean * mean;
            assert_abs_diff_eq!(var, analytic_variance_oracle(w), epsilon = 1e-9);
        }
    }

    #[test]
    fn gradients_match_closed_form() {
        let thetas = sample_angles(200, 3);
        for w in [0.0, 0.1, 0.55, 1.0] {
            for (g, t) in gradients(w, &thetas).unwrap().iter().zip(&thetas) {
                assert!((g + 2.0 * w * (2.0 * w * t).sin()).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn sweep_shape() {
        let r = variance_sweep(&[0.0, 0.25, 0.5, 0.75, 1.0], 50, 7).unwrap();
        assert_eq!(r.points[0].variance, 0.0);
        let v = r.variances();
        assert!(v.windows(2).all(|w| w[0] <= w[1]), "{v:?}");
        let e = r.etas();
        assert_eq!(e[0], 2.0);
        assert_abs_diff_eq!(e[4], 2f64.sqrt(), epsilon = 1e-12);
        assert!(e.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn input_validation() {
        assert!(variance_sweep(&[0.5], 1, 0).is_err());
        assert!(variance_sweep(&[1.5], 10, 0).is_err());
    }
}
