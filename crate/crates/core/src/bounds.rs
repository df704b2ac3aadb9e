//! Approximation of Sobolev-class functions on the torus by band-limited
//! trigonometric polynomials.
//!
//! By Parseval, the best `L²` approximation of `h = Σ b_s e^{−i s·φ}` from
//! the modes `‖s‖₂ ≤ K` is the Fourier truncation, and its error is the
//! tail energy `sqrt(Σ_{‖s‖>K} |b_s|²)`. Everything here is an exact finite
//! sum over stored coefficients.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{gaussian_pair, rng_from_seed};
use crate::Real;

/// Coefficients with modulus at or below this are dropped on insert.
pub const PRUNE_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevParams<T> {
    pub d: usize,
    pub r: T,
}

impl<T: Real> SobolevParams<T> {
    pub fn new(d: usize, r: T) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("torus dimension must be positive".into()));
        }
        if r <= T::of_usize(d) / T::lit(2.0) {
            return Err(Error::Domain(format!("smoothness r = {r} must exceed d/2 = {}", d as f64 / 2.0)));
        }
        Ok(Self { d, r })
    }

    /// `α = r − d/2`.
    pub fn alpha(&self) -> T {
        self.r - T::of_usize(self.d) / T::lit(2.0)
    }

    /// The exponent `d/2 − r` of the stated minimax rate.
    pub fn rate_exponent(&self) -> T {
        -self.alpha()
    }
}

/// Finite Fourier series `h(φ) = Σ_s b_s e^{−i s·φ}` on `T^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries<T> {
    pub d: usize,
    coeffs: BTreeMap<Vec<i64>, Complex<T>>,
}

fn norm_sq(s: &[i64]) -> i64 {
    s.iter().map(|&x| x * x).sum()
}

impl<T: Real> FourierSeries<T> {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            coeffs: BTreeMap::new(),
        }
    }

    /// Sets `b_s`; a coefficient below the prune threshold removes the mode.
    pub fn insert(&mut self, s: Vec<i64>, b: Complex<T>) {
        assert_eq!(s.len(), self.d, "multi-index dimension mismatch");
        if b.norm() <= T::lit(PRUNE_THRESHOLD) {
            self.coeffs.remove(&s);
        } else {
            self.coeffs.insert(s, b);
        }
    }

    pub fn get(&self, s: &[i64]) -> Complex<T> {
        self.coeffs
            .get(s)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex<T>)> {
        self.coeffs.iter()
    }

    pub fn l2_norm(&self) -> T {
        self.coeffs.values().map(|b| b.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest `|s_j|` over the support.
    pub fn max_frequency(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|s| s.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, phi: &[T]) -> Complex<T> {
        self.coeffs.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (s, &b)| {
            let dot = s
                .iter()
                .zip(phi)
                .fold(T::zero(), |a, (&si, &p)| a + T::of_i64(si) * p);
            acc + b * Complex::new(dot.cos(), -dot.sin())
        })
    }

    /// Modes with `‖s‖₂ ≤ k`.
    pub fn truncate(&self, k: T) -> Self {
        let k2 = k * k;
        Self {
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(s, _)| T::of_i64(norm_sq(s)) <= k2)
                .map(|(s, &b)| (s.clone(), b))
                .collect(),
        }
    }
}

pub fn sobolev_norm<T: Real>(h: &FourierSeries<T>, r: T) -> T {
    h.iter()
        .map(|(s, b)| (T::one() + T::of_i64(norm_sq(s))).powf(r) * b.norm_sqr())
        .sum::<T>()
        .sqrt()
}

/// Best-approximation error of `h` from modes `‖s‖₂ ≤ k`.
pub fn truncation_error<T: Real>(h: &FourierSeries<T>, k: T) -> T {
    let k2 = k * k;
    h.iter()
        .filter(|(s, _)| T::of_i64(norm_sq(s)) > k2)
        .map(|(_, b)| b.norm_sqr())
        .sum::<T>()
        .sqrt()
}

/// Lattice points with `k < ‖s‖₂ ≤ 2k`, in lexicographic order.
pub fn annulus_points<T: Real>(d: usize, k: T) -> Vec<Vec<i64>> {
    let k2 = k * k;
    let outer2 = T::lit(4.0) * k2;
    let m = (T::lit(2.0) * k).floor().to_i64().expect("finite radius");
    let mut out = Vec::new();
    let mut s = vec![-m; d];
    loop {
        let n2 = T::of_i64(norm_sq(&s));
        if n2 > k2 && n2 <= outer2 {
            out.push(s.clone());
        }
        let mut j = d;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if s[j] < m {
                s[j] += 1;
                break;
            }
            s[j] = -m;
        }
    }
}

/// Unit-Sobolev-norm series with Fourier energy on the annulus
/// `K < ‖s‖₂ ≤ 2K`: `b_s = c₀ (1 + ‖s‖²)^{−r/2}`, `c₀ = |A_K|^{−1/2}`.
/// Its truncation at `K` loses everything, certifying the lower bound.
pub fn annulus_witness<T: Real>(p: &SobolevParams<T>, k: T) -> Result<FourierSeries<T>> {
    if k < T::one() {
        return Err(Error::Domain(format!("witness radius must be >= 1, got {k}")));
    }
    let points = annulus_points(p.d, k);
    if points.is_empty() {
        return Err(Error::EmptyAnnulus { k: k.as_f64() });
    }
    let c0 = T::one() / T::of_usize(points.len()).sqrt();
    let mut h = FourierSeries::new(p.d);
    for s in points {
        let w = (T::one() + T::of_i64(norm_sq(&s))).powf(-p.r / T::lit(2.0));
        h.insert(s, Complex::new(c0 * w, T::zero()));
    }
    Ok(h)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    assert_eq!(xs.len(), ys.len());
    let n = T::of_usize(xs.len());
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let sxy: T = lx.iter().zip(&ly).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let sxx: T = lx.iter().map(|&a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerCurve<T> {
    pub k: Vec<T>,
    pub errors: Vec<T>,
    pub annulus_sizes: Vec<usize>,
    pub fitted_slope: T,
    pub claimed_exponent: T,
}

/// Witness errors over a list of radii with the fitted log-log rate.
///
/// `claimed_exponent` is the rate `d/2 − r` asserted for the minimax bound;
/// the exact witness errors decay like `K^{−r}`, so the two are reported
/// side by side.
pub fn minimax_lower_curve<T: Real>(p: &SobolevParams<T>, ks: &[T]) -> Result<LowerCurve<T>> {
    if ks.len() < 3 {
        return Err(Error::InvalidInput("need at least three radii".into()));
    }
    if ks.iter().any(|&k| k < T::one()) || ks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("radii must be >= 1 and strictly increasing".into()));
    }
    let rows: Vec<(T, usize)> = ks
        .par_iter()
        .map(|&k| {
            let w = annulus_witness(p, k)?;
            Ok((truncation_error(&w, k), w.len()))
        })
        .collect::<Result<_>>()?;
    let errors: Vec<T> = rows.iter().map(|r| r.0).collect();
    Ok(LowerCurve {
        k: ks.to_vec(),
        fitted_slope: loglog_slope(ks, &errors),
        annulus_sizes: rows.iter().map(|r| r.1).collect(),
        errors,
        claimed_exponent: p.rate_exponent(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacksonBound<T> {
    /// `(1 + K²)^{−r/2} ‖h‖_{W^r}`; always dominates the truncation error.
    pub rigorous: T,
    /// `K^{d/2 − r} ‖h‖_{W^r}` with unit constant.
    pub power_form: T,
}

pub fn jackson_upper<T: Real>(h: &FourierSeries<T>, p: &SobolevParams<T>, k: T) -> JacksonBound<T> {
    let norm = sobolev_norm(h, p.r);
    JacksonBound {
        rigorous: (T::one() + k * k).powf(-p.r / T::lit(2.0)) * norm,
        power_form: k.powf(p.rate_exponent()) * norm,
    }
}

/// `max_K truncation_error(h, K) / K^{d/2 − r}`, the smallest constant that
/// makes the stated upper-bound form hold on the given radii.
pub fn empirical_jackson_constant<T: Real>(h: &FourierSeries<T>, p: &SobolevParams<T>, ks: &[T]) -> T {
    ks.iter()
        .map(|&k| truncation_error(h, k) / k.powf(p.rate_exponent()))
        .fold(T::zero(), T::max)
}

/// Random member of the unit Sobolev sphere: `terms` distinct modes drawn
/// uniformly from `[−box_radius, box_radius]^d`, complex Gaussian
/// coefficients, rescaled to `‖h‖_{W^r} = 1`.
pub fn random_unit_ball_series<T: Real>(
    p: &SobolevParams<T>,
    box_radius: i64,
    terms: usize,
    seed: u64,
) -> FourierSeries<T> {
    let side = (2 * box_radius + 1) as u64;
    let capacity = side.checked_pow(p.d as u32).unwrap_or(u64::MAX);
    let terms = terms.min(capacity as usize).max(1);
    let mut rng = rng_from_seed(seed);
    let mut h = FourierSeries::new(p.d);
    while h.len() < terms {
        let s: Vec<i64> = (0..p.d).map(|_| rng.gen_range(-box_radius..=box_radius)).collect();
        if h.coeffs.contains_key(&s) {
            continue;
        }
        let (a, b) = gaussian_pair::<T, _>(&mut rng);
        h.insert(s, Complex::new(a, b));
    }
    let norm = sobolev_norm(&h, p.r);
    for b in h.coeffs.values_mut() {
        *b = *b / norm;
    }
    h
}

/// `d^{−(r − d/2)}` for each `(r, d)`, evaluated as `exp(−(r − d/2) ln d)`.
pub fn limit_probe<T: Real>(pairs: &[(T, usize)]) -> Result<Vec<T>> {
    pairs
        .iter()
        .map(|&(r, d)| {
            let p = SobolevParams::new(d, r)?;
            Ok((-p.alpha() * T::of_usize(d).ln()).exp())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single_mode(s: Vec<i64>) -> FourierSeries<f64> {
        let mut h = FourierSeries::new(s.len());
        h.insert(s, Complex::new(1.0, 0.0));
        h
    }

    #[test]
    fn params_validation() {
        assert!(SobolevParams::new(2, 1.0f64).is_err());
        assert!(SobolevParams::new(0, 1.0f64).is_err());
        let p = SobolevParams::new(2, 2.0f64).unwrap();
        assert_eq!(p.alpha(), 1.0);
        assert_eq!(p.rate_exponent(), -1.0);
    }

    #[test]
    fn pruning() {
        let mut h = FourierSeries::<f64>::new(1);
        h.insert(vec![1], Complex::new(1e-301, 0.0));
        assert!(h.is_empty());
        h.insert(vec![1], Complex::new(2.0, 0.0));
        h.insert(vec![1], Complex::new(0.0, 0.0));
        assert!(h.is_empty());
    }

    #[test]
    fn sobolev_norm_examples() {
        for r in [0.6, 1.0, 3.5] {
            assert_eq!(sobolev_norm(&single_mode(vec![0, 0]), r), 1.0);
        }
        let h = single_mode(vec![1, 1, 1]);
        assert_abs_diff_eq!(sobolev_norm(&h, 1.0), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn truncation_examples() {
        let h = single_mode(vec![3, 4]);
        assert_eq!(truncation_error(&h, 5.0), 0.0);
        assert_eq!(truncation_error(&h, 4.99), 1.0);
        let p = SobolevParams::new(2, 2.0).unwrap();
        let b = jackson_upper(&h, &p, 5.0);
        assert!(b.rigorous >= 0.0 && b.power_form >= 0.0);
    }

    #[test]
    fn witness_examples() {
        let p = SobolevParams::new(1, 2.0).unwrap();
        let w = annulus_witness(&p, 1.0).unwrap();
        let support: Vec<_> = w.iter().map(|(s, _)| s.clone()).collect();
        assert_eq!(support, vec![vec![-2], vec![2]]);
        let expected = (0.5f64).sqrt() * 5f64.powf(-1.0);
        assert_abs_diff_eq!(w.get(&[2]).re, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(sobolev_norm(&w, 2.0), 1.0, epsilon = 1e-12);

        // brute-force count on the [-4, 4]^2 box
        let mut count = 0;
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                let n2 = a * a + b * b;
                if n2 > 4 && n2 <= 16 {
                    count += 1;
                }
            }
        }
        let p2 = SobolevParams::new(2, 2.0).unwrap();
        let w2 = annulus_witness(&p2, 2.0).unwrap();
        assert_eq!(w2.len(), count);
        assert_abs_diff_eq!(sobolev_norm(&w2, 2.0), 1.0, epsilon = 1e-12);
        // whole witness lies outside radius K
        assert_abs_diff_eq!(truncation_error(&w2, 2.0), w2.l2_norm(), epsilon = 1e-15);

        assert!(annulus_witness(&p2, 0.5).is_err());
    }

    #[test]
    fn witness_energy_identity() {
        for (d, r, k) in [(1usize, 2.0, 7.0), (2, 2.0, 5.0), (3, 2.5, 3.0)] {
            let p = SobolevParams::new(d, r).unwrap();
            let w = annulus_witness(&p, k).unwrap();
            let pts = annulus_points(d, k);
            let c0sq = 1.0 / pts.len() as f64;
            let direct: f64 = pts
                .iter()
                .map(|s| c0sq * (1.0 + norm_sq(s) as f64).powf(-r))
                .sum();
            let e = truncation_error(&w, k);
            assert_abs_diff_eq!(e * e, direct, epsilon = 1e-15);
        }
    }

    #[test]
    fn annulus_growth_is_polynomial() {
        for d in 1..=3usize {
            let ks: &[f64] = if d == 3 { &[4.0, 8.0, 16.0] } else { &[4.0, 8.0, 16.0, 32.0, 64.0] };
            let ratios: Vec<f64> = ks
                .iter()
                .map(|&k| annulus_points(d, k).len() as f64 / k.powi(d as i32))
                .collect();
            let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
            assert!(lo > 0.5 && hi / lo < 1.6, "d = {d}: {ratios:?}");
        }
    }

    #[test]
    fn lower_curve_rates() {
        let p = SobolevParams::new(1, 2.0).unwrap();
        let c = minimax_lower_curve(&p, &[4.0, 8.0, 16.0, 32.0, 64.0]).unwrap();
        assert!((c.fitted_slope + 2.0f64).abs() <= 0.1, "{}", c.fitted_slope);
        assert_eq!(c.claimed_exponent, -1.5);

        let p = SobolevParams::new(2, 2.0).unwrap();
        let c = minimax_lower_curve(&p, &[4.0, 8.0, 16.0, 32.0]).unwrap();
        assert!((c.fitted_slope + 2.0f64).abs() <= 0.2, "{}", c.fitted_slope);
        assert_eq!(c.claimed_exponent, -1.0);

        assert!(minimax_lower_curve(&p, &[4.0, 8.0]).is_err());
        assert!(minimax_lower_curve(&p, &[4.0, 2.0, 8.0]).is_err());
    }

    #[test]
    fn jackson_examples() {
        let p = SobolevParams::new(1, 2.0).unwrap();
        let h = single_mode(vec![0]);
        let b = jackson_upper(&h, &p, 4.0);
        assert_abs_diff_eq!(b.rigorous, 1.0 / 17.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.power_form, 4f64.powf(-1.5), epsilon = 1e-15);
    }

    #[test]
    fn random_series_respect_rigorous_bound() {
        let p = SobolevParams::new(2, 2.0).unwrap();
        for seed in 0..20 {
            let h = random_unit_ball_series(&p, 10, 40, seed);
            assert_abs_diff_eq!(sobolev_norm(&h, 2.0), 1.0, epsilon = 1e-12);
            let mut prev = f64::INFINITY;
            for k in 1..=8 {
                let k = k as f64;
                let e = truncation_error(&h, k);
                assert!(e <= jackson_upper(&h, &p, k).rigorous);
                assert!(e <= prev);
                prev = e;
            }
            let c = empirical_jackson_constant(&h, &p, &[1.0, 2.0, 4.0, 8.0]);
            assert!(c.is_finite() && c >= 0.0);
        }
    }

    #[test]
    fn limit_probe_values() {
        let v = limit_probe(&[(4.0f64, 4usize), (7.0, 1)]).unwrap();
        assert_abs_diff_eq!(v[0], 1.0 / 16.0, epsilon = 1e-15);
        assert_eq!(v[1], 1.0);
        let pairs: Vec<(f64, usize)> = (1..=10)
            .map(|k| {
                let d = 1usize << k;
                (d as f64 / 2.0 + 1.0, d)
            })
            .collect();
        let v = limit_probe(&pairs).unwrap();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        assert!(*v.last().unwrap() < 1e-3);
        assert!(matches!(limit_probe(&[(1.0f64, 2usize)]), Err(Error::Domain(_))));
    }
}
