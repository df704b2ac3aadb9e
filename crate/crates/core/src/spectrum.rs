//! Spectral-gap sets of generators and the integer frequency envelope they
//! induce on the parameter torus.
//!
//! A generator with eigenvalues `λ` contributes the frequencies
//! `{λ_q − λ_p}` to the expectation value. When all gaps are integer
//! multiples of a common scale `γ`, rescaling the angle by `γ` puts the
//! frequencies on the integer lattice; the per-parameter integer gap sets
//! then bound the accessible spectrum through their product.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{commutator, eig_hermitian, CMatrix};
use crate::Real;

pub const DEFAULT_GAP_TOL: f64 = 1e-9;
pub const DEFAULT_COMMENSURATE_TOL: f64 = 1e-9;
/// Normalizations producing integer gaps above this are rejected.
pub const MAX_INT_GAP: i64 = 1_000_000;
/// Largest dimension for which [`coverage_radius_scan`] enumerates the box.
pub const MAX_SCAN_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSet<T> {
    pub gaps: Vec<T>,
    pub omega_max: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedGapSet<T> {
    pub gamma: T,
    pub int_gaps: Vec<i64>,
}

impl<T> NormalizedGapSet<T> {
    /// Largest integer gap magnitude.
    pub fn width(&self) -> i64 {
        self.int_gaps.iter().map(|g| g.abs()).max().unwrap_or(0)
    }

    pub fn contains(&self, s: i64) -> bool {
        self.int_gaps.binary_search(&s).is_ok()
    }

    /// Smallest `|t|` with `t ∉ int_gaps`.
    pub fn first_missing(&self) -> i64 {
        (1..)
            .find(|&t| !self.contains(t) || !self.contains(-t))
            .expect("gap set is finite")
    }
}

impl NormalizedGapSet<f64> {
    /// Integer gap set `{−w, …, w}` with unit scale.
    pub fn symmetric_range(w: i64) -> Self {
        Self {
            gamma: 1.0,
            int_gaps: (-w..=w).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEnvelope<T> {
    pub d: usize,
    pub per_param: Vec<NormalizedGapSet<T>>,
    pub k_l2: T,
    pub k_l1: T,
    pub k_cov: T,
}

impl<T: Real> FrequencyEnvelope<T> {
    /// Membership of an integer frequency vector in the product of the
    /// per-parameter gap sets.
    pub fn contains(&self, s: &[i64]) -> bool {
        s.len() == self.d && s.iter().zip(&self.per_param).all(|(&si, g)| g.contains(si))
    }

    /// `√d · max_j width_j`, the crude radius bound.
    pub fn radius_bound(&self) -> T {
        let w = self.per_param.iter().map(|g| g.width()).max().unwrap_or(0);
        T::of_usize(self.d).sqrt() * T::of_i64(w)
    }
}

/// All pairwise eigenvalue differences, merged within `tol`, sorted.
pub fn gap_set<T: Real>(values: &[T], tol: T) -> GapSet<T> {
    assert!(!values.is_empty(), "gap_set needs at least one eigenvalue");
    let mut diffs: Vec<T> = Vec::with_capacity(values.len() * values.len() / 2);
    for (i, &a) in values.iter().enumerate() {
        for &b in &values[i + 1..] {
            diffs.push((a - b).abs());
        }
    }
    diffs.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    // cluster positive differences; anything within tol of zero is zero
    let mut positive: Vec<T> = Vec::new();
    let mut cluster: Vec<T> = Vec::new();
    let flush = |cluster: &mut Vec<T>, out: &mut Vec<T>| {
        if !cluster.is_empty() {
            let mean = cluster.iter().copied().sum::<T>() / T::of_usize(cluster.len());
            out.push(mean);
            cluster.clear();
        }
    };
    for &g in diffs.iter().filter(|&&g| g > tol) {
        if let Some(&first) = cluster.first() {
            if g - first > tol {
                flush(&mut cluster, &mut positive);
            }
        }
        cluster.push(g);
    }
    flush(&mut cluster, &mut positive);

    let omega_max = positive.last().copied().unwrap_or_else(T::zero);
    let mut gaps: Vec<T> = positive.iter().rev().map(|&g| -g).collect();
    gaps.push(T::zero());
    gaps.extend(positive.iter().copied());
    GapSet { gaps, omega_max }
}

/// Gap set of a Hermitian generator.
pub fn generator_gap_set<T: Real>(h: &CMatrix<T>, tol: T) -> Result<GapSet<T>> {
    Ok(gap_set(&eig_hermitian(h)?.values, tol))
}

fn approx_gcd<T: Real>(a: T, b: T, tol: T) -> T {
    let (mut a, mut b) = if a >= b { (a, b) } else { (b, a) };
    while b > tol {
        let mut r = a - b * (a / b).floor();
        if b - r <= tol {
            r = T::zero();
        }
        a = b;
        b = r;
    }
    a
}

/// Finds the common scale `γ` of a gap set and the integer quotients.
///
/// `γ` comes from a tolerant Euclidean GCD over the positive gaps (the
/// continued-fraction expansion of their ratios), refined by least squares
/// against the rounded quotients and then verified gap by gap.
pub fn normalize_gaps<T: Real>(g: &GapSet<T>, tol: T) -> Result<NormalizedGapSet<T>> {
    let positive: Vec<T> = g.gaps.iter().copied().filter(|&x| x > T::zero()).collect();
    if positive.is_empty() {
        return Ok(NormalizedGapSet {
            gamma: T::one(),
            int_gaps: vec![0],
        });
    }
    let scaled_tol = tol * T::one().max(g.omega_max);
    let mut gamma = positive[0];
    for &x in &positive[1..] {
        gamma = approx_gcd(gamma, x, scaled_tol);
    }
    if gamma < tol {
        return Err(Error::NonCommensurate(format!(
            "common scale {gamma:e} fell below tolerance"
        )));
    }
    let limit = T::of_i64(MAX_INT_GAP);
    let quotients: Vec<T> = positive.iter().map(|&x| (x / gamma).round()).collect();
    if quotients.iter().any(|&k| k > limit) {
        return Err(Error::NonCommensurate(format!(
            "integer gaps exceed {MAX_INT_GAP} at scale {gamma:e}"
        )));
    }
    let num: T = positive.iter().zip(&quotients).map(|(&x, &k)| x * k).sum();
    let den: T = quotients.iter().map(|&k| k * k).sum();
    let gamma = num / den;
    for &x in &positive {
        let k = (x / gamma).round();
        if (x - gamma * k).abs() > scaled_tol {
            return Err(Error::NonCommensurate(format!(
                "gap {x} is not within tolerance of a multiple of {gamma}"
            )));
        }
    }
    let mut ints: BTreeSet<i64> = BTreeSet::new();
    ints.insert(0);
    for &x in &positive {
        let k = (x / gamma).round().to_i64().expect("bounded quotient");
        ints.insert(k);
        ints.insert(-k);
    }
    Ok(NormalizedGapSet {
        gamma,
        int_gaps: ints.into_iter().collect(),
    })
}

pub fn envelope<T: Real>(per_param: Vec<NormalizedGapSet<T>>) -> FrequencyEnvelope<T> {
    assert!(!per_param.is_empty(), "envelope needs at least one parameter");
    let widths: Vec<T> = per_param.iter().map(|g| T::of_i64(g.width())).collect();
    let k_l2 = widths.iter().map(|&w| w * w).sum::<T>().sqrt();
    let k_l1 = widths.iter().copied().sum();
    let k_cov = coverage_radius(&per_param);
    FrequencyEnvelope {
        d: per_param.len(),
        per_param,
        k_l2,
        k_l1,
        k_cov,
    }
}

/// Norm of the shortest integer vector outside the product gap set.
///
/// Every gap set contains 0, so zeroing all but one offending coordinate of
/// a missing point keeps it missing and never increases its norm. The
/// minimum is therefore attained on a coordinate axis, at the smallest
/// missing magnitude of some parameter.
pub fn coverage_radius<T: Real>(per_param: &[NormalizedGapSet<T>]) -> T {
    let m = per_param
        .iter()
        .map(|g| g.first_missing())
        .min()
        .expect("at least one parameter");
    T::of_i64(m)
}

/// Brute-force version of [`coverage_radius`]: scans every lattice point
/// of the box `Π_j [min_j − 1, max_j + 1]`. Only for `d ≤ MAX_SCAN_DIM`.
pub fn coverage_radius_scan<T: Real>(per_param: &[NormalizedGapSet<T>]) -> Result<T> {
    let d = per_param.len();
    if d == 0 || d > MAX_SCAN_DIM {
        return Err(Error::Domain(format!(
            "lattice scan supports 1..={MAX_SCAN_DIM} parameters, got {d}"
        )));
    }
    let lo: Vec<i64> = per_param.iter().map(|g| g.int_gaps[0] - 1).collect();
    let hi: Vec<i64> = per_param
        .iter()
        .map(|g| *g.int_gaps.last().expect("nonempty") + 1)
        .collect();
    let mut s = lo.clone();
    let mut best = i64::MAX;
    loop {
        let inside = s.iter().zip(per_param).all(|(&si, g)| g.contains(si));
        if !inside {
            best = best.min(s.iter().map(|&x| x * x).sum());
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == d {
                return Ok(T::of_i64(best).sqrt());
            }
            if s[k] < hi[k] {
                s[k] += 1;
                break;
            }
            s[k] = lo[k];
            k += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCommutation {
    pub i: usize,
    pub j: usize,
    pub commute: bool,
    pub commutator_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingReport {
    pub pairs: Vec<PairCommutation>,
    pub commuting_pairs: usize,
}

/// Flags generator pairs whose commutator vanishes relative to
/// `tol · ‖H_i‖ · ‖H_j‖`. Commuting generators merge under BCH and add no
/// new frequencies, so they are candidates for removal.
pub fn commuting_report<T: Real>(generators: &[CMatrix<T>], tol: T) -> Result<CommutingReport> {
    if let Some(first) = generators.first() {
        for g in generators {
            if g.dim() != first.dim() {
                return Err(Error::DimMismatch {
                    expected: first.dim(),
                    found: g.dim(),
                });
            }
            if !g.is_hermitian() {
                return Err(Error::NotHermitian {
                    asymmetry: g.hermitian_asymmetry().as_f64(),
                });
            }
        }
    }
    let mut pairs = Vec::new();
    for i in 0..generators.len() {
        for j in (i + 1)..generators.len() {
            let norm = commutator(&generators[i], &generators[j])?.frobenius();
            let scale = generators[i].frobenius() * generators[j].frobenius();
            pairs.push(PairCommutation {
                i,
                j,
                commute: norm <= tol * scale,
                commutator_norm: norm.as_f64(),
            });
        }
    }
    let commuting_pairs = pairs.iter().filter(|p| p.commute).count();
    Ok(CommutingReport {
        pairs,
        commuting_pairs,
    })
}
