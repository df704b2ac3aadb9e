use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest sample size accepted by the exact enumeration.
pub const MAX_PAIRS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Exact two-sided p-value.
    pub p_two_sided: f64,
    /// Sum of ranks of positive differences `a − b`.
    pub w_plus: f64,
    /// Pairs used after dropping zero differences.
    pub n: usize,
    pub zeros_dropped: usize,
}

/// Exact Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped, tied magnitudes share their average rank,
/// and the null distribution of `W+` is obtained by enumerating all `2^n`
/// sign assignments. Ranks are handled doubled so that average ranks stay
/// integral and the enumeration is exact.
pub fn wilcoxon_exact(pairs: &[(f64, f64)]) -> Result<WilcoxonResult> {
    let diffs: Vec<f64> = pairs.iter().map(|&(a, b)| a - b).filter(|&d| d != 0.0).collect();
    let zeros_dropped = pairs.len() - diffs.len();
    let n = diffs.len();
    if n == 0 {
        return Err(Error::AllZeroDifferences);
    }
    if n > MAX_PAIRS {
        return Err(Error::InvalidInput(format!(
            "exact enumeration supports at most {MAX_PAIRS} non-zero pairs, got {n}"
        )));
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidInput("non-finite difference".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut rank2 = vec![0u64; n];
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && diffs[order[end + 1]].abs() == diffs[order[start]].abs() {
            end += 1;
        }
        // positions start..=end hold ranks start+1..=end+1
        let avg2 = (start + 1 + end + 1) as u64;
        for &k in &order[start..=end] {
            rank2[k] = avg2;
        }
        start = end + 1;
    }

    let observed: u64 = (0..n).filter(|&k| diffs[k] > 0.0).map(|k| rank2[k]).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1u64 << n) {
        let mut w = 0u64;
        let mut bits = mask;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            w += rank2[k];
            bits &= bits - 1;
        }
        if w <= observed {
            le += 1;
        }
        if w >= observed {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    let p = (2.0 * le.min(ge) as f64 / total).min(1.0);
    Ok(WilcoxonResult {
        p_two_sided: p,
        w_plus: observed as f64 / 2.0,
        n,
        zeros_dropped,
    })
}
