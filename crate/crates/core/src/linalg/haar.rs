use num_complex::Complex;

use super::CMatrix;
use crate::rng::{gaussian_pair, rng_from_seed};
use crate::Real;

/// Haar-distributed `N×N` unitary, deterministic in `seed`.
///
/// Draws a complex Ginibre matrix (entries `(a + ib)/√2`, `a, b ~ N(0, 1)`),
/// orthonormalizes its columns with twice-iterated Gram–Schmidt, and
/// multiplies each column by the unit phase of the corresponding diagonal
/// entry of the triangular factor.
pub fn haar_unitary<T: Real>(n: usize, seed: u64) -> CMatrix<T> {
    assert!(n >= 1, "dimension must be positive");
    let mut rng = rng_from_seed(seed);
    let inv_sqrt2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    // column-major working copy
    let mut cols: Vec<Vec<Complex<T>>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let (a, b) = gaussian_pair::<T, _>(&mut rng);
                    Complex::new(a * inv_sqrt2, b * inv_sqrt2)
                })
                .collect()
        })
        .collect();

    let mut r_diag = vec![Complex::new(T::zero(), T::zero()); n];
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let qk = &done[k];
                let proj = qk
                    .iter()
                    .zip(rest[0].iter())
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
                for (x, q) in rest[0].iter_mut().zip(qk) {
                    *x = *x - *q * proj;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        r_diag[j] = Complex::new(norm, T::zero());
        for x in cols[j].iter_mut() {
            *x = *x / norm;
        }
    }

    let mut u = CMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        let phase = r_diag[j] / r_diag[j].norm();
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x * phase;
        }
    }
    u
}
