//! Oracles for the Fourier machinery: quadrature on uniform grids, a
//! least-squares best approximation and a discrete Fourier transform of
//! simulated expectations.

use std::f64::consts::PI;

use num_complex::Complex;
use proptest::prelude::*;
use qspec::bounds::{random_unit_ball_series, truncation_error, FourierSeries, SobolevParams};
use qspec::linalg::{haar_unitary, pauli, unitary_from_generator, CMatrix};
use qspec::qsim::{make_generator, trig_poly_coeffs, StateVector};

type C = Complex<f64>;

/// Tensor grid of `n` equispaced points per axis on `[0, 2π)^d`.
fn grid(d: usize, n: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![]];
    for _ in 0..d {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |k| {
                    let mut q = p.clone();
                    q.push(2.0 * PI * k as f64 / n as f64);
                    q
                })
            })
            .collect();
    }
    pts
}

fn lattice_ball(d: usize, k: f64) -> Vec<Vec<i64>> {
    let m = k.floor() as i64;
    let mut pts: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (-m..=m).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    pts.retain(|s| (s.iter().map(|x| x * x).sum::<i64>() as f64) <= k * k);
    pts
}

fn mode(s: &[i64], phi: &[f64]) -> C {
    let dot: f64 = s.iter().zip(phi).map(|(&a, &b)| a as f64 * b).sum();
    C::new(dot.cos(), -dot.sin())
}

/// Complex Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<C>>, mut b: Vec<C>) -> Vec<C> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![C::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let s: C = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn grid_l2(h: &FourierSeries<f64>, pts: &[Vec<f64>]) -> f64 {
    (pts.iter().map(|p| h.eval(p).norm_sqr()).sum::<f64>() / pts.len() as f64).sqrt()
}

#[test]
fn parseval_on_grid() {
    for d in 1..=2 {
        let p = SobolevParams::new(d, 2.0).unwrap();
        for seed in 0..5 {
            let h = random_unit_ball_series(&p, 6, 25, seed);
            let pts = grid(d, 2 * h.max_frequency() as usize + 3);
            let l2 = grid_l2(&h, &pts);
            assert!((l2 - h.l2_norm()).abs() < 1e-13, "d={d} seed={seed}");
            for k in [0.0, 1.0, 2.5, 4.0, 9.0] {
                let tail = h.iter().fold(FourierSeries::new(d), |mut acc, (s, &b)| {
                    if h.truncate(k).get(s) == C::new(0.0, 0.0) {
                        acc.insert(s.clone(), b);
                    }
                    acc
                });
                assert!((grid_l2(&tail, &pts) - truncation_error(&h, k)).abs() < 1e-13);
            }
        }
    }
}

/// The least-squares fit from the band-limited span, computed from the
/// normal equations on a grid that integrates the products exactly,
/// leaves exactly the truncation error.
#[test]
fn truncation_is_the_best_approximation() {
    for (d, m, k) in [(1usize, 8i64, 3.0), (1, 5, 4.5), (2, 4, 2.0), (2, 3, 2.3)] {
        let p = SobolevParams::new(d, 2.0).unwrap();
        let h = random_unit_ball_series(&p, m, 12, 100 + d as u64 + m as u64);
        let basis = lattice_ball(d, k);
        let pts = grid(d, 2 * m as usize + 2);
        let rows: Vec<Vec<C>> = pts.iter().map(|p| basis.iter().map(|s| mode(s, p)).collect()).collect();
        let f: Vec<C> = pts.iter().map(|p| h.eval(p)).collect();
        let nb = basis.len();
        let mut gram = vec![vec![C::new(0.0, 0.0); nb]; nb];
        let mut rhs = vec![C::new(0.0, 0.0); nb];
        for (row, &fv) in rows.iter().zip(&f) {
            for i in 0..nb {
                rhs[i] += row[i].conj() * fv;
                for j in 0..nb {
                    gram[i][j] += row[i].conj() * row[j];
                }
            }
        }
        let coef = solve(gram, rhs);
        let resid = rows
            .iter()
            .zip(&f)
            .map(|(row, &fv)| (fv - row.iter().zip(&coef).map(|(a, b)| a * b).sum::<C>()).norm_sqr())
            .sum::<f64>()
            / pts.len() as f64;
        assert!(
            (resid.sqrt() - truncation_error(&h, k)).abs() < 1e-12,
            "d={d} m={m} k={k}: {} vs {}",
            resid.sqrt(),
            truncation_error(&h, k)
        );
        for (s, c) in basis.iter().zip(&coef) {
            assert!((c - h.get(s)).norm() < 1e-12);
        }
    }
}

/// With integer gaps (grid step `2b/(N−1)` integral) the expectation is 2π-periodic, so its DFT on a fine
/// grid recovers every coefficient of the reconstruction.
#[test]
fn dft_of_simulation_matches_coefficients() {
    for (n, b, seed) in [(1usize, 1.0, 1u64), (2, 3.0, 2), (2, 1.5, 3), (3, 3.5, 4)] {
        let dim = 1 << n;
        let h = make_generator(dim, b, seed);
        let u = haar_unitary::<f64>(dim, seed + 50);
        let phi = StateVector::from_amplitudes((0..dim).map(|i| u[(i, 0)]).collect()).unwrap();
        let o = pauli::on_qubit(&pauli::x(), 0, n).matmul(&pauli::on_qubit(&pauli::z(), n - 1, n)).unwrap();
        let o = CMatrix::scale_real(&(&o + &o.adjoint()), 0.5);
        let tp = trig_poly_coeffs(&h, &phi, &o).unwrap();
        let samples = 64;
        let vals: Vec<f64> = (0..samples)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / samples as f64;
                let mut psi = phi.clone();
                psi.apply(&unitary_from_generator(&h, t).unwrap()).unwrap();
                psi.expectation(&o).unwrap()
            })
            .collect();
        let width = (2.0 * b) as i64;
        for w in -width..=width {
            // a_ω with f = Σ a_ω e^{−iωθ}
            let dft: C = vals
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let t = 2.0 * PI * k as f64 / samples as f64;
                    C::new(0.0, w as f64 * t).exp() * v
                })
                .sum::<C>()
                / samples as f64;
            assert!(
                (dft - tp.coefficient(w as f64, 1e-9)).norm() < 1e-10,
                "n={n} ω={w}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn truncation_error_is_pythagorean(seed in 0u64..1000, k in 0.0f64..6.0) {
        let p = SobolevParams::new(2, 1.5).unwrap();
        let h = random_unit_ball_series(&p, 5, 20, seed);
        let kept = h.truncate(k).l2_norm();
        let lost = truncation_error(&h, k);
        prop_assert!((kept * kept + lost * lost - h.l2_norm().powi(2)).abs() < 1e-14);
    }
}
