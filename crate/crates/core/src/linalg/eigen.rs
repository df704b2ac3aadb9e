//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` and then applies
//! the classical real Jacobi rotation that annihilates it. Sweeps run over all
//! `p < q` pairs in row order until the off-diagonal Frobenius norm drops to
//! `1e-13 · ‖H‖_F`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::CMatrix;
use crate::error::{Error, Result};
use crate::Real;

pub const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix; `values` ascending, eigenvectors in the
/// columns of `vectors`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
        let n = self.values.len();
        let v = &self.vectors;
        let weights: Vec<Complex<T>> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (k, &w) in weights.iter().enumerate() {
                    acc = acc + v[(i, k)] * w * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.reconstruct_with(|l| Complex::new(l, T::zero()))
    }

    /// Component `k` of eigenvector `p`, i.e. `V[k][p]`.
    #[inline]
    pub fn vector_entry(&self, k: usize, p: usize) -> Complex<T> {
        self.vectors[(k, p)]
    }
}

fn off_diagonal_norm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn eig_hermitian<T: Real>(h: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian {
            asymmetry: h.hermitian_asymmetry().as_f64(),
        });
    }
    let n = h.dim();
    let mut a = h.clone();
    // symmetrize exactly so rounding asymmetry cannot accumulate
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()).scale(T::lit(0.5));
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let threshold = T::tol(1e-13) * h.frobenius();

    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off.as_f64(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == T::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // negligible pivot relative to the diagonal gap
    if mag <= T::epsilon() * T::lit(1e-3) * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex::new(T::zero(), T::zero());
        a[(q, p)] = Complex::new(T::zero(), T::zero());
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let tau = (aqq - app) / (T::lit(2.0) * mag);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let n = a.dim();
    // J: J_pp = c, J_qp = -s e^{-iφ}, J_pq = s, J_qq = c e^{-iφ}
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;
    // A <- A J (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * jqp;
        a[(k, q)] = akp * s + akq * jqq;
    }
    // A <- J† A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * jqp.conj();
        a[(q, k)] = apk * s + aqk * jqq.conj();
    }
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
    // V <- V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * s + vkq * jqq;
    }
}

/// `exp(-i θ H)` from a precomputed eigendecomposition.
pub fn unitary_from_eigen<T: Real>(eig: &HermitianEigen<T>, theta: T) -> CMatrix<T> {
    eig.reconstruct_with(|l| {
        let phi = -theta * l;
        Complex::new(phi.cos(), phi.sin())
    })
}

/// `exp(-i θ H)` computed as `V diag(exp(-i θ λ)) V†`.
pub fn unitary_from_generator<T: Real>(h: &CMatrix<T>, theta: T) -> Result<CMatrix<T>> {
    Ok(unitary_from_eigen(&eig_hermitian(h)?, theta))
}
