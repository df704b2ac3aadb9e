//! Dynamical Lie algebras of generator sets: Lie closure, center, derived
//! algebra, and the `η = |Tr G| / ‖G‖_F` identity-weight metric.
//!
//! Algebras are real spans of anti-Hermitian matrices `iH`, kept as
//! orthonormal bases under `⟨A, B⟩ = Re Tr(A† B)`.

use std::collections::VecDeque;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{commutator, eig_hermitian, CMatrix};
use crate::Real;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieBasis<T: Real> {
    pub dim_matrix: usize,
    pub elements: Vec<CMatrix<T>>,
}

impl<T: Real> LieBasis<T> {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Norm of the component of `m` orthogonal to the span.
    pub fn residual_norm(&self, m: &CMatrix<T>) -> T {
        residual(&self.elements, m).frobenius()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlaReport {
    pub dim: usize,
    pub center_dim: usize,
    pub derived_dim: usize,
    pub eta_per_generator: Vec<f64>,
}

fn axpy<T: Real>(y: &mut CMatrix<T>, a: T, x: &CMatrix<T>) {
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi = *yi + *xi * a;
    }
}

/// Component of `m` orthogonal to an orthonormal list; two Gram–Schmidt
/// passes.
fn residual<T: Real>(basis: &[CMatrix<T>], m: &CMatrix<T>) -> CMatrix<T> {
    let mut r = m.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.real_inner(&r);
            axpy(&mut r, -c, b);
        }
    }
    r
}

fn anti_hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m - &m.adjoint()).scale_real(T::lit(0.5))
}

/// Appends the normalized residual of `m` if it exceeds `tol`.
fn try_extend<T: Real>(basis: &mut Vec<CMatrix<T>>, m: &CMatrix<T>, tol: T) -> bool {
    let r = residual(basis, m);
    let n = r.frobenius();
    if n > tol {
        basis.push(r.scale_real(T::one() / n));
        true
    } else {
        false
    }
}

/// Orthonormal basis of the real Lie algebra generated by `{i H_j}`.
///
/// Breadth-first: every new element is bracketed against all earlier ones,
/// with pairs processed in creation order, until no bracket leaves a
/// residual above `tol`.
pub fn lie_closure<T: Real>(generators: &[CMatrix<T>], tol: T, max_dim: usize) -> Result<LieBasis<T>> {
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidInput("no generators".into()))?;
    let n = first.dim();
    for g in generators {
        if g.dim() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: g.dim(),
            });
        }
        if !g.is_hermitian() {
            return Err(Error::NotHermitian {
                asymmetry: g.hermitian_asymmetry().as_f64(),
            });
        }
    }
    let i = Complex::new(T::zero(), T::one());
    let mut basis: Vec<CMatrix<T>> = Vec::new();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let push = |basis: &mut Vec<CMatrix<T>>, queue: &mut VecDeque<(usize, usize)>, m: &CMatrix<T>| {
        if try_extend(basis, m, tol) {
            let k = basis.len() - 1;
            if basis.len() > max_dim {
                return Err(Error::DimCap { cap: max_dim });
            }
            queue.extend((0..k).map(|j| (j, k)));
        }
        Ok(())
    };

    for g in generators {
        let norm = g.frobenius();
        if norm <= T::lit(1e-300) {
            continue;
        }
        push(&mut basis, &mut queue, &g.scale(i).scale_real(T::one() / norm))?;
    }
    while let Some((a, b)) = queue.pop_front() {
        let c = anti_hermitian_part(&commutator(&basis[a], &basis[b])?);
        if c.frobenius() <= tol {
            continue;
        }
        push(&mut basis, &mut queue, &c)?;
    }
    Ok(LieBasis {
        dim_matrix: n,
        elements: basis,
    })
}

/// Basis of `{X ∈ g : [X, Y] = 0 ∀ Y ∈ g}`.
///
/// With `M` the stacked map `x ↦ ([Σ x_a X_a, X_k])_k`, the center is the
/// null space of `M`, read off from the eigenvectors of the Gram matrix
/// `MᵀM` whose eigenvalues fall below `tol²`.
pub fn center_basis<T: Real>(g: &LieBasis<T>, tol: T) -> Result<Vec<CMatrix<T>>> {
    let dim = g.dim();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let images: Vec<Vec<CMatrix<T>>> = g
        .elements
        .iter()
        .map(|xa| g.elements.iter().map(|xk| commutator(xa, xk)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut gram = CMatrix::zeros(dim);
    for a in 0..dim {
        for b in a..dim {
            let v: T = images[a]
                .iter()
                .zip(&images[b])
                .map(|(p, q)| p.real_inner(q))
                .sum();
            gram[(a, b)] = Complex::new(v, T::zero());
            gram[(b, a)] = Complex::new(v, T::zero());
        }
    }
    let eig = eig_hermitian(&gram)?;
    let mut center: Vec<CMatrix<T>> = Vec::new();
    for (p, &lambda) in eig.values.iter().enumerate() {
        if lambda.max(T::zero()).sqrt() > tol {
            continue;
        }
        let mut m = CMatrix::zeros(g.dim_matrix);
        for (a, xa) in g.elements.iter().enumerate() {
            axpy(&mut m, eig.vectors[(a, p)].re, xa);
        }
        try_extend(&mut center, &m, tol);
    }
    Ok(center)
}

/// Basis of `[g, g] = span{[X_a, X_b]}`.
pub fn derived_algebra<T: Real>(g: &LieBasis<T>, tol: T) -> Result<Vec<CMatrix<T>>> {
    let mut out = Vec::new();
    for a in 0..g.dim() {
        for b in (a + 1)..g.dim() {
            let c = anti_hermitian_part(&commutator(&g.elements[a], &g.elements[b])?);
            if c.frobenius() > tol {
                try_extend(&mut out, &c, tol);
            }
        }
    }
    Ok(out)
}

/// `|Tr G| / ‖G‖_F`: `√N` for multiples of the identity, zero for
/// traceless generators. Two passes over the entries.
pub fn eta<T: Real>(g: &CMatrix<T>) -> Result<T> {
    let f2: T = g.as_slice().iter().map(|z| z.norm_sqr()).sum();
    if f2.sqrt() <= T::lit(1e-300) {
        return Err(Error::ZeroMatrix);
    }
    // ratio of squares keeps η(I_N) = √N exact
    Ok((g.trace().norm_sqr() / f2).sqrt())
}

/// Closure, center and derived dimensions plus `η` of each generator.
pub fn dla_report<T: Real>(generators: &[CMatrix<T>], tol: T, max_dim: usize) -> Result<DlaReport> {
    let g = lie_closure(generators, tol, max_dim)?;
    Ok(DlaReport {
        dim: g.dim(),
        center_dim: center_basis(&g, tol)?.len(),
        derived_dim: derived_algebra(&g, tol)?.len(),
        eta_per_generator: generators
            .iter()
            .map(|h| eta(h).map(Real::as_f64))
            .collect::<Result<_>>()?,
    })
}
