//! Pauli matrices and Pauli-string helpers. Qubit 0 is the leftmost tensor
//! factor.

use num_complex::Complex;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::Real;

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub fn identity<T: Real>() -> CMatrix<T> {
    CMatrix::identity(2)
}

pub fn x<T: Real>() -> CMatrix<T> {
    CMatrix::from_vec(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
}

pub fn y<T: Real>() -> CMatrix<T> {
    CMatrix::from_vec(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
}

pub fn z<T: Real>() -> CMatrix<T> {
    CMatrix::from_vec(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap()
}

pub fn single<T: Real>(label: char) -> Result<CMatrix<T>> {
    match label.to_ascii_uppercase() {
        'I' => Ok(identity()),
        'X' => Ok(x()),
        'Y' => Ok(y()),
        'Z' => Ok(z()),
        other => Err(Error::InvalidInput(format!("unknown Pauli label '{other}'"))),
    }
}

/// Tensor product of single-qubit Paulis, e.g. `"IZ"` = `I ⊗ Z`.
pub fn string<T: Real>(labels: &str) -> Result<CMatrix<T>> {
    let mut chars = labels.chars();
    let first = chars
        .next()
        .ok_or_else(|| Error::InvalidInput("empty Pauli string".into()))?;
    chars.try_fold(single(first)?, |acc, ch| Ok(acc.kron(&single(ch)?)))
}

/// `P` acting on `qubit` of an `n`-qubit register.
pub fn on_qubit<T: Real>(p: &CMatrix<T>, qubit: usize, n: usize) -> CMatrix<T> {
    (0..n).fold(None::<CMatrix<T>>, |acc, k| {
        let factor = if k == qubit { p.clone() } else { identity() };
        Some(match acc {
            None => factor,
            Some(m) => m.kron(&factor),
        })
    })
    .expect("n >= 1")
}
