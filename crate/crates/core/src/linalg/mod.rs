//! Dense complex linear algebra: the matrix type, Hermitian
//! eigendecomposition, generator exponentials and Haar sampling.

mod eigen;
mod haar;
mod matrix;
pub mod pauli;

use num_complex::Complex;

pub use eigen::{eig_hermitian, unitary_from_eigen, unitary_from_generator, HermitianEigen, MAX_SWEEPS};
pub use haar::haar_unitary;
pub use matrix::CMatrix;

use crate::error::Result;
use crate::Real;

/// `[A, B] = AB − BA`.
pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    ab.try_sub(&ba)
}

/// Frobenius norm and trace in one call.
pub fn frob_trace<T: Real>(m: &CMatrix<T>) -> (T, Complex<T>) {
    (m.frobenius(), m.trace())
}
