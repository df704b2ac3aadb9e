//! State-vector simulation of the encoding / entangler / generator-layer
//! circuit family, its trigonometric-polynomial structure, and gradients.
//!
//! Conventions: qubit 0 is the leftmost (most significant) tensor factor,
//! `RY(x) = exp(−i (x/2) Y)`, and layer `l` applies `exp(−i θ_l H_l)` after
//! layers `1..l`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, haar_unitary, pauli, unitary_from_eigen, CMatrix, HermitianEigen};
use crate::spectrum::gap_set;
use crate::Real;

/// Gap values closer than this are merged when grouping coefficients.
pub const COEFF_GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Self {
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Self { amplitudes }
    }

    /// Normalizes the given amplitudes; the length must be a power of two.
    pub fn from_amplitudes(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() || !amplitudes.len().is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "state length {} is not a power of two",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::lit(1e-300) {
            return Err(Error::ZeroMatrix);
        }
        for z in amplitudes.iter_mut() {
            *z = *z / norm;
        }
        Ok(Self { amplitudes })
    }

    /// Tensor product of single-qubit states, qubit 0 leftmost.
    pub fn product(qubits: &[[Complex<T>; 2]]) -> Result<Self> {
        let mut amps = vec![Complex::new(T::one(), T::zero())];
        for q in qubits {
            amps = amps.iter().flat_map(|&a| [a * q[0], a * q[1]]).collect();
        }
        Self::from_amplitudes(amps)
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn apply(&mut self, u: &CMatrix<T>) -> Result<()> {
        self.amplitudes = u.matvec(&self.amplitudes)?;
        Ok(())
    }

    /// Applies a 2×2 gate to `qubit`.
    pub fn apply_single(&mut self, qubit: usize, gate: &CMatrix<T>) {
        let n = self.qubits();
        let stride = 1usize << (n - 1 - qubit);
        for base in 0..self.dim() {
            if base & stride != 0 {
                continue;
            }
            let (a0, a1) = (self.amplitudes[base], self.amplitudes[base | stride]);
            self.amplitudes[base] = gate[(0, 0)] * a0 + gate[(0, 1)] * a1;
            self.amplitudes[base | stride] = gate[(1, 0)] * a0 + gate[(1, 1)] * a1;
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let n = self.qubits();
        let cmask = 1usize << (n - 1 - control);
        let tmask = 1usize << (n - 1 - target);
        for i in 0..self.dim() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }

    /// `⟨ψ|O|ψ⟩` (real part; exact for Hermitian `O`).
    pub fn expectation(&self, o: &CMatrix<T>) -> Result<T> {
        let ov = o.matvec(&self.amplitudes)?;
        Ok(inner(&self.amplitudes, &ov).re)
    }
}

fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

pub fn ry<T: Real>(x: T) -> CMatrix<T> {
    let (s, c) = (x / T::lit(2.0)).sin_cos();
    let z = T::zero();
    CMatrix::from_vec(
        2,
        vec![Complex::new(c, z), Complex::new(-s, z), Complex::new(s, z), Complex::new(c, z)],
    )
    .expect("2x2")
}

/// CNOT ring `0→1, 1→2, …, n−1→0`; a single `0→1` for two qubits and no
/// gates for one.
pub fn ring_entangler(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// CNOT chain `0→1, …, n−2→n−1`.
pub fn chain_entangler(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntanglerKind {
    Ring,
    Chain,
    None,
}

impl EntanglerKind {
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            EntanglerKind::Ring => ring_entangler(n),
            EntanglerKind::Chain => chain_entangler(n),
            EntanglerKind::None => Vec::new(),
        }
    }
}

/// `H = U Λ U†` with `Λ` the equally spaced grid `−b_max..=b_max` on `N`
/// points and `U` Haar-random from `seed`.
pub fn make_generator<T: Real>(n: usize, b_max: T, seed: u64) -> CMatrix<T> {
    assert!(n >= 2, "generator dimension must be at least 2");
    let u = haar_unitary::<T>(n, seed);
    make_generator_with_basis(&u, b_max)
}

/// Same grid spectrum in a caller-supplied eigenbasis.
pub fn make_generator_with_basis<T: Real>(u: &CMatrix<T>, b_max: T) -> CMatrix<T> {
    let n = u.dim();
    let step = T::lit(2.0) * b_max / T::of_usize(n - 1);
    let grid: Vec<T> = (0..n).map(|i| -b_max + step * T::of_usize(i)).collect();
    let h = &(u * &CMatrix::from_diag_real(&grid)) * &u.adjoint();
    (&h + &h.adjoint()).scale_real(T::lit(0.5))
}

/// Immutable circuit description with cached generator eigendecompositions.
#[derive(Debug, Clone)]
pub struct CircuitSpec<T: Real> {
    n: usize,
    generators: Vec<CMatrix<T>>,
    eigs: Vec<HermitianEigen<T>>,
    entangler: Vec<(usize, usize)>,
    observable: CMatrix<T>,
    diag_observable: Option<Vec<T>>,
}

impl<T: Real> CircuitSpec<T> {
    /// Circuit with `Z` on qubit 0 as the observable.
    pub fn new(n: usize, generators: Vec<CMatrix<T>>, entangler: Vec<(usize, usize)>) -> Result<Self> {
        let z0 = pauli::on_qubit(&pauli::z(), 0, n.max(1));
        Self::with_observable(n, generators, entangler, z0)
    }

    pub fn with_observable(
        n: usize,
        generators: Vec<CMatrix<T>>,
        entangler: Vec<(usize, usize)>,
        observable: CMatrix<T>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("circuit needs at least one qubit".into()));
        }
        let dim = 1usize << n;
        for g in generators.iter().chain(std::iter::once(&observable)) {
            if g.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
        }
        if !observable.is_hermitian() {
            return Err(Error::NotHermitian {
                asymmetry: observable.hermitian_asymmetry().as_f64(),
            });
        }
        for &(c, t) in &entangler {
            if c == t || c >= n || t >= n {
                return Err(Error::InvalidInput(format!("invalid CNOT pair ({c}, {t}) on {n} qubits")));
            }
        }
        let eigs = generators.iter().map(eig_hermitian).collect::<Result<Vec<_>>>()?;
        let is_diag = (0..dim).all(|i| (0..dim).all(|j| i == j || observable[(i, j)].norm() == T::zero()));
        let diag_observable = is_diag.then(|| (0..dim).map(|i| observable[(i, i)].re).collect());
        Ok(Self {
            n,
            generators,
            eigs,
            entangler,
            observable,
            diag_observable,
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[CMatrix<T>] {
        &self.generators
    }

    pub fn eigens(&self) -> &[HermitianEigen<T>] {
        &self.eigs
    }

    pub fn entangler(&self) -> &[(usize, usize)] {
        &self.entangler
    }

    pub fn observable(&self) -> &CMatrix<T> {
        &self.observable
    }

    /// `U_enta RY(x)^{⊗n} |0…0⟩`.
    pub fn encoded_state(&self, x: T) -> StateVector<T> {
        let (s, c) = (x / T::lit(2.0)).sin_cos();
        let z = T::zero();
        let q = [Complex::new(c, z), Complex::new(s, z)];
        let mut amps = vec![Complex::new(T::one(), z)];
        for _ in 0..self.n {
            amps = amps.iter().flat_map(|&a| [a * q[0], a * q[1]]).collect();
        }
        let mut psi = StateVector { amplitudes: amps };
        for &(c, t) in &self.entangler {
            psi.apply_cnot(c, t);
        }
        psi
    }

    /// `U_L(θ_L) ⋯ U_1(θ_1)`.
    pub fn layer_unitary(&self, theta: &[T]) -> Result<CMatrix<T>> {
        self.check_theta(theta)?;
        let mut w = CMatrix::identity(1 << self.n);
        for (eig, &t) in self.eigs.iter().zip(theta) {
            w = unitary_from_eigen(eig, t).matmul(&w)?;
        }
        Ok(w)
    }

    fn check_theta(&self, theta: &[T]) -> Result<()> {
        if theta.len() != self.depth() {
            return Err(Error::DimMismatch {
                expected: self.depth(),
                found: theta.len(),
            });
        }
        Ok(())
    }

    /// `⟨ψ|O|ψ⟩` for `ψ = w · state`.
    fn expect_after(&self, w: &CMatrix<T>, state: &StateVector<T>) -> T {
        let out = w.matvec(state.amplitudes()).expect("dims validated");
        match &self.diag_observable {
            Some(d) => out.iter().zip(d).map(|(a, &o)| a.norm_sqr() * o).sum(),
            None => {
                let ov = self.observable.matvec(&out).expect("dims validated");
                inner(&out, &ov).re
            }
        }
    }

    /// Model outputs for many prepared input states at one parameter point.
    pub fn forward_states(&self, theta: &[T], states: &[StateVector<T>]) -> Result<Vec<T>> {
        let w = self.layer_unitary(theta)?;
        Ok(states.iter().map(|s| self.expect_after(&w, s)).collect())
    }

    /// Central-difference derivatives of the outputs: entry `[l][i]` is
    /// `∂f(θ, x_i)/∂θ_l`.
    pub fn fd_jacobian(&self, theta: &[T], states: &[StateVector<T>], step: T) -> Result<Vec<Vec<T>>> {
        self.check_theta(theta)?;
        let mut shifted = theta.to_vec();
        (0..theta.len())
            .map(|l| {
                shifted[l] = theta[l] + step;
                let plus = self.forward_states(&shifted, states)?;
                shifted[l] = theta[l] - step;
                let minus = self.forward_states(&shifted, states)?;
                shifted[l] = theta[l];
                Ok(plus
                    .iter()
                    .zip(&minus)
                    .map(|(&p, &m)| (p - m) / (T::lit(2.0) * step))
                    .collect())
            })
            .collect()
    }
}

pub fn circuit_forward<T: Real>(spec: &CircuitSpec<T>, theta: &[T], x: T) -> Result<T> {
    let w = spec.layer_unitary(theta)?;
    Ok(spec.expect_after(&w, &spec.encoded_state(x)))
}

/// Central finite-difference gradient of [`circuit_forward`] in `θ`.
pub fn grad_fd<T: Real>(spec: &CircuitSpec<T>, theta: &[T], x: T, step: T) -> Result<Vec<T>> {
    if step <= T::zero() {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    let state = [spec.encoded_state(x)];
    Ok(spec
        .fd_jacobian(theta, &state, step)?
        .into_iter()
        .map(|col| col[0])
        .collect())
}

/// `dC/dθ` for `C(θ) = ⟨s|U†OU|s⟩`, `U = exp(−iθH)`, using `∂U = −iHU`:
/// `∂C = ⟨s|(∂U)†OU + U†O∂U|s⟩ = 2 Re ⟨Us|O(−iH)Us⟩`.
pub fn grad_analytic_1p<T: Real>(h: &CMatrix<T>, theta: T, o: &CMatrix<T>, state: &StateVector<T>) -> Result<T> {
    let eig = eig_hermitian(h)?;
    grad_analytic_1p_eig(&eig, h, theta, o, state)
}

/// [`grad_analytic_1p`] with a precomputed eigendecomposition of `h`.
pub fn grad_analytic_1p_eig<T: Real>(
    eig: &HermitianEigen<T>,
    h: &CMatrix<T>,
    theta: T,
    o: &CMatrix<T>,
    state: &StateVector<T>,
) -> Result<T> {
    let v = unitary_from_eigen(eig, theta).matvec(state.amplitudes())?;
    let hv = h.matvec(&v)?;
    let minus_i = Complex::new(T::zero(), -T::one());
    let dv: Vec<Complex<T>> = hv.iter().map(|&z| z * minus_i).collect();
    let odv = o.matvec(&dv)?;
    Ok(T::lit(2.0) * inner(&v, &odv).re)
}

/// `f(θ) = Σ_ω a_ω e^{−iθω}`, terms sorted by `ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly<T> {
    pub terms: Vec<(T, Complex<T>)>,
}

impl<T: Real> TrigPoly<T> {
    pub fn eval(&self, theta: T) -> Complex<T> {
        self.terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &(w, a)| {
            let phi = -theta * w;
            acc + a * Complex::new(phi.cos(), phi.sin())
        })
    }

    pub fn coefficient(&self, omega: T, tol: T) -> Complex<T> {
        self.terms
            .iter()
            .find(|(w, _)| (*w - omega).abs() <= tol)
            .map(|&(_, a)| a)
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Frequencies whose coefficient modulus exceeds `threshold`.
    pub fn support(&self, threshold: T) -> Vec<T> {
        self.terms.iter().filter(|(_, a)| a.norm() > threshold).map(|&(w, _)| w).collect()
    }
}

/// Fourier coefficients of `θ ↦ ⟨φ|U(θ)† O U(θ)|φ⟩`, `U = exp(−iθH)`.
///
/// With `c_p = ⟨p|φ⟩` in the eigenbasis of `H` and `O_pq = ⟨p|O|q⟩`,
/// `a_ω = Σ_{λ_q − λ_p = ω} conj(c_p) O_pq c_q`, so only eigenvalue gaps
/// appear as frequencies and `a_{−ω} = conj(a_ω)`.
pub fn trig_poly_coeffs<T: Real>(h: &CMatrix<T>, phi: &StateVector<T>, o: &CMatrix<T>) -> Result<TrigPoly<T>> {
    let n = h.dim();
    for d in [phi.dim(), o.dim()] {
        if d != n {
            return Err(Error::DimMismatch { expected: n, found: d });
        }
    }
    let eig = eig_hermitian(h)?;
    let v = &eig.vectors;
    let c: Vec<Complex<T>> = (0..n)
        .map(|p| (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + v[(k, p)].conj() * phi.amplitudes()[k]))
        .collect();
    // O in the eigenbasis: V† O V
    let o_eig = &(&v.adjoint() * o) * v;

    let tol = T::lit(COEFF_GAP_TOL);
    let gaps = gap_set(&eig.values, tol).gaps;
    let mut terms: Vec<(T, Complex<T>)> = gaps.iter().map(|&w| (w, Complex::new(T::zero(), T::zero()))).collect();
    for p in 0..n {
        for q in 0..n {
            let w = eig.values[q] - eig.values[p];
            let idx = nearest(&gaps, w);
            terms[idx].1 = terms[idx].1 + c[p].conj() * o_eig[(p, q)] * c[q];
        }
    }
    Ok(TrigPoly { terms })
}

fn nearest<T: Real>(sorted: &[T], w: T) -> usize {
    let pos = sorted.partition_point(|&g| g < w);
    match pos {
        0 => 0,
        p if p == sorted.len() => p - 1,
        p => {
            if (sorted[p] - w).abs() < (w - sorted[p - 1]).abs() {
                p
            } else {
                p - 1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::generator_gap_set;
    use approx::assert_abs_diff_eq;

    fn pz0(n: usize) -> CMatrix<f64> {
        pauli::on_qubit(&pauli::z(), 0, n)
    }

    #[test]
    fn entanglers() {
        assert_eq!(ring_entangler(1), vec![]);
        assert_eq!(ring_entangler(2), vec![(0, 1)]);
        assert_eq!(ring_entangler(3), vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(chain_entangler(3), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn gate_conventions() {
        // CNOT 0→1 on |10⟩ gives |11⟩; qubit 0 is the leftmost factor
        let mut s = StateVector::<f64>::zero(2);
        s.apply_single(0, &pauli::x());
        assert_eq!(s.amplitudes()[2].re, 1.0);
        s.apply_cnot(0, 1);
        assert_eq!(s.amplitudes()[3].re, 1.0);
        // RY(π)|0⟩ = |1⟩
        let mut s = StateVector::<f64>::zero(1);
        s.apply_single(0, &ry(std::f64::consts::PI));
        assert_abs_diff_eq!(s.amplitudes()[1].re, 1.0, epsilon = 1e-15);
        // apply_single agrees with the full Kronecker operator
        let mut a = StateVector::<f64>::product(&[
            [Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)],
            [Complex::new(1.0, 0.0), Complex::new(1.0, 1.0)],
            [Complex::new(0.3, 0.1), Complex::new(-0.2, 0.5)],
        ])
        .unwrap();
        let mut b = a.clone();
        let g = ry(0.7);
        a.apply_single(1, &g);
        b.apply(&pauli::on_qubit(&g, 1, 3)).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn make_generator_examples() {
        let h = make_generator::<f64>(4, 0.0, 1);
        assert_eq!(h.frobenius(), 0.0);
        let h = make_generator::<f64>(8, 10.0, 5);
        assert_eq!(h.hermitian_asymmetry(), 0.0);
        let eig = eig_hermitian(&h).unwrap();
        for (i, &l) in eig.values.iter().enumerate() {
            assert_abs_diff_eq!(l, -10.0 + 20.0 * i as f64 / 7.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn forward_examples() {
        let n = 3;
        let gens: Vec<CMatrix<f64>> = (0..5).map(|l| make_generator(8, 10.0, 100 + l)).collect();
        let spec = CircuitSpec::new(n, gens, ring_entangler(n)).unwrap();
        assert_abs_diff_eq!(circuit_forward(&spec, &[0.0; 5], 0.0).unwrap(), 1.0, epsilon = 1e-14);
        for k in 0..20 {
            let x = -1.0 + 0.1 * k as f64;
            let theta: Vec<f64> = (0..5).map(|l| (x * l as f64).sin() * 3.0).collect();
            let f = circuit_forward(&spec, &theta, x).unwrap();
            assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&f));
        }
        assert!(circuit_forward(&spec, &[0.0; 4], 0.0).is_err());
    }

    #[test]
    fn norm_preserved_gate_by_gate() {
        for n in 1..=4usize {
            let gens: Vec<CMatrix<f64>> = (0..8).map(|l| make_generator(1 << n, 2.0, 40 * n as u64 + l)).collect();
            let spec = CircuitSpec::new(n, gens, ring_entangler(n)).unwrap();
            let mut psi = spec.encoded_state(0.37);
            assert!((psi.norm() - 1.0).abs() <= 1e-10);
            for (l, eig) in spec.eigens().iter().enumerate() {
                psi.apply(&unitary_from_eigen(eig, 0.3 * l as f64 - 1.0)).unwrap();
                assert!((psi.norm() - 1.0).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn spec_validation() {
        let g = vec![make_generator::<f64>(4, 1.0, 0)];
        assert!(CircuitSpec::new(2, g.clone(), vec![(0, 0)]).is_err());
        assert!(CircuitSpec::new(2, g.clone(), vec![(0, 2)]).is_err());
        assert!(CircuitSpec::new(3, g.clone(), vec![]).is_err());
        let bad_obs = CMatrix::from_vec(4, vec![Complex::new(0.0, 1.0); 16]).unwrap();
        assert!(CircuitSpec::with_observable(2, g, vec![], bad_obs).is_err());
    }

    #[test]
    fn trig_poly_pauli_example() {
        let zero = StateVector::<f64>::zero(1);
        let tp = trig_poly_coeffs(&pauli::y(), &zero, &pauli::z()).unwrap();
        assert_abs_diff_eq!(tp.coefficient(2.0, 1e-9).re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(tp.coefficient(-2.0, 1e-9).re, 0.5, epsilon = 1e-14);
        assert!(tp.coefficient(0.0, 1e-9).norm() < 1e-14);
        for k in 0..50 {
            let t = 0.13 * k as f64;
            assert_abs_diff_eq!(tp.eval(t).re, (2.0 * t).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn trig_poly_matches_simulation() {
        for seed in 0..10u64 {
            let n = 1 + (seed % 2) as usize;
            let h = make_generator::<f64>(1 << n, 1.5, seed);
            let o = pz0(n);
            let spec = CircuitSpec::with_observable(n, vec![h.clone()], vec![], o.clone()).unwrap();
            let phi = spec.encoded_state(0.4 + 0.1 * seed as f64);
            let tp = trig_poly_coeffs(&h, &phi, &o).unwrap();
            // value at zero and reality
            let sum: Complex<f64> = tp.terms.iter().map(|t| t.1).sum();
            assert_abs_diff_eq!(sum.re, phi.expectation(&o).unwrap(), epsilon = 1e-12);
            assert!(sum.im.abs() < 1e-12);
            for &(w, a) in &tp.terms {
                assert!((tp.coefficient(-w, 1e-9) - a.conj()).norm() < 1e-12);
            }
            let gaps = generator_gap_set(&h, 1e-9).unwrap().gaps;
            for w in tp.support(1e-10) {
                assert!(gaps.iter().any(|&g| (g - w).abs() <= 1e-9));
            }
            for k in 0..100 {
                let t = -3.0 + 0.06 * k as f64;
                let w = spec.layer_unitary(&[t]).unwrap();
                let direct = spec.expect_after(&w, &phi);
                assert!((direct - tp.eval(t).re).abs() <= 1e-9);
            }
        }
    }

    fn w_generator(w: f64) -> CMatrix<f64> {
        let iy = pauli::string::<f64>("IY").unwrap();
        &iy.scale_real(w) + &CMatrix::identity(4)
    }

    #[test]
    fn analytic_gradient_closed_form() {
        let o = pauli::string::<f64>("IZ").unwrap();
        let s = StateVector::zero(2);
        for w in [0.0, 0.25, 0.7, 1.0] {
            let h = w_generator(w);
            for k in 0..25 {
                let t = -6.0 + 0.5 * k as f64;
                let g = grad_analytic_1p(&h, t, &o, &s).unwrap();
                assert_abs_diff_eq!(g, -2.0 * w * (2.0 * w * t).sin(), epsilon = 1e-12);
                if w == 0.0 {
                    assert_eq!(g, 0.0);
                }
            }
        }
    }

    #[test]
    fn fd_gradient_examples() {
        // identity generators: θ is a global phase
        let spec = CircuitSpec::new(2, vec![CMatrix::<f64>::identity(4); 3], ring_entangler(2)).unwrap();
        let g = grad_fd(&spec, &[0.3, -1.0, 2.0], 0.5, 1e-4).unwrap();
        assert!(g.iter().all(|&x| x.abs() < 1e-10));
        assert!(grad_fd(&spec, &[0.0; 3], 0.5, 0.0).is_err());

        // cos 2θ circuit is stationary at θ = 0
        let spec = CircuitSpec::new(1, vec![pauli::y::<f64>()], vec![]).unwrap();
        let g = grad_fd(&spec, &[0.0], 0.0, 1e-4).unwrap();
        assert!(g[0].abs() < 1e-8f64);
    }

    #[test]
    fn fd_matches_analytic_single_parameter() {
        for seed in 0..6u64 {
            let n = 1 + (seed % 2) as usize;
            let h = make_generator::<f64>(1 << n, 1.0, 50 + seed);
            let o = pz0(n);
            let spec = CircuitSpec::with_observable(n, vec![h.clone()], ring_entangler(n), o.clone()).unwrap();
            let x = 0.3 * seed as f64 - 0.5;
            let state = spec.encoded_state(x);
            for k in 0..15 {
                let t = -2.0 + 0.3 * k as f64;
                let fd = grad_fd(&spec, &[t], x, 1e-4).unwrap()[0];
                let exact = grad_analytic_1p(&h, t, &o, &state).unwrap();
                assert!((fd - exact).abs() <= 1e-6, "{fd} vs {exact}");
            }
        }
    }

    #[test]
    fn fd_is_second_order() {
        let h = make_generator::<f64>(4, 1.0, 9);
        let o = pz0(2);
        let spec = CircuitSpec::with_observable(2, vec![h.clone()], ring_entangler(2), o.clone()).unwrap();
        let state = spec.encoded_state(0.2);
        let exact = grad_analytic_1p(&h, 0.8, &o, &state).unwrap();
        let err = |step: f64| (grad_fd(&spec, &[0.8], 0.2, step).unwrap()[0] - exact).abs();
        let (e1, e2) = (err(0.02), err(0.01));
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn single_precision_forward() {
        let h = make_generator::<f32>(2, 1.0, 3);
        let spec = CircuitSpec::new(1, vec![h], vec![]).unwrap();
        let f = circuit_forward(&spec, &[0.0f32], 0.0).unwrap();
        assert!((f - 1.0f32).abs() < 1e-5);
    }
}
