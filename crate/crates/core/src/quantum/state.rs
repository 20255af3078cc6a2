use num_complex::Complex64;

use super::eigen::hermitian_eigenvalues;
use super::matrix::ComplexMatrix;
use super::{QuantumError, Result, OPERATOR_TOL, POSITIVITY_TOL};

/// A one- or two-qubit state, either a normalized ket or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(Vec<Complex64>),
    Mixed(ComplexMatrix),
}

impl State {
    pub fn pure(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim != 2 && dim != 4 {
            return Err(QuantumError::InvalidDimension(dim));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > OPERATOR_TOL {
            return Err(QuantumError::NotNormalized(norm2));
        }
        Ok(State::Pure(amplitudes))
    }

    /// Normalizes `amplitudes` first; fails only on a zero vector or bad
    /// dimension.
    pub fn pure_normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QuantumError::NotNormalized(0.0));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::pure(amplitudes)
    }

    pub fn mixed(rho: ComplexMatrix) -> Result<Self> {
        let dev = rho.hermiticity_deviation();
        if dev > OPERATOR_TOL {
            return Err(QuantumError::NotHermitian(dev));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > OPERATOR_TOL || tr.im.abs() > OPERATOR_TOL {
            return Err(QuantumError::TraceNotOne(tr.re));
        }
        let min = min_eigenvalue(&rho);
        if min < POSITIVITY_TOL {
            return Err(QuantumError::NotPositive(min));
        }
        Ok(State::Mixed(rho))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let rho = ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        State::Mixed(rho)
    }

    /// Product of two single-qubit kets.
    pub fn product(q1: &[Complex64; 2], q2: &[Complex64; 2]) -> Result<Self> {
        let amps = vec![q1[0] * q2[0], q1[0] * q2[1], q1[1] * q2[0], q1[1] * q2[1]];
        Self::pure_normalized(amps)
    }

    /// `(|+−⟩ − |−+⟩)/√2`.
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        State::Pure(vec![z, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), z])
    }

    pub fn dim(&self) -> usize {
        match self {
            State::Pure(a) => a.len(),
            State::Mixed(m) => m.dim(),
        }
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match self {
            State::Pure(a) => Some(a),
            State::Mixed(_) => None,
        }
    }

    pub fn density(&self) -> ComplexMatrix {
        match self {
            State::Pure(a) => ComplexMatrix::outer(a).expect("validated dimension"),
            State::Mixed(m) => m.clone(),
        }
    }

    /// `⟨self|other⟩` for pure states.
    pub fn inner(&self, other: &State) -> Option<Complex64> {
        let (a, b) = (self.amplitudes()?, other.amplitudes()?);
        if a.len() != b.len() {
            return None;
        }
        Some(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
    }

    /// `⟨v|ρ|v⟩` for a normalized vector `v`.
    pub fn probability_of(&self, v: &[Complex64]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(QuantumError::DimensionMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        let p = match self {
            State::Pure(a) => v.iter().zip(a).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr(),
            State::Mixed(rho) => {
                let rv = rho.apply(v)?;
                v.iter().zip(&rv).map(|(x, y)| x.conj() * y).sum::<Complex64>().re
            }
        };
        Ok(p)
    }

    pub(super) fn raw_expectation(&self, obs: &ComplexMatrix) -> Result<Complex64> {
        if obs.dim() != self.dim() {
            return Err(QuantumError::DimensionMismatch {
                left: obs.dim(),
                right: self.dim(),
            });
        }
        match self {
            State::Pure(a) => {
                let image = obs.apply(a)?;
                Ok(a.iter().zip(&image).map(|(x, y)| x.conj() * y).sum())
            }
            State::Mixed(rho) => Ok(rho.mul(obs)?.trace()),
        }
    }
}

/// Smallest eigenvalue of a Hermitian matrix: closed form for 2×2, a
/// Gershgorin lower bound for 4×4 when that already proves positivity, and
/// Jacobi iteration otherwise.
pub(super) fn min_eigenvalue(rho: &ComplexMatrix) -> f64 {
    let n = rho.dim();
    if n == 2 {
        let a = rho[(0, 0)].re;
        let d = rho[(1, 1)].re;
        let b = rho[(0, 1)].norm();
        let half_tr = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        return half_tr - disc;
    }
    let gershgorin = (0..n)
        .map(|r| {
            let radius: f64 = (0..n).filter(|&c| c != r).map(|c| rho[(r, c)].norm()).sum();
            rho[(r, r)].re - radius
        })
        .fold(f64::INFINITY, f64::min);
    if gershgorin >= 0.0 {
        return gershgorin;
    }
    hermitian_eigenvalues(rho)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}
